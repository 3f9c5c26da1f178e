#include "kgc/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>

namespace kgc {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& file) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
    throw DataError("truncated checkpoint header: " + file.string());
  return value;
}

}  // namespace

ModelKind parse_model_kind(std::string_view name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
  if (s == "transe") return ModelKind::TransE;
  if (s == "distmult") return ModelKind::DistMult;
  if (s == "complex") return ModelKind::ComplEx;
  if (s == "rotate") return ModelKind::RotatE;
  throw std::invalid_argument("unknown model '" + std::string(name) +
                              "'; valid models: transe, distmult, complex, rotate");
}

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::TransE: return "transe";
    case ModelKind::DistMult: return "distmult";
    case ModelKind::ComplEx: return "complex";
    case ModelKind::RotatE: return "rotate";
  }
  return "?";
}

void save_checkpoint(const Store& store, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + file.string());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(store.model));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(store.entity_count()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(store.relation_count()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(store.dim));
  out.write(reinterpret_cast<const char*>(store.entity.data()),
            static_cast<std::streamsize>(store.entity.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(store.relation.data()),
            static_cast<std::streamsize>(store.relation.size() * sizeof(double)));
  if (!out) throw DataError("failed writing checkpoint " + file.string());
}

Store load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + file.string());
  char magic[sizeof(kCheckpointMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw DataError("not a checkpoint file: " + file.string());
  auto kind = get<std::uint32_t>(in, file);
  if (kind > static_cast<std::uint32_t>(ModelKind::RotatE))
    throw DataError("unknown model kind in checkpoint: " + std::to_string(kind));
  auto entities = get<std::uint64_t>(in, file);
  auto relations = get<std::uint64_t>(in, file);
  auto dim = get<std::uint64_t>(in, file);

  Store store;
  store.model = static_cast<ModelKind>(kind);
  store.dim = static_cast<Index>(dim);
  store.entity.resize(static_cast<Index>(entities), store.entity_width());
  store.relation.resize(static_cast<Index>(relations), store.relation_width());
  auto read_matrix = [&](Mxd& m) {
    if (!in.read(reinterpret_cast<char*>(m.data()),
                 static_cast<std::streamsize>(m.size() * sizeof(double))))
      throw DataError("truncated checkpoint payload: " + file.string());
  };
  read_matrix(store.entity);
  read_matrix(store.relation);
  return store;
}

}  // namespace kgc
