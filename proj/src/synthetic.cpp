#include "kgc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace kgc {

KnowledgeGraph power_law_graph(std::size_t entities, std::size_t relations, std::size_t triples,
                               double skew, std::uint64_t seed) {
  if (entities < 2 || relations == 0) throw std::invalid_argument("power_law_graph: bad sizes");
  if (triples > entities * (entities - 1) * relations / 2)
    throw std::invalid_argument("power_law_graph: too many triples requested");
  std::mt19937_64 rng(seed);
  std::vector<double> weights(entities);
  for (std::size_t i = 0; i < entities; ++i)
    weights[i] = std::pow(static_cast<double>(i + 1), -skew);
  // Shuffle so that ids carry no degree information.
  std::shuffle(weights.begin(), weights.end(), rng);
  std::discrete_distribution<EntityId> endpoint(weights.begin(), weights.end());
  std::uniform_int_distribution<RelationId> relation(0, static_cast<RelationId>(relations - 1));

  std::vector<Triple> train;
  std::unordered_set<std::uint64_t> seen;
  while (train.size() < triples) {
    Triple t{endpoint(rng), relation(rng), endpoint(rng)};
    if (t.subject == t.object) continue;
    auto key = (static_cast<std::uint64_t>(t.subject) * relations + t.relation) * entities + t.object;
    if (!seen.insert(key).second) continue;
    train.push_back(t);
  }
  return KnowledgeGraph(entities, relations, std::move(train));
}

KnowledgeGraph planted_toy_graph(std::size_t entities, double held_out, std::uint64_t seed) {
  if (entities < 4 || entities % 2 != 0)
    throw std::invalid_argument("planted_toy_graph: need an even entity count >= 4");
  if (held_out < 0.0 || held_out >= 0.5) throw std::invalid_argument("held_out must be in [0, 0.5)");
  const auto n = static_cast<EntityId>(entities);
  std::vector<Triple> all;
  for (EntityId i = 0; i < n; ++i) {
    all.push_back({i, 0, (i + n / 2) % n});
    all.push_back({i, 1, (i + 1) % n});
    all.push_back({i, 2, (i + 2) % n});
  }
  std::mt19937_64 rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  const auto test_count = static_cast<std::size_t>(std::round(held_out * static_cast<double>(all.size())));
  const auto valid_count = test_count / 2;
  std::vector<Triple> test(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(test_count));
  std::vector<Triple> valid(all.begin() + static_cast<std::ptrdiff_t>(test_count),
                            all.begin() + static_cast<std::ptrdiff_t>(test_count + valid_count));
  std::vector<Triple> train(all.begin() + static_cast<std::ptrdiff_t>(test_count + valid_count),
                            all.end());
  return KnowledgeGraph(entities, 3, std::move(train), std::move(valid), std::move(test));
}

void write_dataset(const KnowledgeGraph& g, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  for (Split which : {Split::Train, Split::Valid, Split::Test}) {
    auto file = directory / (std::string(split_name(which)) + ".txt");
    std::ofstream out(file);
    if (!out) throw DataError("cannot write " + file.string());
    for (const auto& t : g.split(which)) {
      out << g.entity_label(t.subject) << '\t' << g.relation_label(t.relation) << '\t'
          << g.entity_label(t.object) << '\n';
    }
  }
}

}  // namespace kgc
