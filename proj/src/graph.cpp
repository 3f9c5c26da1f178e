#include "kgc/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace kgc {

namespace {

const std::vector<EntityId> kNoEntities;

struct Dictionary {
  std::unordered_map<std::string, std::uint32_t> ids;
  std::vector<std::string> names;

  std::uint32_t intern(const std::string& name) {
    auto [it, inserted] = ids.try_emplace(name, static_cast<std::uint32_t>(names.size()));
    if (inserted) names.push_back(name);
    return it->second;
  }
};

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::vector<Triple> read_split(const std::filesystem::path& file, Dictionary& entities,
                               Dictionary& relations) {
  std::ifstream in(file);
  if (!in) throw DataError("missing dataset file: " + file.string());

  std::vector<Triple> triples;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3) {
      std::ostringstream msg;
      msg << file.string() << ":" << line_no << ": expected 3 tab-separated columns, found "
          << fields.size();
      throw DataError(msg.str());
    }
    if (!seen.insert(line).second) {
      std::ostringstream msg;
      msg << file.string() << ":" << line_no << ": duplicate triple";
      throw DataError(msg.str());
    }
    Triple t;
    t.subject = entities.intern(fields[0]);
    t.relation = relations.intern(fields[1]);
    t.object = entities.intern(fields[2]);
    triples.push_back(t);
  }
  return triples;
}

}  // namespace

Split parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "valid") return Split::Valid;
  if (name == "test") return Split::Test;
  throw std::invalid_argument("unknown split '" + std::string(name) + "' (train|valid|test)");
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Valid: return "valid";
    case Split::Test: return "test";
  }
  return "?";
}

KnowledgeGraph::KnowledgeGraph(std::size_t entity_count, std::size_t relation_count,
                               std::vector<Triple> train, std::vector<Triple> valid,
                               std::vector<Triple> test)
    : entity_count_(entity_count),
      relation_count_(relation_count),
      train_(std::move(train)),
      valid_(std::move(valid)),
      test_(std::move(test)) {
  build_indices();
}

void KnowledgeGraph::build_indices() {
  for (Split which : {Split::Train, Split::Valid, Split::Test}) {
    std::unordered_set<std::uint64_t> in_split;
    for (const auto& t : split(which)) {
      if (t.subject >= entity_count_ || t.object >= entity_count_ ||
          t.relation >= relation_count_) {
        throw DataError("triple id out of range in split " + std::string(split_name(which)));
      }
      auto key = triple_key(t);
      if (!in_split.insert(key).second) {
        throw DataError("duplicate triple in split " + std::string(split_name(which)));
      }
      if (which == Split::Train) train_known_.insert(key);
      if (!known_.insert(key).second) {
        ++report_.cross_split_duplicates;
        continue;
      }
      objects_of_[pair_key(t.subject, t.relation, relation_count_)].push_back(t.object);
      subjects_of_[pair_key(t.relation, t.object, entity_count_)].push_back(t.subject);
    }
  }

  // CSR incidence over train. Self-loops are listed once.
  std::vector<Index> counts(entity_count_ + 1, 0);
  for (const auto& t : train_) {
    ++counts[t.subject + 1];
    if (t.object != t.subject) ++counts[t.object + 1];
    else ++report_.self_loops;
  }
  for (std::size_t v = 0; v < entity_count_; ++v) counts[v + 1] += counts[v];
  incident_offsets_ = counts;
  incident_.assign(static_cast<std::size_t>(counts.back()), 0);
  std::vector<Index> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t i = 0; i < train_.size(); ++i) {
    const auto& t = train_[i];
    incident_[cursor[t.subject]++] = static_cast<Index>(i);
    if (t.object != t.subject) incident_[cursor[t.object]++] = static_cast<Index>(i);
  }
  connected_.clear();
  for (std::size_t v = 0; v < entity_count_; ++v) {
    if (incident_offsets_[v + 1] > incident_offsets_[v]) {
      connected_.push_back(static_cast<EntityId>(v));
    }
  }
}

std::uint64_t KnowledgeGraph::triple_key(const Triple& t) const {
  return (static_cast<std::uint64_t>(t.subject) * relation_count_ + t.relation) * entity_count_ +
         t.object;
}

const std::vector<Triple>& KnowledgeGraph::split(Split which) const {
  switch (which) {
    case Split::Train: return train_;
    case Split::Valid: return valid_;
    case Split::Test: return test_;
  }
  return train_;
}

std::span<const Index> KnowledgeGraph::incident(EntityId v) const {
  check_entity(v);
  auto begin = static_cast<std::size_t>(incident_offsets_[v]);
  auto end = static_cast<std::size_t>(incident_offsets_[v + 1]);
  return std::span<const Index>(incident_).subspan(begin, end - begin);
}

bool KnowledgeGraph::contains(const Triple& t) const {
  if (t.subject >= entity_count_ || t.object >= entity_count_ || t.relation >= relation_count_)
    return false;
  return known_.contains(triple_key(t));
}

bool KnowledgeGraph::in_train(const Triple& t) const {
  if (t.subject >= entity_count_ || t.object >= entity_count_ || t.relation >= relation_count_)
    return false;
  return train_known_.contains(triple_key(t));
}

std::span<const EntityId> KnowledgeGraph::known_objects(EntityId s, RelationId r) const {
  auto it = objects_of_.find(pair_key(s, r, relation_count_));
  return it == objects_of_.end() ? std::span<const EntityId>(kNoEntities) : it->second;
}

std::span<const EntityId> KnowledgeGraph::known_subjects(RelationId r, EntityId o) const {
  auto it = subjects_of_.find(pair_key(r, o, entity_count_));
  return it == subjects_of_.end() ? std::span<const EntityId>(kNoEntities) : it->second;
}

std::string KnowledgeGraph::entity_label(EntityId e) const {
  return e < entity_names_.size() ? entity_names_[e] : "e" + std::to_string(e);
}

std::string KnowledgeGraph::relation_label(RelationId r) const {
  return r < relation_names_.size() ? relation_names_[r] : "r" + std::to_string(r);
}

void KnowledgeGraph::check_entity(EntityId v) const {
  if (v >= entity_count_) {
    throw std::out_of_range("entity id " + std::to_string(v) + " out of range (|E|=" +
                            std::to_string(entity_count_) + ")");
  }
}

void KnowledgeGraph::check_triple(const Triple& t) const {
  check_entity(t.subject);
  check_entity(t.object);
  if (t.relation >= relation_count_) {
    throw std::out_of_range("relation id " + std::to_string(t.relation) + " out of range");
  }
}

KnowledgeGraph load_dataset(const std::filesystem::path& directory) {
  Dictionary entities;
  Dictionary relations;
  auto train = read_split(directory / "train.txt", entities, relations);
  auto valid = read_split(directory / "valid.txt", entities, relations);
  auto test = read_split(directory / "test.txt", entities, relations);

  KnowledgeGraph g(entities.names.size(), relations.names.size(), std::move(train),
                   std::move(valid), std::move(test));
  g.entity_names_ = std::move(entities.names);
  g.relation_names_ = std::move(relations.names);
  return g;
}

void write_dictionaries(const KnowledgeGraph& g, const std::filesystem::path& directory) {
  auto dump = [](const std::filesystem::path& file, std::size_t count, auto label) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write " + file.string());
    for (std::size_t i = 0; i < count; ++i) out << i << '\t' << label(i) << '\n';
  };
  dump(directory / "entities.tsv", g.entity_count(),
       [&](std::size_t i) { return g.entity_label(static_cast<EntityId>(i)); });
  dump(directory / "relations.tsv", g.relation_count(),
       [&](std::size_t i) { return g.relation_label(static_cast<RelationId>(i)); });
}

std::vector<std::string> read_dictionary(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("missing dictionary file: " + file.string());
  std::vector<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0] != std::to_string(names.size())) {
      throw DataError(file.string() + ":" + std::to_string(line_no) + ": malformed dictionary row");
    }
    names.push_back(fields[1]);
  }
  return names;
}

std::size_t degree(const KnowledgeGraph& g, EntityId v) {
  std::size_t d = 0;
  for (Index i : g.incident(v)) {
    const auto& t = g.train()[static_cast<std::size_t>(i)];
    d += (t.subject == v) + (t.object == v);
  }
  return d;
}

std::vector<Index> neighbor_triple_indices(const KnowledgeGraph& g, const Triple& t) {
  auto a = g.incident(t.subject);
  auto b = g.incident(t.object);
  std::vector<Index> merged;
  merged.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
  std::erase_if(merged, [&](Index i) { return g.train()[static_cast<std::size_t>(i)] == t; });
  return merged;
}

std::vector<Triple> neighbor_triples(const KnowledgeGraph& g, const Triple& t) {
  std::vector<Triple> out;
  for (Index i : neighbor_triple_indices(g, t)) out.push_back(g.train()[static_cast<std::size_t>(i)]);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Index> induced_subgraph_indices(const KnowledgeGraph& g,
                                            std::span<const EntityId> vertices) {
  std::unordered_set<EntityId> members(vertices.begin(), vertices.end());
  std::vector<Index> out;
  for (EntityId v : members) {
    for (Index i : g.incident(v)) {
      const auto& t = g.train()[static_cast<std::size_t>(i)];
      EntityId other = t.subject == v ? t.object : t.subject;
      // Each qualifying triple is reported once, from its smaller endpoint.
      if (members.contains(other) && v == std::min(t.subject, t.object)) out.push_back(i);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Triple> induced_subgraph(const KnowledgeGraph& g, std::span<const EntityId> vertices) {
  std::vector<Triple> out;
  for (Index i : induced_subgraph_indices(g, vertices))
    out.push_back(g.train()[static_cast<std::size_t>(i)]);
  std::sort(out.begin(), out.end());
  return out;
}

DegreeSummary degree_summary(const KnowledgeGraph& g) {
  DegreeSummary summary;
  if (g.entity_count() == 0) return summary;
  std::vector<std::size_t> degrees(g.entity_count());
  double total = 0.0;
  for (std::size_t v = 0; v < g.entity_count(); ++v) {
    degrees[v] = degree(g, static_cast<EntityId>(v));
    total += static_cast<double>(degrees[v]);
  }
  summary.mean = total / static_cast<double>(degrees.size());
  std::sort(degrees.begin(), degrees.end());
  auto n = degrees.size();
  summary.median = n % 2 == 1 ? static_cast<double>(degrees[n / 2])
                              : 0.5 * static_cast<double>(degrees[n / 2 - 1] + degrees[n / 2]);
  return summary;
}

}  // namespace kgc
