#include "kgc/sampler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iostream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace kgc {

namespace {

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

std::size_t clamp_batch_size(const KnowledgeGraph& g, std::size_t b) {
  if (b > g.train().size()) {
    std::clog << "warning: batch size " << b << " exceeds |train|=" << g.train().size()
              << ", clamping\n";
    return g.train().size();
  }
  return b;
}

void require_train(const KnowledgeGraph& g) {
  if (g.train().empty()) throw std::invalid_argument("cannot sample from an empty train split");
}

Minibatch make_batch(const KnowledgeGraph& g, const SamplerPolicy& policy,
                     std::vector<Index> indices) {
  Minibatch m;
  m.provenance = policy;
  m.indices = std::move(indices);
  m.positives.reserve(m.indices.size());
  std::unordered_set<EntityId> vertices;
  for (Index i : m.indices) {
    const auto& t = g.train()[static_cast<std::size_t>(i)];
    m.positives.push_back(t);
    vertices.insert(t.subject);
    vertices.insert(t.object);
  }
  m.vertex_set.assign(vertices.begin(), vertices.end());
  std::sort(m.vertex_set.begin(), m.vertex_set.end());
  return m;
}

/// Undirected walk over train triples collecting distinct triples until
/// `target` are held. Restarts with probability `restart_probability` before
/// each step; a stalled vertex (every incident triple already collected)
/// restarts the walk at a fresh uniform connected entity.
std::vector<Index> walk(const KnowledgeGraph& g, std::size_t target, double restart_probability,
                        RestartTarget restart_target, Rng& rng, std::optional<EntityId> start) {
  const auto& connected = g.connected_entities();
  std::vector<Index> collected;
  collected.reserve(target);
  std::unordered_set<Index> have;
  std::unordered_map<EntityId, std::size_t> collected_incident;
  std::vector<EntityId> visited;
  std::unordered_set<EntityId> visited_set;

  auto visit = [&](EntityId v) {
    if (visited_set.insert(v).second) visited.push_back(v);
  };
  auto fresh_start = [&]() { return connected[uniform_index(rng, connected.size())]; };

  EntityId current = start ? *start : fresh_start();
  g.check_entity(current);
  EntityId origin = current;
  visit(current);
  std::bernoulli_distribution restart(restart_probability);

  while (collected.size() < target) {
    if (restart_probability > 0.0 && restart(rng)) {
      current = restart_target == RestartTarget::StartNode ? origin
                                                           : visited[uniform_index(rng, visited.size())];
    }
    auto incident = g.incident(current);
    auto held = collected_incident.find(current);
    if (incident.empty() || (held != collected_incident.end() && held->second == incident.size())) {
      current = fresh_start();
      origin = current;
      visit(current);
      continue;
    }
    Index pick = incident[uniform_index(rng, incident.size())];
    const auto& t = g.train()[static_cast<std::size_t>(pick)];
    if (have.insert(pick).second) {
      collected.push_back(pick);
      ++collected_incident[t.subject];
      if (t.object != t.subject) ++collected_incident[t.object];
    }
    current = t.subject == current ? t.object : t.subject;
    visit(current);
  }
  return collected;
}

std::vector<EntityId> endpoints(const KnowledgeGraph& g, std::span<const Index> indices) {
  std::unordered_set<EntityId> vs;
  for (Index i : indices) {
    const auto& t = g.train()[static_cast<std::size_t>(i)];
    vs.insert(t.subject);
    vs.insert(t.object);
  }
  std::vector<EntityId> out(vs.begin(), vs.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string normalize(std::string_view name) {
  std::string s;
  for (char c : name) s.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(c)));
  return s;
}

}  // namespace

SamplerKind parse_sampler_kind(std::string_view name) {
  auto s = normalize(name);
  if (s == "sr") return SamplerKind::SR;
  if (s == "rw") return SamplerKind::RW;
  if (s == "rwr") return SamplerKind::RWR;
  if (s == "rwisg") return SamplerKind::RWISG;
  if (s == "rwisg-n") return SamplerKind::RWISG_N;
  throw std::invalid_argument("unknown sampler '" + std::string(name) +
                              "'; valid kinds: " + std::string(kSamplerNames));
}

std::string_view sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::SR: return "sr";
    case SamplerKind::RW: return "rw";
    case SamplerKind::RWR: return "rwr";
    case SamplerKind::RWISG: return "rwisg";
    case SamplerKind::RWISG_N: return "rwisg-n";
  }
  return "?";
}

RestartTarget parse_restart_target(std::string_view name) {
  auto s = normalize(name);
  if (s == "start-node" || s == "start") return RestartTarget::StartNode;
  if (s == "uniform-previous" || s == "previous") return RestartTarget::UniformPrevious;
  throw std::invalid_argument("unknown restart target '" + std::string(name) +
                              "' (start-node|uniform-previous)");
}

std::string_view restart_target_name(RestartTarget target) {
  return target == RestartTarget::StartNode ? "start-node" : "uniform-previous";
}

void SamplerPolicy::validate() const {
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!unit(restart_probability)) throw std::invalid_argument("restart_probability not in [0,1]");
  if (!unit(extra_neighbor_fraction))
    throw std::invalid_argument("extra_neighbor_fraction not in [0,1]");
}

Minibatch sample_sr(const KnowledgeGraph& g, const SamplerPolicy& policy, Rng& rng) {
  policy.validate();
  require_train(g);
  const std::size_t n = g.train().size();
  const std::size_t b = clamp_batch_size(g, policy.batch_size);
  // Floyd's algorithm: b distinct indices in O(b).
  std::unordered_set<Index> chosen;
  std::vector<Index> indices;
  indices.reserve(b);
  for (std::size_t j = n - b; j < n; ++j) {
    auto candidate = static_cast<Index>(std::uniform_int_distribution<std::size_t>(0, j)(rng));
    if (!chosen.insert(candidate).second) {
      candidate = static_cast<Index>(j);
      chosen.insert(candidate);
    }
    indices.push_back(candidate);
  }
  return make_batch(g, policy, std::move(indices));
}

Minibatch sample_rw(const KnowledgeGraph& g, const SamplerPolicy& policy, Rng& rng,
                    std::optional<EntityId> start) {
  policy.validate();
  require_train(g);
  auto b = clamp_batch_size(g, policy.batch_size);
  return make_batch(g, policy, walk(g, b, 0.0, policy.restart_target, rng, start));
}

Minibatch sample_rwr(const KnowledgeGraph& g, const SamplerPolicy& policy, Rng& rng,
                     std::optional<EntityId> start) {
  policy.validate();
  require_train(g);
  auto b = clamp_batch_size(g, policy.batch_size);
  return make_batch(
      g, policy, walk(g, b, policy.restart_probability, policy.restart_target, rng, start));
}

Minibatch sample_rwisg(const KnowledgeGraph& g, const SamplerPolicy& policy, Rng& rng,
                       std::optional<EntityId> start) {
  policy.validate();
  require_train(g);
  auto b = clamp_batch_size(g, policy.batch_size);
  auto walked = walk(g, b, 0.0, policy.restart_target, rng, start);
  auto vertices = endpoints(g, walked);
  return make_batch(g, policy, induced_subgraph_indices(g, vertices));
}

Minibatch sample_rwisg_n(const KnowledgeGraph& g, const SamplerPolicy& policy, Rng& rng,
                         std::optional<EntityId> start) {
  policy.validate();
  require_train(g);
  auto b = clamp_batch_size(g, policy.batch_size);
  auto walked = walk(g, b, 0.0, policy.restart_target, rng, start);
  auto vertices = endpoints(g, walked);
  auto indices = induced_subgraph_indices(g, vertices);

  if (policy.extra_neighbor_fraction > 0.0 && policy.max_extra_per_vertex > 0) {
    std::unordered_set<Index> members(indices.begin(), indices.end());
    std::vector<Index> pool;
    for (EntityId v : vertices) {
      auto incident = g.incident(v);
      auto want = static_cast<std::size_t>(
          std::ceil(policy.extra_neighbor_fraction * static_cast<double>(incident.size())));
      want = std::min({want, policy.max_extra_per_vertex, incident.size()});
      pool.assign(incident.begin(), incident.end());
      // Partial Fisher-Yates: the first `want` entries are a uniform draw
      // without replacement.
      for (std::size_t k = 0; k < want; ++k) {
        std::swap(pool[k], pool[k + uniform_index(rng, pool.size() - k)]);
        if (members.insert(pool[k]).second) indices.push_back(pool[k]);
      }
    }
    std::sort(indices.begin(), indices.end());
  }
  return make_batch(g, policy, std::move(indices));
}

Minibatch sample(const KnowledgeGraph& g, const SamplerPolicy& policy, Rng& rng) {
  switch (policy.kind) {
    case SamplerKind::SR: return sample_sr(g, policy, rng);
    case SamplerKind::RW: return sample_rw(g, policy, rng);
    case SamplerKind::RWR: return sample_rwr(g, policy, rng);
    case SamplerKind::RWISG: return sample_rwisg(g, policy, rng);
    case SamplerKind::RWISG_N: return sample_rwisg_n(g, policy, rng);
  }
  throw std::logic_error("unhandled sampler kind");
}

EpochIterator::EpochIterator(const KnowledgeGraph& g, SamplerPolicy policy)
    : graph_(&g), policy_(policy), rng_(policy.seed) {
  policy_.validate();
  const auto n = g.train().size();
  batches_per_epoch_ = n == 0 ? 0 : (n + policy_.batch_size - 1) / policy_.batch_size;
}

void EpochIterator::begin_epoch() {
  cursor_ = 0;
  in_epoch_ = true;
  if (policy_.kind == SamplerKind::SR) {
    permutation_.resize(graph_->train().size());
    for (std::size_t i = 0; i < permutation_.size(); ++i) permutation_[i] = static_cast<Index>(i);
    std::shuffle(permutation_.begin(), permutation_.end(), rng_);
  }
}

std::optional<Minibatch> EpochIterator::next() {
  if (!in_epoch_) begin_epoch();
  if (cursor_ >= batches_per_epoch_) {
    in_epoch_ = false;
    return std::nullopt;
  }
  const std::size_t k = cursor_++;
  if (policy_.kind == SamplerKind::SR) {
    auto begin = permutation_.begin() + static_cast<std::ptrdiff_t>(k * policy_.batch_size);
    auto end = permutation_.begin() +
               static_cast<std::ptrdiff_t>(
                   std::min(permutation_.size(), (k + 1) * policy_.batch_size));
    return make_batch(*graph_, policy_, std::vector<Index>(begin, end));
  }
  return sample(*graph_, policy_, rng_);
}

std::vector<Minibatch> EpochIterator::epoch() {
  begin_epoch();
  std::vector<Minibatch> out;
  out.reserve(batches_per_epoch_);
  while (auto m = next()) out.push_back(std::move(*m));
  return out;
}

void write_dot(std::ostream& out, const KnowledgeGraph& g, const Minibatch& batch) {
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q.push_back('\\');
      q.push_back(c);
    }
    q.push_back('"');
    return q;
  };
  out << "digraph minibatch {\n";
  out << "  // sampler=" << sampler_name(batch.provenance.kind)
      << " batch_size=" << batch.provenance.batch_size << " triples=" << batch.size() << "\n";
  for (EntityId v : batch.vertex_set) out << "  " << quote(g.entity_label(v)) << ";\n";
  for (const auto& t : batch.positives) {
    out << "  " << quote(g.entity_label(t.subject)) << " -> " << quote(g.entity_label(t.object))
        << " [label=" << quote(g.relation_label(t.relation)) << "];\n";
  }
  out << "}\n";
}

}  // namespace kgc
