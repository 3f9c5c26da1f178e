#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "kgc/graph.hpp"

namespace kgc {

using Rng = std::mt19937_64;

enum class SamplerKind { SR, RW, RWR, RWISG, RWISG_N };
enum class RestartTarget { StartNode, UniformPrevious };

/// Accepts sr, rw, rwr, rwisg, rwisg-n (case-insensitive, '_' or '-').
SamplerKind parse_sampler_kind(std::string_view name);
std::string_view sampler_name(SamplerKind kind);
inline constexpr std::string_view kSamplerNames = "sr, rw, rwr, rwisg, rwisg-n";

RestartTarget parse_restart_target(std::string_view name);
std::string_view restart_target_name(RestartTarget target);

struct SamplerPolicy {
  SamplerKind kind = SamplerKind::SR;
  std::size_t batch_size = 1024;
  double restart_probability = 0.15;
  RestartTarget restart_target = RestartTarget::StartNode;
  // RWISG-N: per visited vertex draw ceil(fraction * |incident|) triples, at
  // most max_extra_per_vertex of them.
  double extra_neighbor_fraction = 0.5;
  std::size_t max_extra_per_vertex = 32;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on a zero batch size or a probability
  /// outside [0, 1].
  void validate() const;
};

struct Minibatch {
  /// Deduplicated train triples; `indices` holds their positions in g.train().
  std::vector<Triple> positives;
  std::vector<Index> indices;
  /// Sorted distinct endpoints of `positives`.
  std::vector<EntityId> vertex_set;
  SamplerPolicy provenance;

  std::size_t size() const { return positives.size(); }
  bool empty() const { return positives.empty(); }
};

Minibatch sample_sr(const KnowledgeGraph& g, const SamplerPolicy& policy, Rng& rng);

// The walk-based samplers accept an optional forced start entity.
Minibatch sample_rw(const KnowledgeGraph& g, const SamplerPolicy& policy, Rng& rng,
                    std::optional<EntityId> start = std::nullopt);
Minibatch sample_rwr(const KnowledgeGraph& g, const SamplerPolicy& policy, Rng& rng,
                     std::optional<EntityId> start = std::nullopt);
Minibatch sample_rwisg(const KnowledgeGraph& g, const SamplerPolicy& policy, Rng& rng,
                       std::optional<EntityId> start = std::nullopt);
Minibatch sample_rwisg_n(const KnowledgeGraph& g, const SamplerPolicy& policy, Rng& rng,
                         std::optional<EntityId> start = std::nullopt);

/// Dispatches on policy.kind.
Minibatch sample(const KnowledgeGraph& g, const SamplerPolicy& policy, Rng& rng);

/// Yields ceil(|train| / b) minibatches per epoch. SR epochs partition a fresh
/// permutation of the train split; walk-based epochs are independent draws.
/// Owns its random state, seeded from policy.seed.
class EpochIterator {
 public:
  EpochIterator(const KnowledgeGraph& g, SamplerPolicy policy);

  std::size_t batches_per_epoch() const { return batches_per_epoch_; }

  /// Starts a new epoch; called implicitly by next() once an epoch is exhausted.
  void begin_epoch();

  /// Returns the next minibatch of the current epoch, or nullopt at its end.
  std::optional<Minibatch> next();

  /// Collects one full epoch.
  std::vector<Minibatch> epoch();

 private:
  const KnowledgeGraph* graph_;
  SamplerPolicy policy_;
  Rng rng_;
  std::size_t batches_per_epoch_ = 0;
  std::size_t cursor_ = 0;
  bool in_epoch_ = false;
  std::vector<Index> permutation_;
};

/// DOT digraph: entities as nodes, triples as relation-labelled edges.
void write_dot(std::ostream& out, const KnowledgeGraph& g, const Minibatch& batch);

}  // namespace kgc
