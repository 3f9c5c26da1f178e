#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "kgc/sampler.hpp"
#include "kgc/scorer.hpp"

namespace kgc {

struct LossConfig {
  /// gamma in -1/2 [log sig(phi(t) - gamma) + E log sig(gamma - phi(t-))].
  double margin = 0.0;
  std::size_t negatives_per_positive = 64;
  /// Self-adversarial temperature alpha; 0 gives uniform weights.
  double adversarial_temperature = 0.0;
  bool filtered_negatives = true;
  std::size_t max_corruption_retries = 64;

  bool neighbors_loss = false;
  /// nullopt: no cap.
  std::optional<std::size_t> neighbor_cap;
  /// Normalize the neighbor bracket by the pre-cap neighbor count instead of
  /// the post-cap count.
  bool normalize_by_precap = false;

  void validate() const;
};

/// Margin that makes the soft-margin form match the usual distance-model
/// convention log sig(gamma' - d): -6 for TransE/RotatE, 0 otherwise.
double default_margin(ModelKind model);

enum class CorruptedSlot { Head, Tail };

struct Negative {
  Triple triple;
  CorruptedSlot slot;
};

/// n corruptions of t, each replacing head or tail (fair coin) by a uniform
/// different entity. When `filtered`, candidates known to the graph are
/// rejected; a negative whose retries run out is dropped with a warning.
std::vector<Negative> corrupt(const KnowledgeGraph& g, const Triple& t, std::size_t n,
                              bool filtered, Rng& rng, std::size_t max_retries = 64);

/// Negatives for every positive, in order.
std::vector<std::vector<Negative>> make_negatives(const KnowledgeGraph& g,
                                                  std::span<const Triple> positives,
                                                  const LossConfig& config, Rng& rng);

/// log(sigmoid(x)) without overflow for any finite x.
double log_sigmoid(double x);
double sigmoid(double x);

/// softmax(alpha * scores). The result is used as a constant: no gradient
/// flows through it.
Vxd adversarial_weights(const Vxd& scores, double alpha);

/// Sparse row-id -> gradient accumulators. `entity_terms` counts, per entity,
/// the per-triple loss terms it took part in.
struct SparseGradient {
  std::unordered_map<Index, Vxd> entity;
  std::unordered_map<Index, Vxd> relation;
  std::unordered_map<Index, std::size_t> entity_terms;

  void add_entity(Index id, const Vxd& g, double scale);
  void add_relation(Index id, const Vxd& g, double scale);
  void scale(double factor);
  bool all_finite() const;
  void clear();
};

/// One soft-margin term with caller-supplied negative weights. Gradients of
/// scale * loss are accumulated into `grads` when non-null; returns the
/// unscaled loss.
double softmargin_term(const Store& store, const Triple& t, std::span<const Triple> negatives,
                       std::span<const double> weights, double margin, SparseGradient* grads,
                       double scale = 1.0);

/// Soft-margin term of t: uniform mean over negatives, or the adversarial
/// weighting when config.adversarial_temperature > 0.
double softmargin_loss_and_grads(const Store& store, const Triple& t,
                                 std::span<const Negative> negatives, const LossConfig& config,
                                 SparseGradient* grads, double scale = 1.0);

/// Sum of soft-margin terms over a batch.
double vanilla_loss_and_grads(const Store& store, std::span<const Triple> positives,
                              std::span<const std::vector<Negative>> negatives,
                              const LossConfig& config, SparseGradient* grads);

/// Neighbors' loss: for each positive t, its soft-margin term plus one term
/// per (capped) neighbor triple, the bracket scaled by 1 / (1 + |neighbors|).
/// Negatives for positives are supplied; neighbor negatives are drawn from rng.
double neighbors_loss_and_grads(const KnowledgeGraph& g, const Store& store,
                                std::span<const Triple> positives,
                                std::span<const std::vector<Negative>> negatives,
                                const LossConfig& config, Rng& rng, SparseGradient* grads);

/// As above, drawing the positives' negatives first.
double neighbors_loss_and_grads(const KnowledgeGraph& g, const Store& store, const Minibatch& m,
                                const LossConfig& config, Rng& rng, SparseGradient* grads);

/// Neighbor triples of t after the uniform cap is applied.
std::vector<Index> capped_neighbors(const KnowledgeGraph& g, const Triple& t,
                                    std::optional<std::size_t> cap, Rng& rng);

}  // namespace kgc
