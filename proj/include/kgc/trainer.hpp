#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "kgc/loss.hpp"
#include "kgc/sampler.hpp"
#include "kgc/scorer.hpp"

namespace kgc {

enum class OptimizerKind { SGD, Adam };

OptimizerKind parse_optimizer_kind(std::string_view name);
std::string_view optimizer_name(OptimizerKind kind);

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  std::size_t epochs = 100;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::Adam;
  AdamParams adam;
  SamplerPolicy sampler;
  LossConfig loss;
  std::size_t eval_every = 10;
  /// Seeds both the sampler (overriding sampler.seed) and negative sampling.
  std::uint64_t seed = 0;
  bool variance_probe = false;
  /// After each step, entity rows touched by the batch whose L2 norm exceeds 1
  /// are scaled back onto the unit ball.
  bool project_entities = false;

  void validate() const;
};

/// Adam with moments kept only for rows that receive a gradient. Each row
/// carries its own step count for bias correction; untouched rows and their
/// moments are left alone.
class SparseAdam {
 public:
  SparseAdam(const Store& store, AdamParams params);

  void step(Store& store, const SparseGradient& grads, double learning_rate);

  std::uint64_t entity_steps(Index row) const { return entity_.steps[static_cast<std::size_t>(row)]; }

 private:
  struct Moments {
    Mxd first;
    Mxd second;
    std::vector<std::uint64_t> steps;
  };
  void update(Mxd& params, Moments& moments, Index row, const Vxd& g, double learning_rate);

  AdamParams params_;
  Moments entity_;
  Moments relation_;
};

void sgd_step(Store& store, const SparseGradient& grads, double learning_rate);

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double wall_time_s = 0.0;
  std::size_t batches = 0;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t steps = 0;
};

/// `{"epoch":..,"mean_loss":..,"wall_time_s":..,"batches":..}` on one line.
void write_epoch_record(std::ostream& out, const EpochRecord& record);

/// Raised when a batch produces a non-finite loss or gradient.
class NonFiniteLoss : public NumericalError {
 public:
  NonFiniteLoss(std::string message, std::vector<Triple> batch)
      : NumericalError(std::move(message)), batch_(std::move(batch)) {}
  const std::vector<Triple>& batch() const { return batch_; }

 private:
  std::vector<Triple> batch_;
};

/// Loss and sparse gradient of one batch, reduced as a mean over its positives.
/// Uses the neighbors' loss when config.neighbors_loss is set.
double batch_loss_and_grads(const KnowledgeGraph& g, const Store& store, const Minibatch& batch,
                            const LossConfig& config, Rng& rng, SparseGradient& grads);

using EpochCallback = std::function<void(const EpochRecord&, const Store&)>;

/// Minibatch training. Each step touches only rows with a nonzero gradient.
/// Bitwise deterministic for a fixed config.
TrainLog train(const KnowledgeGraph& g, Store& store, const TrainConfig& config,
               const EpochCallback& on_epoch = {});

struct EntityVariance {
  EntityId entity = 0;
  std::size_t graph_degree = 0;
  std::size_t batches_seen = 0;
  double grad_variance = 0.0;
};

struct GradientVarianceReport {
  std::vector<EntityVariance> entities;
  std::size_t num_batches = 0;

  /// Median over entities whose graph degree is at least `min_degree`.
  double median_variance(std::size_t min_degree = 0) const;
  double median_batches_seen(std::size_t min_degree = 0) const;
};

using BatchSource = std::function<Minibatch()>;

/// Draws `num_batches` minibatches without updating the store. An entity's
/// per-batch gradient is its batch-gradient row divided by the number of
/// per-triple loss terms it took part in; its variance is the per-coordinate
/// sample variance across the batches that touched it, averaged over
/// coordinates. Only entities seen in at least two batches are reported.
GradientVarianceReport gradient_variance_probe(const KnowledgeGraph& g, const Store& store,
                                               const TrainConfig& config,
                                               std::size_t num_batches);
GradientVarianceReport gradient_variance_probe(const KnowledgeGraph& g, const Store& store,
                                               const TrainConfig& config, std::size_t num_batches,
                                               const BatchSource& batches);

/// `entity_id,graph_degree,batches_seen,grad_variance`
void write_variance_csv(std::ostream& out, const GradientVarianceReport& report);

struct VarianceStratum {
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;  // exclusive; 0 means unbounded
  std::size_t entities = 0;
  double median_variance = 0.0;
  double median_batches_seen = 0.0;
};

/// Medians within degree buckets [1,2), [2,5), [5,10), [10,20), [20,inf).
std::vector<VarianceStratum> stratify_by_degree(const GradientVarianceReport& report);

}  // namespace kgc
