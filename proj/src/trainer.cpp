#include "kgc/trainer.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace kgc {

namespace {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string describe_batch(const Minibatch& batch) {
  std::ostringstream out;
  for (const auto& t : batch.positives) out << t.subject << '\t' << t.relation << '\t' << t.object << '\n';
  return out.str();
}

}  // namespace

OptimizerKind parse_optimizer_kind(std::string_view name) {
  std::string s;
  for (char c : name) s.push_back(static_cast<char>(std::tolower(c)));
  if (s == "sgd") return OptimizerKind::SGD;
  if (s == "adam") return OptimizerKind::Adam;
  throw std::invalid_argument("unknown optimizer '" + std::string(name) + "' (sgd|adam)");
}

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::SGD ? "sgd" : "adam";
}

void TrainConfig::validate() const {
  if (epochs == 0) throw std::invalid_argument("epochs must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning_rate must be finite and non-negative");
  if (adam.beta1 < 0.0 || adam.beta1 >= 1.0 || adam.beta2 < 0.0 || adam.beta2 >= 1.0)
    throw std::invalid_argument("adam betas must lie in [0, 1)");
  if (eval_every == 0) throw std::invalid_argument("eval_every must be >= 1");
  sampler.validate();
  loss.validate();
}

SparseAdam::SparseAdam(const Store& store, AdamParams params) : params_(params) {
  entity_.first = Mxd::Zero(store.entity.rows(), store.entity.cols());
  entity_.second = Mxd::Zero(store.entity.rows(), store.entity.cols());
  entity_.steps.assign(static_cast<std::size_t>(store.entity.rows()), 0);
  relation_.first = Mxd::Zero(store.relation.rows(), store.relation.cols());
  relation_.second = Mxd::Zero(store.relation.rows(), store.relation.cols());
  relation_.steps.assign(static_cast<std::size_t>(store.relation.rows()), 0);
}

void SparseAdam::update(Mxd& params, Moments& moments, Index row, const Vxd& g,
                        double learning_rate) {
  if (g.isZero(0.0)) return;
  auto& steps = moments.steps[static_cast<std::size_t>(row)];
  ++steps;
  auto m = moments.first.row(row);
  auto v = moments.second.row(row);
  m = params_.beta1 * m + (1.0 - params_.beta1) * g.transpose();
  v = params_.beta2 * v + (1.0 - params_.beta2) * g.transpose().cwiseAbs2();
  const double c1 = 1.0 - std::pow(params_.beta1, static_cast<double>(steps));
  const double c2 = 1.0 - std::pow(params_.beta2, static_cast<double>(steps));
  params.row(row).array() -=
      learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + params_.epsilon);
}

void SparseAdam::step(Store& store, const SparseGradient& grads, double learning_rate) {
  for (const auto& [row, g] : grads.entity) update(store.entity, entity_, row, g, learning_rate);
  for (const auto& [row, g] : grads.relation) update(store.relation, relation_, row, g, learning_rate);
}

void sgd_step(Store& store, const SparseGradient& grads, double learning_rate) {
  for (const auto& [row, g] : grads.entity) store.entity.row(row) -= learning_rate * g.transpose();
  for (const auto& [row, g] : grads.relation) store.relation.row(row) -= learning_rate * g.transpose();
}

void write_epoch_record(std::ostream& out, const EpochRecord& record) {
  out << std::setprecision(12) << "{\"epoch\":" << record.epoch << ",\"mean_loss\":" << record.mean_loss
      << ",\"wall_time_s\":" << record.wall_time_s << ",\"batches\":" << record.batches << "}\n";
}

double batch_loss_and_grads(const KnowledgeGraph& g, const Store& store, const Minibatch& batch,
                            const LossConfig& config, Rng& rng, SparseGradient& grads) {
  grads.clear();
  if (batch.empty()) return 0.0;
  auto negatives = make_negatives(g, batch.positives, config, rng);
  double loss = config.neighbors_loss
                    ? neighbors_loss_and_grads(g, store, batch.positives, negatives, config, rng, &grads)
                    : vanilla_loss_and_grads(store, batch.positives, negatives, config, &grads);
  const double inv = 1.0 / static_cast<double>(batch.size());
  grads.scale(inv);
  return loss * inv;
}

TrainLog train(const KnowledgeGraph& g, Store& store, const TrainConfig& config,
               const EpochCallback& on_epoch) {
  config.validate();
  if (g.train().empty()) throw std::invalid_argument("train split is empty");
  if (store.entity_count() != static_cast<Index>(g.entity_count()) ||
      store.relation_count() != static_cast<Index>(g.relation_count()))
    throw std::invalid_argument("embedding store does not match the graph dimensions");

  SamplerPolicy policy = config.sampler;
  policy.seed = config.seed;
  EpochIterator batches(g, policy);
  Rng negative_rng(config.seed ^ 0x5bd1e995ULL);
  SparseAdam adam(store, config.adam);
  SparseGradient grads;

  TrainLog log;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    double loss_sum = 0.0;
    batches.begin_epoch();
    while (auto batch = batches.next()) {
      double loss = batch_loss_and_grads(g, store, *batch, config.loss, negative_rng, grads);
      if (!std::isfinite(loss) || !grads.all_finite()) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << ", batch " << record.batches + 1
            << "; offending batch (subject relation object):\n"
            << describe_batch(*batch);
        throw NonFiniteLoss(msg.str(), batch->positives);
      }
      if (config.optimizer == OptimizerKind::Adam) adam.step(store, grads, config.learning_rate);
      else sgd_step(store, grads, config.learning_rate);
      if (config.project_entities) {
        for (const auto& [row, unused] : grads.entity) {
          const double n = store.entity.row(row).norm();
          if (n > 1.0) store.entity.row(row) /= n;
        }
      }
      loss_sum += loss;
      ++record.batches;
      ++log.steps;
    }
    record.mean_loss = record.batches ? loss_sum / static_cast<double>(record.batches) : 0.0;
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log.epochs.push_back(record);
    if (on_epoch) on_epoch(record, store);
  }
  return log;
}

double GradientVarianceReport::median_variance(std::size_t min_degree) const {
  std::vector<double> values;
  for (const auto& e : entities)
    if (e.graph_degree >= min_degree) values.push_back(e.grad_variance);
  return median(std::move(values));
}

double GradientVarianceReport::median_batches_seen(std::size_t min_degree) const {
  std::vector<double> values;
  for (const auto& e : entities)
    if (e.graph_degree >= min_degree) values.push_back(static_cast<double>(e.batches_seen));
  return median(std::move(values));
}

GradientVarianceReport gradient_variance_probe(const KnowledgeGraph& g, const Store& store,
                                               const TrainConfig& config,
                                               std::size_t num_batches) {
  SamplerPolicy policy = config.sampler;
  policy.seed = config.seed;
  auto rng = std::make_shared<Rng>(policy.seed);
  return gradient_variance_probe(g, store, config, num_batches,
                                 [&g, policy, rng]() { return sample(g, policy, *rng); });
}

GradientVarianceReport gradient_variance_probe(const KnowledgeGraph& g, const Store& store,
                                               const TrainConfig& config, std::size_t num_batches,
                                               const BatchSource& batches) {
  if (num_batches < 2) throw std::invalid_argument("variance probe needs at least 2 batches");
  struct Moments {
    std::size_t count = 0;
    Vxd mean;
    Vxd m2;
  };
  std::unordered_map<Index, Moments> moments;
  Rng negative_rng(config.seed ^ 0x5bd1e995ULL);
  SparseGradient grads;

  for (std::size_t b = 0; b < num_batches; ++b) {
    Minibatch batch = batches();
    grads.clear();
    if (batch.empty()) continue;
    auto negatives = make_negatives(g, batch.positives, config.loss, negative_rng);
    if (config.loss.neighbors_loss) {
      neighbors_loss_and_grads(g, store, batch.positives, negatives, config.loss, negative_rng, &grads);
    } else {
      vanilla_loss_and_grads(store, batch.positives, negatives, config.loss, &grads);
    }
    for (const auto& [row, grad] : grads.entity) {
      if (grad.isZero(0.0)) continue;
      const auto terms = static_cast<double>(grads.entity_terms.at(row));
      Vxd x = grad / terms;
      auto& m = moments[row];
      if (m.count == 0) {
        m.mean = Vxd::Zero(x.size());
        m.m2 = Vxd::Zero(x.size());
      }
      // Welford
      ++m.count;
      Vxd delta = x - m.mean;
      m.mean += delta / static_cast<double>(m.count);
      m.m2 += delta.cwiseProduct(x - m.mean);
    }
  }

  GradientVarianceReport report;
  report.num_batches = num_batches;
  for (const auto& [row, m] : moments) {
    if (m.count < 2) continue;
    EntityVariance e;
    e.entity = static_cast<EntityId>(row);
    e.graph_degree = degree(g, e.entity);
    e.batches_seen = m.count;
    e.grad_variance = (m.m2 / static_cast<double>(m.count - 1)).mean();
    report.entities.push_back(e);
  }
  std::sort(report.entities.begin(), report.entities.end(),
            [](const EntityVariance& a, const EntityVariance& b) { return a.entity < b.entity; });
  return report;
}

void write_variance_csv(std::ostream& out, const GradientVarianceReport& report) {
  out << "entity_id,graph_degree,batches_seen,grad_variance\n" << std::setprecision(12);
  for (const auto& e : report.entities) {
    out << e.entity << ',' << e.graph_degree << ',' << e.batches_seen << ',' << e.grad_variance << '\n';
  }
}

std::vector<VarianceStratum> stratify_by_degree(const GradientVarianceReport& report) {
  const std::size_t edges[] = {1, 2, 5, 10, 20, 0};
  std::vector<VarianceStratum> out;
  for (std::size_t i = 0; i + 1 < std::size(edges); ++i) {
    VarianceStratum s;
    s.min_degree = edges[i];
    s.max_degree = edges[i + 1];
    std::vector<double> variances;
    std::vector<double> seen;
    for (const auto& e : report.entities) {
      if (e.graph_degree < s.min_degree || (s.max_degree != 0 && e.graph_degree >= s.max_degree))
        continue;
      variances.push_back(e.grad_variance);
      seen.push_back(static_cast<double>(e.batches_seen));
    }
    s.entities = variances.size();
    s.median_variance = median(std::move(variances));
    s.median_batches_seen = median(std::move(seen));
    out.push_back(s);
  }
  return out;
}

}  // namespace kgc
