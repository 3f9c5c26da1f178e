#include "kgc/loss.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace kgc {

namespace {

std::atomic<bool> warned_short_negatives{false};

void add_row(std::unordered_map<Index, Vxd>& rows, Index id, const Vxd& g, double scale) {
  auto [it, inserted] = rows.try_emplace(id);
  if (inserted) it->second = scale * g;
  else it->second += scale * g;
}

}  // namespace

void LossConfig::validate() const {
  if (negatives_per_positive == 0) throw std::invalid_argument("negatives_per_positive must be >= 1");
  if (!std::isfinite(margin)) throw std::invalid_argument("margin must be finite");
  if (adversarial_temperature < 0.0)
    throw std::invalid_argument("adversarial_temperature must be >= 0");
}

double default_margin(ModelKind model) {
  return (model == ModelKind::TransE || model == ModelKind::RotatE) ? -6.0 : 0.0;
}

std::vector<Negative> corrupt(const KnowledgeGraph& g, const Triple& t, std::size_t n,
                              bool filtered, Rng& rng, std::size_t max_retries) {
  const auto entities = g.entity_count();
  if (entities < 2) throw std::invalid_argument("corrupt requires at least 2 entities");
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<EntityId> other(0, static_cast<EntityId>(entities - 2));

  std::vector<Negative> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
      Negative neg{t, coin(rng) ? CorruptedSlot::Head : CorruptedSlot::Tail};
      EntityId& slot = neg.slot == CorruptedSlot::Head ? neg.triple.subject : neg.triple.object;
      EntityId e = other(rng);
      if (e >= slot) ++e;
      slot = e;
      if (!filtered || !g.contains(neg.triple)) {
        out.push_back(neg);
        break;
      }
    }
  }
  if (out.size() < n && !warned_short_negatives.exchange(true)) {
    std::clog << "warning: filtered corruption exhausted retries; returning " << out.size()
              << " of " << n << " negatives\n";
  }
  return out;
}

std::vector<std::vector<Negative>> make_negatives(const KnowledgeGraph& g,
                                                  std::span<const Triple> positives,
                                                  const LossConfig& config, Rng& rng) {
  std::vector<std::vector<Negative>> out;
  out.reserve(positives.size());
  for (const auto& t : positives) {
    out.push_back(corrupt(g, t, config.negatives_per_positive, config.filtered_negatives, rng,
                          config.max_corruption_retries));
  }
  return out;
}

double log_sigmoid(double x) {
  return x < 0.0 ? x - std::log1p(std::exp(x)) : -std::log1p(std::exp(-x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

Vxd adversarial_weights(const Vxd& scores, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("adversarial temperature must be >= 0");
  const auto n = scores.size();
  if (n == 0) return {};
  if (alpha == 0.0) return Vxd::Constant(n, 1.0 / static_cast<double>(n));
  Vxd z = alpha * scores;
  Vxd w = (z.array() - z.maxCoeff()).exp();
  return w / w.sum();
}

void SparseGradient::add_entity(Index id, const Vxd& g, double scale) { add_row(entity, id, g, scale); }
void SparseGradient::add_relation(Index id, const Vxd& g, double scale) {
  add_row(relation, id, g, scale);
}

void SparseGradient::scale(double factor) {
  for (auto& [id, g] : entity) g *= factor;
  for (auto& [id, g] : relation) g *= factor;
}

bool SparseGradient::all_finite() const {
  for (const auto& [id, g] : entity)
    if (!g.allFinite()) return false;
  for (const auto& [id, g] : relation)
    if (!g.allFinite()) return false;
  return true;
}

void SparseGradient::clear() {
  entity.clear();
  relation.clear();
  entity_terms.clear();
}

double softmargin_term(const Store& store, const Triple& t, std::span<const Triple> negatives,
                       std::span<const double> weights, double margin, SparseGradient* grads,
                       double scale) {
  if (negatives.empty()) throw std::invalid_argument("soft-margin term needs at least one negative");
  if (weights.size() != negatives.size())
    throw std::invalid_argument("one weight per negative required");

  const double phi = score(store, t);
  double loss = -0.5 * log_sigmoid(phi - margin);
  std::vector<double> phi_neg(negatives.size());
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    phi_neg[j] = score(store, negatives[j]);
    loss -= 0.5 * weights[j] * log_sigmoid(margin - phi_neg[j]);
  }
  if (grads == nullptr) return loss;

  auto push = [&](const Triple& x, double dloss_dphi) {
    auto g = score_gradient(store, x);
    grads->add_entity(x.subject, g.d_subject, scale * dloss_dphi);
    grads->add_relation(x.relation, g.d_relation, scale * dloss_dphi);
    grads->add_entity(x.object, g.d_object, scale * dloss_dphi);
  };
  push(t, -0.5 * sigmoid(margin - phi));
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    push(negatives[j], 0.5 * weights[j] * sigmoid(phi_neg[j] - margin));
  }

  std::vector<Index> touched{t.subject, t.object};
  for (const auto& n : negatives) {
    touched.push_back(n.subject);
    touched.push_back(n.object);
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (Index e : touched) ++grads->entity_terms[e];
  return loss;
}

double softmargin_loss_and_grads(const Store& store, const Triple& t,
                                 std::span<const Negative> negatives, const LossConfig& config,
                                 SparseGradient* grads, double scale) {
  std::vector<Triple> triples;
  triples.reserve(negatives.size());
  for (const auto& n : negatives) triples.push_back(n.triple);
  Vxd scores(static_cast<Index>(triples.size()));
  if (config.adversarial_temperature > 0.0) {
    for (std::size_t j = 0; j < triples.size(); ++j)
      scores[static_cast<Index>(j)] = score(store, triples[j]);
  }
  Vxd w = adversarial_weights(scores, config.adversarial_temperature);
  return softmargin_term(store, t, triples, std::span<const double>(w.data(), triples.size()),
                         config.margin, grads, scale);
}

double vanilla_loss_and_grads(const Store& store, std::span<const Triple> positives,
                              std::span<const std::vector<Negative>> negatives,
                              const LossConfig& config, SparseGradient* grads) {
  if (negatives.size() != positives.size())
    throw std::invalid_argument("one negative list per positive required");
  double loss = 0.0;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    if (negatives[i].empty()) continue;
    loss += softmargin_loss_and_grads(store, positives[i], negatives[i], config, grads);
  }
  return loss;
}

std::vector<Index> capped_neighbors(const KnowledgeGraph& g, const Triple& t,
                                    std::optional<std::size_t> cap, Rng& rng) {
  auto neighbors = neighbor_triple_indices(g, t);
  if (cap && neighbors.size() > *cap) {
    for (std::size_t k = 0; k < *cap; ++k) {
      auto j = k + std::uniform_int_distribution<std::size_t>(0, neighbors.size() - k - 1)(rng);
      std::swap(neighbors[k], neighbors[j]);
    }
    neighbors.resize(*cap);
  }
  return neighbors;
}

double neighbors_loss_and_grads(const KnowledgeGraph& g, const Store& store,
                                std::span<const Triple> positives,
                                std::span<const std::vector<Negative>> negatives,
                                const LossConfig& config, Rng& rng, SparseGradient* grads) {
  if (negatives.size() != positives.size())
    throw std::invalid_argument("one negative list per positive required");
  double loss = 0.0;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    const auto& t = positives[i];
    auto neighbors = capped_neighbors(g, t, config.neighbor_cap, rng);
    const std::size_t count =
        config.normalize_by_precap ? neighbor_triple_indices(g, t).size() : neighbors.size();
    const double norm = 1.0 / (1.0 + static_cast<double>(count));

    double bracket = negatives[i].empty()
                         ? 0.0
                         : softmargin_loss_and_grads(store, t, negatives[i], config, grads, norm);
    for (Index idx : neighbors) {
      const auto& n = g.train()[static_cast<std::size_t>(idx)];
      auto n_negatives = corrupt(g, n, config.negatives_per_positive, config.filtered_negatives,
                                 rng, config.max_corruption_retries);
      if (n_negatives.empty()) continue;
      bracket += softmargin_loss_and_grads(store, n, n_negatives, config, grads, norm);
    }
    loss += norm * bracket;
  }
  return loss;
}

double neighbors_loss_and_grads(const KnowledgeGraph& g, const Store& store, const Minibatch& m,
                                const LossConfig& config, Rng& rng, SparseGradient* grads) {
  auto negatives = make_negatives(g, m.positives, config, rng);
  return neighbors_loss_and_grads(g, store, m.positives, negatives, config, rng, grads);
}

}  // namespace kgc
