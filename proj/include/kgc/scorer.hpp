#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>

#include "kgc/graph.hpp"
#include "kgc/types.hpp"

namespace kgc {

enum class ModelKind : std::uint32_t { TransE = 0, DistMult = 1, ComplEx = 2, RotatE = 3 };

ModelKind parse_model_kind(std::string_view name);
std::string_view model_name(ModelKind kind);

/// Entity and relation embeddings, one row per id.
///
/// ComplEx and RotatE entities are length-2K rows read as K complex numbers:
/// real parts in the first half, imaginary parts in the second. ComplEx
/// relations use the same layout; RotatE relations hold K phase angles, so
/// the effective coefficient exp(i*phase) is unit-modulus for any stored value.
template <typename F>
struct EmbeddingStore {
  ModelKind model = ModelKind::TransE;
  Index dim = 0;
  Mx<F> entity;
  Mx<F> relation;

  static Index entity_width(ModelKind m, Index k) {
    return (m == ModelKind::ComplEx || m == ModelKind::RotatE) ? 2 * k : k;
  }
  static Index relation_width(ModelKind m, Index k) {
    return m == ModelKind::ComplEx ? 2 * k : k;
  }
  Index entity_width() const { return entity_width(model, dim); }
  Index relation_width() const { return relation_width(model, dim); }
  Index entity_count() const { return entity.rows(); }
  Index relation_count() const { return relation.rows(); }

  Eigen::Map<const Vx<F>> entity_row(Index e) const {
    check_entity(e);
    return {entity.row(e).data(), entity.cols()};
  }
  Eigen::Map<const Vx<F>> relation_row(Index r) const {
    check_relation(r);
    return {relation.row(r).data(), relation.cols()};
  }

  void check_entity(Index e) const {
    if (e < 0 || e >= entity.rows())
      throw std::out_of_range("entity id " + std::to_string(e) + " out of range for store");
  }
  void check_relation(Index r) const {
    if (r < 0 || r >= relation.rows())
      throw std::out_of_range("relation id " + std::to_string(r) + " out of range for store");
  }
};

using Store = EmbeddingStore<double>;

template <typename F>
struct ScoreGradient {
  Vx<F> d_subject;
  Vx<F> d_relation;
  Vx<F> d_object;
};

/// Entries i.i.d. uniform on [-6/sqrt(K), 6/sqrt(K)]; RotatE phases uniform on
/// [-pi, pi]. Deterministic in `seed`.
template <typename F>
EmbeddingStore<F> initialize(Index entity_count, Index relation_count, ModelKind model, Index dim,
                             std::uint64_t seed) {
  if (entity_count <= 0 || relation_count <= 0 || dim <= 0)
    throw std::invalid_argument("initialize: sizes must be positive");
  EmbeddingStore<F> store;
  store.model = model;
  store.dim = dim;
  store.entity.resize(entity_count, store.entity_width());
  store.relation.resize(relation_count, store.relation_width());

  std::mt19937_64 rng(seed);
  const F bound = F(6) / std::sqrt(static_cast<F>(dim));
  std::uniform_real_distribution<F> uniform(-bound, bound);
  std::uniform_real_distribution<F> phase(-std::numbers::pi_v<F>, std::numbers::pi_v<F>);
  for (Index i = 0; i < store.entity.size(); ++i) store.entity.data()[i] = uniform(rng);
  for (Index i = 0; i < store.relation.size(); ++i) {
    store.relation.data()[i] = model == ModelKind::RotatE ? phase(rng) : uniform(rng);
  }
  return store;
}

template <typename F>
F score(const EmbeddingStore<F>& store, const Triple& t) {
  const auto s = store.entity_row(t.subject);
  const auto r = store.relation_row(t.relation);
  const auto o = store.entity_row(t.object);
  const Index k = store.dim;
  switch (store.model) {
    case ModelKind::TransE:
      return -(s + r - o).norm();
    case ModelKind::DistMult:
      return (s.array() * r.array() * o.array()).sum();
    case ModelKind::ComplEx: {
      auto a = s.head(k).array(), b = s.tail(k).array();
      auto c = r.head(k).array(), d = r.tail(k).array();
      auto e = o.head(k).array(), f = o.tail(k).array();
      return ((c * a - d * b) * e + (c * b + d * a) * f).sum();
    }
    case ModelKind::RotatE: {
      auto a = s.head(k).array(), b = s.tail(k).array();
      Vx<F> cos = r.array().cos(), sin = r.array().sin();
      Vx<F> re = a * cos.array() - b * sin.array() - o.head(k).array();
      Vx<F> im = a * sin.array() + b * cos.array() - o.tail(k).array();
      return -std::sqrt(re.squaredNorm() + im.squaredNorm());
    }
  }
  return F(0);
}

/// Analytic gradient of score(store, t). At the non-differentiable point of
/// the TransE/RotatE norm the zero subgradient is returned.
template <typename F>
ScoreGradient<F> score_gradient(const EmbeddingStore<F>& store, const Triple& t) {
  const auto s = store.entity_row(t.subject);
  const auto r = store.relation_row(t.relation);
  const auto o = store.entity_row(t.object);
  const Index k = store.dim;
  ScoreGradient<F> g;
  switch (store.model) {
    case ModelKind::TransE: {
      Vx<F> diff = s + r - o;
      F n = diff.norm();
      if (n == F(0)) diff.setZero();
      else diff /= n;
      g.d_subject = -diff;
      g.d_relation = -diff;
      g.d_object = diff;
      break;
    }
    case ModelKind::DistMult:
      g.d_subject = r.cwiseProduct(o);
      g.d_relation = s.cwiseProduct(o);
      g.d_object = s.cwiseProduct(r);
      break;
    case ModelKind::ComplEx: {
      auto a = s.head(k).array(), b = s.tail(k).array();
      auto c = r.head(k).array(), d = r.tail(k).array();
      auto e = o.head(k).array(), f = o.tail(k).array();
      g.d_subject.resize(2 * k);
      g.d_relation.resize(2 * k);
      g.d_object.resize(2 * k);
      g.d_subject.head(k) = c * e + d * f;
      g.d_subject.tail(k) = c * f - d * e;
      g.d_relation.head(k) = a * e + b * f;
      g.d_relation.tail(k) = a * f - b * e;
      g.d_object.head(k) = c * a - d * b;
      g.d_object.tail(k) = c * b + d * a;
      break;
    }
    case ModelKind::RotatE: {
      auto a = s.head(k).array(), b = s.tail(k).array();
      Vx<F> cos = r.array().cos(), sin = r.array().sin();
      Vx<F> re = a * cos.array() - b * sin.array() - o.head(k).array();
      Vx<F> im = a * sin.array() + b * cos.array() - o.tail(k).array();
      F n = std::sqrt(re.squaredNorm() + im.squaredNorm());
      g.d_subject.resize(2 * k);
      g.d_object.resize(2 * k);
      if (n == F(0)) {
        g.d_subject.setZero();
        g.d_object.setZero();
        g.d_relation = Vx<F>::Zero(k);
        break;
      }
      re /= n;
      im /= n;
      g.d_subject.head(k) = -(re.array() * cos.array() + im.array() * sin.array());
      g.d_subject.tail(k) = -(im.array() * cos.array() - re.array() * sin.array());
      g.d_object.head(k) = re;
      g.d_object.tail(k) = im;
      // d(re)/d(phase) = -(a sin + b cos), d(im)/d(phase) = a cos - b sin
      g.d_relation = re.array() * (a * sin.array() + b * cos.array()) -
                     im.array() * (a * cos.array() - b * sin.array());
      break;
    }
  }
  return g;
}

/// score(store, (s, r, o)) for every entity o, sharing the (s, r) part.
template <typename F>
Vx<F> score_against_all_objects(const EmbeddingStore<F>& store, Index s, Index r) {
  const auto es = store.entity_row(s);
  const auto wr = store.relation_row(r);
  const Index k = store.dim;
  const auto& E = store.entity;
  switch (store.model) {
    case ModelKind::TransE: {
      Vx<F> q = es + wr;
      return -(E.rowwise() - q.transpose()).rowwise().norm();
    }
    case ModelKind::DistMult:
      return E * es.cwiseProduct(wr);
    case ModelKind::ComplEx: {
      auto a = es.head(k).array(), b = es.tail(k).array();
      auto c = wr.head(k).array(), d = wr.tail(k).array();
      Vx<F> x = c * a - d * b;
      Vx<F> y = c * b + d * a;
      return E.leftCols(k) * x + E.rightCols(k) * y;
    }
    case ModelKind::RotatE: {
      auto a = es.head(k).array(), b = es.tail(k).array();
      Vx<F> cos = wr.array().cos(), sin = wr.array().sin();
      Vx<F> q(2 * k);
      q.head(k) = a * cos.array() - b * sin.array();
      q.tail(k) = a * sin.array() + b * cos.array();
      return -(E.rowwise() - q.transpose()).rowwise().norm();
    }
  }
  return {};
}

/// score(store, (s, r, o)) for every entity s.
template <typename F>
Vx<F> score_against_all_subjects(const EmbeddingStore<F>& store, Index r, Index o) {
  const auto wr = store.relation_row(r);
  const auto eo = store.entity_row(o);
  const Index k = store.dim;
  const auto& E = store.entity;
  switch (store.model) {
    case ModelKind::TransE: {
      Vx<F> q = eo - wr;
      return -(E.rowwise() - q.transpose()).rowwise().norm();
    }
    case ModelKind::DistMult:
      return E * wr.cwiseProduct(eo);
    case ModelKind::ComplEx: {
      // Re(s * u) with u = w * conj(o).
      auto c = wr.head(k).array(), d = wr.tail(k).array();
      auto e = eo.head(k).array(), f = eo.tail(k).array();
      Vx<F> u_re = c * e + d * f;
      Vx<F> u_im = d * e - c * f;
      return E.leftCols(k) * u_re - E.rightCols(k) * u_im;
    }
    case ModelKind::RotatE: {
      // |s*w - o| = |s - o*conj(w)| because |w| = 1.
      auto e = eo.head(k).array(), f = eo.tail(k).array();
      Vx<F> cos = wr.array().cos(), sin = wr.array().sin();
      Vx<F> q(2 * k);
      q.head(k) = e * cos.array() + f * sin.array();
      q.tail(k) = f * cos.array() - e * sin.array();
      return -(E.rowwise() - q.transpose()).rowwise().norm();
    }
  }
  return {};
}

}  // namespace kgc
