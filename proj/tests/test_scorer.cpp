#include <gtest/gtest.h>

#include <algorithm>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "kgc/checkpoint.hpp"
#include "kgc/scorer.hpp"
#include "oracles.hpp"

using namespace kgc;

namespace {

Store make(ModelKind model, Index dim, Index entities, Index relations) {
  Store s;
  s.model = model;
  s.dim = dim;
  s.entity = Mxd::Zero(entities, s.entity_width());
  s.relation = Mxd::Zero(relations, s.relation_width());
  return s;
}

const ModelKind kModels[] = {ModelKind::TransE, ModelKind::DistMult, ModelKind::ComplEx,
                             ModelKind::RotatE};

}  // namespace

TEST(Score, TransEExactTranslationIsZero) {
  auto s = make(ModelKind::TransE, 2, 2, 1);
  s.relation.row(0) << 1, 1;
  s.entity.row(1) << 1, 1;
  EXPECT_DOUBLE_EQ(score(s, {0, 0, 1}), 0.0);
  auto g = score_gradient(s, {0, 0, 1});
  EXPECT_EQ(g.d_subject.norm(), 0.0);
  EXPECT_EQ(g.d_relation.norm(), 0.0);
  EXPECT_EQ(g.d_object.norm(), 0.0);
}

TEST(Score, DistMultBilinearForm) {
  auto s = make(ModelKind::DistMult, 2, 2, 1);
  s.entity.row(0) << 1, 2;
  s.relation.row(0) << 3, 4;
  s.entity.row(1) << 5, 6;
  EXPECT_DOUBLE_EQ(score(s, {0, 0, 1}), 63.0);
  auto g = score_gradient(s, {0, 0, 1});
  EXPECT_DOUBLE_EQ(g.d_subject[0], 15.0);
  EXPECT_DOUBLE_EQ(g.d_subject[1], 24.0);
}

TEST(Score, RotatEQuarterTurn) {
  auto s = make(ModelKind::RotatE, 1, 2, 1);
  s.entity.row(0) << 1, 0;  // 1 + 0i
  s.relation(0, 0) = std::numbers::pi / 2;
  s.entity.row(1) << 0, 1;  // 0 + 1i
  EXPECT_NEAR(score(s, {0, 0, 1}), 0.0, 1e-15);
}

TEST(Score, ComplExUnitValues) {
  auto s = make(ModelKind::ComplEx, 1, 2, 1);
  s.entity.row(0) << 1, 0;
  s.entity.row(1) << 1, 0;
  s.relation.row(0) << 1, 0;
  EXPECT_DOUBLE_EQ(score(s, {0, 0, 1}), 1.0);
}

TEST(Score, ComplExIsAsymmetricWithImaginaryRelation) {
  auto s = make(ModelKind::ComplEx, 1, 2, 1);
  s.entity.row(0) << 1, 0;  // 1
  s.entity.row(1) << 0, 1;  // i
  s.relation.row(0) << 0, 1;  // i
  // Re(i * 1 * conj(i)) = Re(1) = 1, while Re(i * i * conj(1)) = -1
  EXPECT_DOUBLE_EQ(score(s, {0, 0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(score(s, {1, 0, 0}), -1.0);
}

TEST(Score, OutOfRangeIdsThrow) {
  auto s = initialize<double>(3, 2, ModelKind::DistMult, 4, 1);
  EXPECT_THROW(score(s, {3, 0, 0}), std::out_of_range);
  EXPECT_THROW(score(s, {0, 2, 0}), std::out_of_range);
  EXPECT_THROW(score_against_all_objects(s, 0, 5), std::out_of_range);
}

TEST(Score, DistMultIsSymmetric) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    auto s = initialize<double>(5, 2, ModelKind::DistMult, 8, rng());
    Triple t{static_cast<EntityId>(rng() % 5), static_cast<RelationId>(rng() % 2),
             static_cast<EntityId>(rng() % 5)};
    const double forward = score(s, t);
    EXPECT_NEAR(forward, score(s, {t.object, t.relation, t.subject}), 1e-14 * std::max(1.0, std::abs(forward)));
  }
}

TEST(Score, DistanceModelsAreNonPositive) {
  std::mt19937_64 rng(2);
  for (auto model : {ModelKind::TransE, ModelKind::RotatE}) {
    for (int i = 0; i < 100; ++i) {
      auto s = initialize<double>(5, 2, model, 6, rng());
      Triple t{static_cast<EntityId>(rng() % 5), static_cast<RelationId>(rng() % 2),
               static_cast<EntityId>(rng() % 5)};
      EXPECT_LE(score(s, t), 0.0);
    }
  }
}

TEST(Score, RotatEZeroIffExactRotation) {
  std::mt19937_64 rng(3);
  auto s = initialize<double>(2, 1, ModelKind::RotatE, 5, rng());
  const Index K = 5;
  for (Index k = 0; k < K; ++k) {
    const double re = s.entity(0, k), im = s.entity(0, K + k), th = s.relation(0, k);
    s.entity(1, k) = re * std::cos(th) - im * std::sin(th);
    s.entity(1, K + k) = re * std::sin(th) + im * std::cos(th);
  }
  EXPECT_NEAR(score(s, {0, 0, 1}), 0.0, 1e-12);
  s.entity(1, 0) += 0.1;
  EXPECT_LT(score(s, {0, 0, 1}), 0.0);
}

TEST(Score, RotatEPhaseHasUnitModulus) {
  // the rotation preserves the subject's modulus whatever the stored phase
  auto s = make(ModelKind::RotatE, 3, 2, 1);
  s.entity.row(0) << 0.3, -1.2, 2.0, 0.4, 0.5, -0.7;
  for (double phase : {0.0, 1.0, -7.5, 1e3, 123456.789}) {
    s.relation.row(0).setConstant(phase);
    // score against the zero vector is minus the norm of the rotated subject
    EXPECT_NEAR(score(s, {0, 0, 1}), -s.entity.row(0).norm(), 1e-12);
    EXPECT_NEAR(std::hypot(std::cos(phase), std::sin(phase)), 1.0, 1e-12);
  }
}

TEST(ScoreGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  for (auto model : kModels) {
    for (Index K : {2, 8, 50}) {
      for (int trial = 0; trial < 20; ++trial) {
        auto s = initialize<double>(3, 2, model, K, rng());
        Triple t{0, static_cast<RelationId>(rng() % 2), static_cast<EntityId>(1 + rng() % 2)};
        auto g = score_gradient(s, t);
        auto f = [&] { return score(s, t); };
        EXPECT_LT(oracle::relative_error(
                      g.d_subject, oracle::central_difference(f, &s.entity(t.subject, 0), s.entity_width())),
                  1e-6);
        EXPECT_LT(oracle::relative_error(g.d_relation, oracle::central_difference(
                                                           f, &s.relation(t.relation, 0), s.relation_width())),
                  1e-6);
        EXPECT_LT(oracle::relative_error(
                      g.d_object, oracle::central_difference(f, &s.entity(t.object, 0), s.entity_width())),
                  1e-6);
      }
    }
  }
}

TEST(ScoreAgainstAll, ObjectsAndSubjectsMatchPerTripleScores) {
  for (auto model : kModels) {
    auto s = initialize<double>(300, 3, model, 12, 17);
    for (EntityId a : {0u, 7u, 299u}) {
      for (RelationId r = 0; r < 3; ++r) {
        auto objects = score_against_all_objects(s, a, r);
        auto subjects = score_against_all_subjects(s, r, a);
        ASSERT_EQ(objects.size(), 300);
        for (EntityId e = 0; e < 300; ++e) {
          EXPECT_NEAR(objects[e], score(s, {a, r, e}), 1e-12);
          EXPECT_NEAR(subjects[e], score(s, {e, r, a}), 1e-12);
        }
      }
    }
  }
}

TEST(ScoreAgainstAll, DistMultZeroProductGivesZeros) {
  auto s = initialize<double>(4, 1, ModelKind::DistMult, 3, 1);
  s.relation.setZero();
  EXPECT_EQ(score_against_all_objects(s, 0, 0).norm(), 0.0);
}

TEST(Initialize, ShapesBoundsAndDeterminism) {
  for (auto model : kModels) {
    auto a = initialize<double>(50, 4, model, 16, 42);
    auto b = initialize<double>(50, 4, model, 16, 42);
    EXPECT_EQ(a.entity, b.entity);
    EXPECT_EQ(a.relation, b.relation);
    const Index width = (model == ModelKind::ComplEx || model == ModelKind::RotatE) ? 32 : 16;
    EXPECT_EQ(a.entity.cols(), width);
    EXPECT_EQ(a.relation.cols(), model == ModelKind::ComplEx ? 32 : 16);
    const double bound = 6.0 / std::sqrt(16.0);
    EXPECT_LE(a.entity.cwiseAbs().maxCoeff(), bound);
    const double rel_bound = model == ModelKind::RotatE ? std::numbers::pi : bound;
    EXPECT_LE(a.relation.cwiseAbs().maxCoeff(), rel_bound);
    EXPECT_TRUE(a.entity.allFinite());
  }
}

TEST(Initialize, DifferentSeedsDifferAlmostEverywhere) {
  auto a = initialize<double>(100, 5, ModelKind::TransE, 20, 1);
  auto b = initialize<double>(100, 5, ModelKind::TransE, 20, 2);
  const auto differ = (a.entity.array() != b.entity.array()).count();
  EXPECT_GE(static_cast<double>(differ), 0.99 * static_cast<double>(a.entity.size()));
}

TEST(Initialize, RejectsNonPositiveSizes) {
  EXPECT_THROW(initialize<double>(0, 1, ModelKind::TransE, 4, 0), std::invalid_argument);
  EXPECT_THROW(initialize<double>(1, 1, ModelKind::TransE, 0, 0), std::invalid_argument);
}

TEST(Checkpoint, RoundTripIsExact) {
  fixtures::TempDir dir;
  for (auto model : kModels) {
    auto s = initialize<double>(7, 3, model, 5, 9);
    save_checkpoint(s, dir / "m.ckpt");
    auto back = load_checkpoint(dir / "m.ckpt");
    EXPECT_EQ(back.model, model);
    EXPECT_EQ(back.dim, 5);
    EXPECT_EQ(back.entity, s.entity);
    EXPECT_EQ(back.relation, s.relation);
  }
}

TEST(Checkpoint, RejectsGarbageAndTruncation) {
  fixtures::TempDir dir;
  dir.write("bad.ckpt", "not a checkpoint at all");
  EXPECT_THROW(load_checkpoint(dir / "bad.ckpt"), DataError);
  auto s = initialize<double>(7, 3, ModelKind::TransE, 5, 9);
  save_checkpoint(s, dir / "m.ckpt");
  std::filesystem::resize_file(dir / "m.ckpt", std::filesystem::file_size(dir / "m.ckpt") - 8);
  EXPECT_THROW(load_checkpoint(dir / "m.ckpt"), DataError);
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), DataError);
}
