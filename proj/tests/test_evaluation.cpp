#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kgc/evaluation.hpp"
#include "kgc/synthetic.hpp"
#include "oracles.hpp"

using namespace kgc;

TEST(RankOf, CountsExceedersAndFilters) {
  Vxd scores(5);
  scores << 3.0, 4.0, 2.0, 1.0, 0.5;
  EXPECT_EQ(rank_of(scores, 0), 2u);
  std::vector<EntityId> filtered{1};
  EXPECT_EQ(rank_of(scores, 0, filtered), 1u);
  EXPECT_EQ(rank_of(scores, 1), 1u);
}

TEST(RankOf, TiesCountAgainstTheTarget) {
  Vxd scores = Vxd::Constant(6, 0.25);
  EXPECT_EQ(rank_of(scores, 2), 6u);
}

TEST(RankOf, TargetInExclusionListIsIgnored) {
  Vxd scores(3);
  scores << 1.0, 2.0, 3.0;
  std::vector<EntityId> excluded{0, 2};
  EXPECT_EQ(rank_of(scores, 0, excluded), 2u);
}

TEST(RankOf, InvariantToConstantShift) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    Vxd s = Vxd::Random(40);
    const auto target = static_cast<EntityId>(rng() % 40);
    EXPECT_EQ(rank_of(s, target), rank_of((s.array() + 17.0).matrix(), target));
  }
}

TEST(EvaluateSplit, PerfectModelScoresOne) {
  // one-hot TransE embeddings with relations translating exactly
  std::vector<Triple> test{{0, 0, 1}, {2, 1, 3}};
  KnowledgeGraph g(4, 2, {{1, 0, 2}}, {}, test);
  Store s;
  s.model = ModelKind::TransE;
  s.dim = 4;
  s.entity = Mxd::Identity(4, 4);
  s.relation.resize(2, 4);
  s.relation.row(0) = s.entity.row(1) - s.entity.row(0);
  s.relation.row(1) = s.entity.row(3) - s.entity.row(2);
  for (auto protocol : {Protocol::Raw, Protocol::Filtered}) {
    auto m = evaluate_split(g, s, Split::Test, protocol);
    EXPECT_DOUBLE_EQ(m.mrr, 1.0);
    EXPECT_DOUBLE_EQ(m.mr, 1.0);
    EXPECT_DOUBLE_EQ(m.hits1, 1.0);
    EXPECT_DOUBLE_EQ(m.hits10, 1.0);
    EXPECT_EQ(m.count, 4u);
  }
}

TEST(EvaluateSplit, MatchesBruteForceOracle) {
  auto g = oracle::random_graph(50, 3, 250, 30, 30, 4);
  for (auto model : {ModelKind::TransE, ModelKind::DistMult, ModelKind::ComplEx, ModelKind::RotatE}) {
    auto s = initialize<double>(50, 3, model, 10, 8);
    for (auto protocol : {Protocol::Raw, Protocol::Filtered}) {
      for (const auto& t : g.test()) {
        auto r = rank_triple(g, s, t, protocol);
        const bool f = protocol == Protocol::Filtered;
        ASSERT_EQ(r.tail_rank, oracle::rank(g, s, t, true, f));
        ASSERT_EQ(r.head_rank, oracle::rank(g, s, t, false, f));
      }
    }
  }
}

TEST(EvaluateSplit, FilteredNeverWorseThanRaw) {
  auto g = planted_toy_graph(60, 0.2, 3);
  auto s = initialize<double>(60, 3, ModelKind::RotatE, 8, 2);
  for (const auto& t : g.test()) {
    auto raw = rank_triple(g, s, t, Protocol::Raw);
    auto filt = rank_triple(g, s, t, Protocol::Filtered);
    EXPECT_LE(filt.head_rank, raw.head_rank);
    EXPECT_LE(filt.tail_rank, raw.tail_rank);
    EXPECT_GE(filt.tail_rank, 1u);
    EXPECT_LE(raw.tail_rank, g.entity_count());
  }
  auto mr = evaluate_split(g, s, Split::Test, Protocol::Raw);
  auto mf = evaluate_split(g, s, Split::Test, Protocol::Filtered);
  EXPECT_GE(mf.mrr, mr.mrr);
}

TEST(EvaluateSplit, InvariantToQueryOrder) {
  auto g = oracle::random_graph(80, 2, 300, 0, 60, 5);
  auto s = initialize<double>(80, 2, ModelKind::ComplEx, 6, 1);
  auto a = evaluate_split(g, s, Split::Test, Protocol::Filtered);
  auto shuffled = g.test();
  std::mt19937_64 rng(2);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto b = evaluate_triples(g, s, shuffled, Protocol::Filtered);
  EXPECT_NEAR(a.mrr, b.mrr, 1e-12);
  EXPECT_NEAR(a.mr, b.mr, 1e-9);
  EXPECT_EQ(a.hits10, b.hits10);
}

TEST(EvaluateSplit, RandomEmbeddingsNearHarmonicBaseline) {
  const std::size_t n = 1000;
  auto g = oracle::random_graph(n, 5, 3000, 0, 600, 6);
  auto s = initialize<double>(n, 5, ModelKind::DistMult, 16, 7);
  std::vector<double> reciprocal;
  for (const auto& t : g.test()) {
    auto r = rank_triple(g, s, t, Protocol::Raw);
    reciprocal.push_back(1.0 / static_cast<double>(r.head_rank));
    reciprocal.push_back(1.0 / static_cast<double>(r.tail_rank));
  }
  double mean = 0.0;
  for (double x : reciprocal) mean += x;
  mean /= static_cast<double>(reciprocal.size());
  double ss = 0.0;
  for (double x : reciprocal) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / static_cast<double>(reciprocal.size() - 1) /
                              static_cast<double>(reciprocal.size()));
  EXPECT_NEAR(mean, random_baseline_mrr(n), 3.0 * se);
  EXPECT_NEAR(random_baseline_mrr(n), (std::log(1000.0) + 0.5772) / 1000.0, 1e-4);
}

TEST(Metrics, FromRanks) {
  std::vector<std::size_t> ranks{1, 2, 4, 20};
  auto m = metrics_from_ranks(ranks, Protocol::Raw);
  EXPECT_DOUBLE_EQ(m.mrr, (1.0 + 0.5 + 0.25 + 0.05) / 4.0);
  EXPECT_DOUBLE_EQ(m.mr, 27.0 / 4.0);
  EXPECT_DOUBLE_EQ(m.hits1, 0.25);
  EXPECT_DOUBLE_EQ(m.hits3, 0.5);
  EXPECT_DOUBLE_EQ(m.hits10, 0.75);
  EXPECT_LE(m.hits1, m.mrr);
}

TEST(Metrics, RecordAndCsv) {
  Metrics m;
  m.mrr = 0.5;
  m.mr = 3.0;
  m.hits1 = 0.25;
  m.hits3 = 0.5;
  m.hits10 = 1.0;
  m.count = 8;
  m.protocol = Protocol::Filtered;
  std::ostringstream rec, csv;
  write_metrics_record(rec, m);
  EXPECT_EQ(rec.str(),
            "{\"mrr\":0.5,\"mr\":3,\"hits1\":0.25,\"hits3\":0.5,\"hits10\":1,\"count\":8,"
            "\"protocol\":\"filtered\"}\n");
  write_metrics_csv(csv, std::span<const Metrics>(&m, 1));
  EXPECT_EQ(csv.str(), "mrr,mr,hits1,hits3,hits10,count,protocol\n0.5,3,0.25,0.5,1,8,filtered\n");
}

TEST(Metrics, EmptySplitRejected) {
  KnowledgeGraph g(3, 1, {{0, 0, 1}});
  auto s = initialize<double>(3, 1, ModelKind::TransE, 2, 1);
  EXPECT_THROW(evaluate_split(g, s, Split::Test, Protocol::Raw), std::invalid_argument);
  EXPECT_THROW(parse_protocol("strict"), std::invalid_argument);
}

TEST(RandomBaseline, SmallCases) {
  EXPECT_DOUBLE_EQ(random_baseline_mrr(1), 1.0);
  EXPECT_DOUBLE_EQ(random_baseline_mrr(2), 0.75);
}
