#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "kgc/sampler.hpp"
#include "kgc/synthetic.hpp"
#include "oracles.hpp"

using namespace kgc;

namespace {

SamplerPolicy policy(SamplerKind kind, std::size_t b) {
  SamplerPolicy p;
  p.kind = kind;
  p.batch_size = b;
  return p;
}

std::set<Triple> as_set(const std::vector<Triple>& v) { return {v.begin(), v.end()}; }

const SamplerKind kAllKinds[] = {SamplerKind::SR, SamplerKind::RW, SamplerKind::RWR,
                                 SamplerKind::RWISG, SamplerKind::RWISG_N};

// Weak connectivity of the triples' endpoint graph.
bool connected(const std::vector<Triple>& triples) {
  if (triples.empty()) return true;
  std::set<EntityId> reached{triples.front().subject};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& t : triples) {
      bool s = reached.count(t.subject), o = reached.count(t.object);
      if (s != o) {
        reached.insert(t.subject);
        reached.insert(t.object);
        grew = true;
      }
    }
  }
  for (const auto& t : triples)
    if (!reached.count(t.subject)) return false;
  return true;
}

}  // namespace

TEST(SampleSR, FullBatchIsTheTrainSplit) {
  auto g = power_law_graph(50, 2, 120, 0.5, 1);
  Rng rng(0);
  auto m = sample_sr(g, policy(SamplerKind::SR, 120), rng);
  EXPECT_EQ(as_set(m.positives), as_set(g.train()));
}

TEST(SampleSR, DistinctTriplesFromTheGraph) {
  auto g = power_law_graph(20, 2, 10, 0.5, 1);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    auto m = sample_sr(g, policy(SamplerKind::SR, 3), rng);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(as_set(m.positives).size(), 3u);
    for (const auto& t : m.positives) EXPECT_TRUE(g.in_train(t));
  }
}

TEST(SampleSR, OversizedBatchIsClamped) {
  auto g = fixtures::chain();
  Rng rng(0);
  auto m = sample_sr(g, policy(SamplerKind::SR, 10), rng);
  EXPECT_EQ(m.size(), 3u);
}

TEST(SampleRW, PathFromEndStartsAtTheEndAndCoversEveryEdge) {
  auto g = fixtures::path(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    auto m = sample_rw(g, policy(SamplerKind::RW, 4), rng, EntityId{0});
    ASSERT_EQ(m.size(), 4u);
    EXPECT_EQ(m.positives.front(), g.train().front());
    EXPECT_EQ(as_set(m.positives), as_set(g.train()));
  }
}

TEST(SampleRW, SingleTripleBatch) {
  auto g = fixtures::star(6);
  Rng rng(2);
  auto m = sample_rw(g, policy(SamplerKind::RW, 1), rng);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_TRUE(g.in_train(m.positives.front()));
}

TEST(SampleRW, StalledWalkRestartsToReachBatchSize) {
  // two disconnected edges; a walk started on one must restart to get both
  KnowledgeGraph g(4, 1, {{0, 0, 1}, {2, 0, 3}});
  Rng rng(1);
  auto m = sample_rw(g, policy(SamplerKind::RW, 2), rng, EntityId{0});
  EXPECT_EQ(as_set(m.positives), as_set(g.train()));
}

TEST(SampleRW, BatchesAreConnectedWhenNoVertexCanStall) {
  // every vertex has more incident triples than the batch holds, so the walk
  // never exhausts a vertex and never jumps
  std::vector<Triple> t;
  for (EntityId a = 0; a < 8; ++a)
    for (EntityId b = 0; b < 8; ++b)
      if (a != b) t.push_back({a, 0, b});
  KnowledgeGraph g(8, 1, std::move(t));
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    auto m = sample_rw(g, policy(SamplerKind::RW, 6), rng);
    EXPECT_TRUE(connected(m.positives));
  }
}

TEST(SampleRWR, ZeroRestartMatchesRW) {
  auto g = power_law_graph(200, 3, 800, 0.8, 3);
  auto p = policy(SamplerKind::RWR, 64);
  p.restart_probability = 0.0;
  Rng a(77), b(77);
  for (int i = 0; i < 20; ++i)
    EXPECT_EQ(sample_rwr(g, p, a).positives, sample_rw(g, policy(SamplerKind::RW, 64), b).positives);
}

TEST(SampleRWR, CertainRestartBuildsStarAroundStart) {
  auto g = fixtures::star(6);
  auto p = policy(SamplerKind::RWR, 4);
  p.restart_probability = 1.0;
  Rng rng(4);
  auto m = sample_rwr(g, p, rng, EntityId{0});
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(as_set(m.positives).size(), 4u);
  for (const auto& t : m.positives) EXPECT_EQ(t.subject, 0u);
}

TEST(SampleRWR, CertainRestartOnGeneralGraphStaysIncidentToStart) {
  auto g = power_law_graph(100, 2, 600, 0.5, 6);
  auto p = policy(SamplerKind::RWR, 3);
  p.restart_probability = 1.0;
  Rng rng(10);
  for (EntityId start = 0; start < 100; ++start) {
    if (g.incident(start).size() < 3) continue;
    auto m = sample_rwr(g, p, rng, start);
    for (const auto& t : m.positives) EXPECT_TRUE(t.subject == start || t.object == start);
  }
}

TEST(SampleRWISG, TreeAddsNoClosureEdges) {
  auto g = fixtures::path(10);
  Rng a(3), b(3);
  auto rw = sample_rw(g, policy(SamplerKind::RW, 5), a, EntityId{4});
  auto isg = sample_rwisg(g, policy(SamplerKind::RWISG, 5), b, EntityId{4});
  EXPECT_EQ(as_set(rw.positives), as_set(isg.positives));
}

TEST(SampleRWISG, TriangleClosure) {
  auto g = fixtures::triangle();
  // from vertex 1 the two-triple walk always visits all three vertices
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    auto m = sample_rwisg(g, policy(SamplerKind::RWISG, 2), rng, EntityId{1});
    EXPECT_EQ(m.size(), 3u);
  }
}

TEST(SampleRWISG, BatchIsClosedUnderInduction) {
  auto g = power_law_graph(300, 4, 2000, 0.8, 12);
  Rng rng(1);
  for (int i = 0; i < 30; ++i) {
    auto m = sample_rwisg(g, policy(SamplerKind::RWISG, 50), rng);
    std::set<EntityId> vs(m.vertex_set.begin(), m.vertex_set.end());
    EXPECT_EQ(as_set(m.positives), oracle::induced(g, vs));
  }
}

TEST(SampleRWISGN, ZeroFractionMatchesRWISG) {
  auto g = power_law_graph(300, 4, 2000, 0.8, 12);
  auto p = policy(SamplerKind::RWISG_N, 80);
  p.extra_neighbor_fraction = 0.0;
  Rng a(9), b(9);
  for (int i = 0; i < 10; ++i)
    EXPECT_EQ(sample_rwisg_n(g, p, a).positives,
              sample_rwisg(g, policy(SamplerKind::RWISG, 80), b).positives);
}

TEST(SampleRWISGN, FullFractionAtStarHubTakesEverySpoke) {
  auto g = fixtures::star(10);
  auto p = policy(SamplerKind::RWISG_N, 1);
  p.extra_neighbor_fraction = 1.0;
  Rng rng(2);
  auto m = sample_rwisg_n(g, p, rng, EntityId{0});
  EXPECT_EQ(as_set(m.positives), as_set(g.train()));
}

TEST(SampleRWISGN, PerVertexCapBoundsGrowth) {
  auto g = fixtures::star(100);
  auto p = policy(SamplerKind::RWISG_N, 1);
  p.extra_neighbor_fraction = 1.0;
  p.max_extra_per_vertex = 5;
  Rng rng(2);
  auto m = sample_rwisg_n(g, p, rng, EntityId{0});
  // the walked spoke plus at most 5 extras from the hub and 1 from the leaf
  EXPECT_LE(m.size(), 7u);
  EXPECT_GE(m.size(), 2u);
}

TEST(SampleRWISGN, SandwichedBetweenWalkAndRWISG) {
  auto g = power_law_graph(300, 4, 2000, 0.8, 12);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng a(seed), b(seed), c(seed);
    auto rw = sample_rw(g, policy(SamplerKind::RW, 40), a);
    auto isg = sample_rwisg(g, policy(SamplerKind::RWISG, 40), b);
    auto isgn = sample_rwisg_n(g, policy(SamplerKind::RWISG_N, 40), c);
    auto rw_set = as_set(rw.positives), isg_set = as_set(isg.positives),
         n_set = as_set(isgn.positives);
    EXPECT_TRUE(std::includes(n_set.begin(), n_set.end(), rw_set.begin(), rw_set.end()));
    EXPECT_TRUE(std::includes(n_set.begin(), n_set.end(), isg_set.begin(), isg_set.end()));
  }
}

TEST(Samplers, ContainmentDeduplicationAndVertexSet) {
  auto g = power_law_graph(300, 4, 1500, 0.8, 5);
  Rng rng(6);
  for (auto kind : kAllKinds) {
    for (int i = 0; i < 20; ++i) {
      auto m = sample(g, policy(kind, 64), rng);
      EXPECT_EQ(as_set(m.positives).size(), m.size());
      std::set<EntityId> vs;
      for (const auto& t : m.positives) {
        EXPECT_TRUE(g.in_train(t));
        vs.insert(t.subject);
        vs.insert(t.object);
      }
      EXPECT_EQ(std::vector<EntityId>(vs.begin(), vs.end()), m.vertex_set);
      if (kind == SamplerKind::SR || kind == SamplerKind::RW || kind == SamplerKind::RWR)
        EXPECT_EQ(m.size(), 64u);
      else
        EXPECT_GE(m.size(), 64u);
    }
  }
}

TEST(Samplers, UnknownNameListsTheKinds) {
  try {
    parse_sampler_kind("metropolis");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("sr, rw, rwr, rwisg, rwisg-n"), std::string::npos);
  }
  EXPECT_EQ(parse_sampler_kind("RWISG_N"), SamplerKind::RWISG_N);
}

TEST(Samplers, InvalidPolicyRejected) {
  auto g = fixtures::chain();
  Rng rng(0);
  auto p = policy(SamplerKind::RWR, 0);
  EXPECT_THROW(sample(g, p, rng), std::invalid_argument);
  p.batch_size = 1;
  p.restart_probability = 1.5;
  EXPECT_THROW(sample(g, p, rng), std::invalid_argument);
}

TEST(Samplers, EmptyTrainRejected) {
  KnowledgeGraph g(3, 1, {});
  Rng rng(0);
  EXPECT_THROW(sample(g, policy(SamplerKind::RW, 1), rng), std::invalid_argument);
}

TEST(EpochIterator, BatchCountIsCeilOfTrainOverBatch) {
  auto g = power_law_graph(80, 2, 100, 0.5, 1);
  for (auto kind : kAllKinds) {
    EpochIterator it(g, policy(kind, 10));
    EXPECT_EQ(it.batches_per_epoch(), 10u);
    EXPECT_EQ(it.epoch().size(), 10u);
  }
  EXPECT_EQ(EpochIterator(g, policy(SamplerKind::SR, 30)).batches_per_epoch(), 4u);
}

TEST(EpochIterator, SREpochPartitionsThePermutation) {
  auto g = power_law_graph(80, 2, 103, 0.5, 1);
  EpochIterator it(g, policy(SamplerKind::SR, 10));
  for (int epoch = 0; epoch < 3; ++epoch) {
    std::multiset<Triple> seen;
    for (const auto& m : it.epoch()) seen.insert(m.positives.begin(), m.positives.end());
    EXPECT_EQ(seen.size(), g.train().size());
    EXPECT_EQ(std::set<Triple>(seen.begin(), seen.end()), as_set(g.train()));
  }
}

TEST(EpochIterator, SameSeedSameSequence) {
  auto g = power_law_graph(200, 3, 700, 0.8, 2);
  for (auto kind : kAllKinds) {
    auto p = policy(kind, 32);
    p.seed = 1234;
    EpochIterator a(g, p), b(g, p);
    for (int epoch = 0; epoch < 2; ++epoch) {
      auto ea = a.epoch(), eb = b.epoch();
      ASSERT_EQ(ea.size(), eb.size());
      for (std::size_t i = 0; i < ea.size(); ++i) EXPECT_EQ(ea[i].positives, eb[i].positives);
    }
  }
}

TEST(EpochIterator, DifferentSeedsDiffer) {
  auto g = power_law_graph(200, 3, 700, 0.8, 2);
  auto p = policy(SamplerKind::RW, 32);
  p.seed = 1;
  EpochIterator a(g, p);
  p.seed = 2;
  EpochIterator b(g, p);
  EXPECT_NE(a.epoch().front().positives, b.epoch().front().positives);
}

TEST(WriteDot, NodesAndLabeledEdges) {
  auto g = fixtures::chain();
  Rng rng(0);
  auto m = sample_sr(g, policy(SamplerKind::SR, 3), rng);
  std::ostringstream out;
  write_dot(out, g, m);
  const auto s = out.str();
  EXPECT_EQ(s.rfind("digraph", 0), 0u);
  std::size_t edges = 0;
  for (std::size_t pos = s.find("->"); pos != std::string::npos; pos = s.find("->", pos + 2)) ++edges;
  EXPECT_EQ(edges, 3u);
  EXPECT_NE(s.find("[label="), std::string::npos);
}
