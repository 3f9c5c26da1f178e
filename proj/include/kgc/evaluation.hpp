#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>

#include "kgc/graph.hpp"
#include "kgc/scorer.hpp"

namespace kgc {

enum class Protocol { Raw, Filtered };

Protocol parse_protocol(std::string_view name);
std::string_view protocol_name(Protocol protocol);

struct RankResult {
  Triple triple;
  std::size_t head_rank = 1;
  std::size_t tail_rank = 1;
  Protocol protocol = Protocol::Filtered;
};

struct Metrics {
  double mrr = 0.0;
  double mr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::size_t count = 0;
  Protocol protocol = Protocol::Filtered;
};

/// 1 + number of candidates other than `target` whose score is >= the
/// target's (ties count against the target), skipping candidates in `excluded`.
std::size_t rank_of(const Vxd& scores, EntityId target, std::span<const EntityId> excluded = {});

/// Head and tail rank of t against every entity. The filtered protocol drops
/// candidates that form a known triple in any split.
RankResult rank_triple(const KnowledgeGraph& g, const Store& store, const Triple& t,
                       Protocol protocol);

Metrics metrics_from_ranks(std::span<const std::size_t> ranks, Protocol protocol);

/// Ranks both directions of every triple: 2 * |triples| queries.
Metrics evaluate_triples(const KnowledgeGraph& g, const Store& store,
                         std::span<const Triple> triples, Protocol protocol);
Metrics evaluate_split(const KnowledgeGraph& g, const Store& store, Split split, Protocol protocol);

/// `{"mrr":..,"mr":..,"hits1":..,"hits3":..,"hits10":..,"count":..,"protocol":".."}`
void write_metrics_record(std::ostream& out, const Metrics& m);
void write_metrics_csv(std::ostream& out, std::span<const Metrics> rows);

/// Expected MRR of a scorer that ranks the target uniformly at random among
/// `candidates`: H(candidates) / candidates.
double random_baseline_mrr(std::size_t candidates);

}  // namespace kgc
