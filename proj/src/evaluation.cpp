#include "kgc/evaluation.hpp"

#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace kgc {

Protocol parse_protocol(std::string_view name) {
  if (name == "raw") return Protocol::Raw;
  if (name == "filtered") return Protocol::Filtered;
  throw std::invalid_argument("unknown protocol '" + std::string(name) + "' (raw|filtered)");
}

std::string_view protocol_name(Protocol protocol) {
  return protocol == Protocol::Raw ? "raw" : "filtered";
}

std::size_t rank_of(const Vxd& scores, EntityId target, std::span<const EntityId> excluded) {
  const double target_score = scores[target];
  std::size_t above = 0;
  for (Index i = 0; i < scores.size(); ++i) {
    if (static_cast<EntityId>(i) != target && scores[i] >= target_score) ++above;
  }
  for (EntityId e : excluded) {
    if (e != target && scores[e] >= target_score) --above;
  }
  return above + 1;
}

RankResult rank_triple(const KnowledgeGraph& g, const Store& store, const Triple& t,
                       Protocol protocol) {
  g.check_triple(t);
  RankResult result;
  result.triple = t;
  result.protocol = protocol;
  const bool filtered = protocol == Protocol::Filtered;

  Vxd tails = score_against_all_objects(store, t.subject, t.relation);
  result.tail_rank = rank_of(tails, t.object,
                             filtered ? g.known_objects(t.subject, t.relation)
                                      : std::span<const EntityId>{});
  Vxd heads = score_against_all_subjects(store, t.relation, t.object);
  result.head_rank = rank_of(heads, t.subject,
                             filtered ? g.known_subjects(t.relation, t.object)
                                      : std::span<const EntityId>{});
  return result;
}

Metrics metrics_from_ranks(std::span<const std::size_t> ranks, Protocol protocol) {
  Metrics m;
  m.protocol = protocol;
  m.count = ranks.size();
  if (ranks.empty()) return m;
  for (std::size_t r : ranks) {
    const auto rank = static_cast<double>(r);
    m.mrr += 1.0 / rank;
    m.mr += rank;
    m.hits1 += r <= 1;
    m.hits3 += r <= 3;
    m.hits10 += r <= 10;
  }
  const auto n = static_cast<double>(ranks.size());
  m.mrr /= n;
  m.mr /= n;
  m.hits1 /= n;
  m.hits3 /= n;
  m.hits10 /= n;
  return m;
}

Metrics evaluate_triples(const KnowledgeGraph& g, const Store& store,
                         std::span<const Triple> triples, Protocol protocol) {
  if (triples.empty()) throw std::invalid_argument("evaluating an empty split");
  std::vector<std::size_t> ranks;
  ranks.reserve(2 * triples.size());
  for (const auto& t : triples) {
    auto r = rank_triple(g, store, t, protocol);
    ranks.push_back(r.head_rank);
    ranks.push_back(r.tail_rank);
  }
  return metrics_from_ranks(ranks, protocol);
}

Metrics evaluate_split(const KnowledgeGraph& g, const Store& store, Split split,
                       Protocol protocol) {
  return evaluate_triples(g, store, g.split(split), protocol);
}

void write_metrics_record(std::ostream& out, const Metrics& m) {
  out << std::setprecision(10) << "{\"mrr\":" << m.mrr << ",\"mr\":" << m.mr
      << ",\"hits1\":" << m.hits1 << ",\"hits3\":" << m.hits3 << ",\"hits10\":" << m.hits10
      << ",\"count\":" << m.count << ",\"protocol\":\"" << protocol_name(m.protocol) << "\"}\n";
}

void write_metrics_csv(std::ostream& out, std::span<const Metrics> rows) {
  out << "mrr,mr,hits1,hits3,hits10,count,protocol\n" << std::setprecision(10);
  for (const auto& m : rows) {
    out << m.mrr << ',' << m.mr << ',' << m.hits1 << ',' << m.hits3 << ',' << m.hits10 << ','
        << m.count << ',' << protocol_name(m.protocol) << '\n';
  }
}

double random_baseline_mrr(std::size_t candidates) {
  double harmonic = 0.0;
  for (std::size_t k = 1; k <= candidates; ++k) harmonic += 1.0 / static_cast<double>(k);
  return candidates ? harmonic / static_cast<double>(candidates) : 0.0;
}

}  // namespace kgc
