#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "kgc/sampler.hpp"

namespace kgc {

/// Probability mass over within-batch total degree d >= 1, averaged over
/// `num_batches` minibatch subgraphs.
struct DegreeHistogram {
  std::map<std::size_t, double> mass;
  std::size_t num_batches = 0;

  std::size_t d_max() const { return mass.empty() ? 0 : mass.rbegin()->first; }
  double probability(std::size_t d) const {
    auto it = mass.find(d);
    return it == mass.end() ? 0.0 : it->second;
  }
  double total_mass() const;
};

/// Fraction of minibatch-subgraph vertices with each within-batch total degree.
/// A self-loop adds 2 to its entity. Throws std::invalid_argument when empty.
DegreeHistogram minibatch_degree_distribution(const Minibatch& m);
DegreeHistogram minibatch_degree_distribution(std::span<const Triple> positives);

/// Unweighted mean of per-batch distributions (not pooled counts).
DegreeHistogram averaged_distribution(std::span<const DegreeHistogram> histograms);

/// First moment of the distribution.
double expected_degree(const DegreeHistogram& h);

struct SweepPoint {
  SamplerPolicy policy;  // batch_size holds the swept value
  double expected_degree = 0.0;
  double std_error = 0.0;
  std::size_t num_batches = 0;
  DegreeHistogram averaged;
};

/// For every (policy, b): `batches_per_point` independent batches, mean E[D]
/// across batches and its standard error. Each point seeds its own generator
/// from policy.seed and b.
std::vector<SweepPoint> ed_vs_batchsize_sweep(const KnowledgeGraph& g,
                                              std::span<const SamplerPolicy> policies,
                                              std::span<const std::size_t> batch_sizes,
                                              std::size_t batches_per_point);

/// `policy,batch_size,expected_degree,std_error,num_batches`
void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points);

/// `policy,batch_size,degree,probability`
void write_distribution_csv_header(std::ostream& out);
void write_distribution_csv_rows(std::ostream& out, const SamplerPolicy& policy,
                                 const DegreeHistogram& h);

}  // namespace kgc
