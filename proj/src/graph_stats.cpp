#include "kgc/graph_stats.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace kgc {

double DegreeHistogram::total_mass() const {
  double total = 0.0;
  for (const auto& [d, p] : mass) total += p;
  return total;
}

DegreeHistogram minibatch_degree_distribution(std::span<const Triple> positives) {
  if (positives.empty()) throw std::invalid_argument("degree distribution of an empty minibatch");
  std::unordered_map<EntityId, std::size_t> degree_of;
  for (const auto& t : positives) {
    ++degree_of[t.subject];
    ++degree_of[t.object];
  }
  std::map<std::size_t, std::size_t> counts;
  for (const auto& [v, d] : degree_of) ++counts[d];

  DegreeHistogram h;
  h.num_batches = 1;
  const auto n = static_cast<double>(degree_of.size());
  for (const auto& [d, c] : counts) h.mass[d] = static_cast<double>(c) / n;
  return h;
}

DegreeHistogram minibatch_degree_distribution(const Minibatch& m) {
  return minibatch_degree_distribution(std::span<const Triple>(m.positives));
}

DegreeHistogram averaged_distribution(std::span<const DegreeHistogram> histograms) {
  if (histograms.empty()) throw std::invalid_argument("averaging an empty list of histograms");
  DegreeHistogram out;
  out.num_batches = histograms.size();
  for (const auto& h : histograms) {
    for (const auto& [d, p] : h.mass) out.mass[d] += p;
  }
  const auto n = static_cast<double>(histograms.size());
  for (auto& [d, p] : out.mass) p /= n;
  return out;
}

double expected_degree(const DegreeHistogram& h) {
  double e = 0.0;
  for (const auto& [d, p] : h.mass) e += p * static_cast<double>(d);
  return e;
}

std::vector<SweepPoint> ed_vs_batchsize_sweep(const KnowledgeGraph& g,
                                              std::span<const SamplerPolicy> policies,
                                              std::span<const std::size_t> batch_sizes,
                                              std::size_t batches_per_point) {
  if (batches_per_point == 0) throw std::invalid_argument("batches_per_point must be positive");
  std::vector<SweepPoint> points;
  for (const auto& base : policies) {
    for (std::size_t b : batch_sizes) {
      SweepPoint point;
      point.policy = base;
      point.policy.batch_size = b;
      Rng rng(base.seed ^ (0x9e3779b97f4a7c15ULL * (b + 1)));

      std::vector<DegreeHistogram> histograms;
      std::vector<double> per_batch;
      histograms.reserve(batches_per_point);
      per_batch.reserve(batches_per_point);
      for (std::size_t i = 0; i < batches_per_point; ++i) {
        histograms.push_back(minibatch_degree_distribution(sample(g, point.policy, rng)));
        per_batch.push_back(expected_degree(histograms.back()));
      }
      const auto n = static_cast<double>(batches_per_point);
      point.num_batches = batches_per_point;
      point.averaged = averaged_distribution(histograms);
      point.expected_degree = expected_degree(point.averaged);
      if (batches_per_point > 1) {
        double mean = 0.0;
        for (double e : per_batch) mean += e;
        mean /= n;
        double ss = 0.0;
        for (double e : per_batch) ss += (e - mean) * (e - mean);
        point.std_error = std::sqrt(ss / (n - 1.0) / n);
      }
      points.push_back(std::move(point));
    }
  }
  return points;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points) {
  out << "policy,batch_size,expected_degree,std_error,num_batches\n";
  out << std::setprecision(10);
  for (const auto& p : points) {
    out << sampler_name(p.policy.kind) << ',' << p.policy.batch_size << ',' << p.expected_degree
        << ',' << p.std_error << ',' << p.num_batches << '\n';
  }
}

void write_distribution_csv_header(std::ostream& out) {
  out << "policy,batch_size,degree,probability\n";
}

void write_distribution_csv_rows(std::ostream& out, const SamplerPolicy& policy,
                                 const DegreeHistogram& h) {
  out << std::setprecision(10);
  for (const auto& [d, p] : h.mass) {
    out << sampler_name(policy.kind) << ',' << policy.batch_size << ',' << d << ',' << p << '\n';
  }
}

}  // namespace kgc
