#pragma once

#include <cstdint>
#include <filesystem>

#include "kgc/graph.hpp"

namespace kgc {

/// Heavy-tailed random graph: endpoints drawn with weight
/// proportional to (rank + 1)^-skew (Chung-Lu style); no duplicate triples,
/// no self-loops. Everything lands in train.
KnowledgeGraph power_law_graph(std::size_t entities, std::size_t relations, std::size_t triples,
                               double skew, std::uint64_t seed);

/// Graph with planted relational structure over entities on a ring Z_n:
///   relation 0 is symmetric:     i <-> i + n/2
///   relation 1 is a successor:   i  -> i + 1
///   relation 2 is its square:    i  -> i + 2   (relation 1 composed twice)
/// A `held_out` fraction of the triples goes to test and half as many
/// to valid.
KnowledgeGraph planted_toy_graph(std::size_t entities, double held_out, std::uint64_t seed);

/// Writes train.txt / valid.txt / test.txt with names from the graph labels.
void write_dataset(const KnowledgeGraph& g, const std::filesystem::path& directory);

}  // namespace kgc
