#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kgc/types.hpp"

namespace kgc {

struct Triple {
  EntityId subject = 0;
  RelationId relation = 0;
  EntityId object = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

enum class Split { Train, Valid, Test };

Split parse_split(std::string_view name);
std::string_view split_name(Split split);

/// Counts the loader observes but does not act on.
struct LoadReport {
  std::size_t self_loops = 0;
  std::size_t cross_split_duplicates = 0;
};

/// Entity/relation dictionaries, the three splits, a CSR incidence index over
/// the train split, and a membership index over all splits.
///
/// Immutable after construction.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  /// Builds from already-dense ids. Throws DataError on out-of-range ids or a
  /// duplicate triple within a split.
  KnowledgeGraph(std::size_t entity_count, std::size_t relation_count, std::vector<Triple> train,
                 std::vector<Triple> valid = {}, std::vector<Triple> test = {});

  std::size_t entity_count() const { return entity_count_; }
  std::size_t relation_count() const { return relation_count_; }

  const std::vector<Triple>& train() const { return train_; }
  const std::vector<Triple>& valid() const { return valid_; }
  const std::vector<Triple>& test() const { return test_; }
  const std::vector<Triple>& split(Split which) const;

  /// Indices into train() of every triple with v as subject or object. Sorted;
  /// a self-loop appears once.
  std::span<const Index> incident(EntityId v) const;

  /// Entities with at least one incident train triple.
  const std::vector<EntityId>& connected_entities() const { return connected_; }

  /// Membership over train ∪ valid ∪ test.
  bool contains(const Triple& t) const;
  bool in_train(const Triple& t) const;

  /// Every o with (s, r, o) in any split; every s with (s, r, o) in any split.
  std::span<const EntityId> known_objects(EntityId s, RelationId r) const;
  std::span<const EntityId> known_subjects(RelationId r, EntityId o) const;

  const std::vector<std::string>& entity_names() const { return entity_names_; }
  const std::vector<std::string>& relation_names() const { return relation_names_; }
  std::string entity_label(EntityId e) const;
  std::string relation_label(RelationId r) const;

  const LoadReport& report() const { return report_; }

  void check_entity(EntityId v) const;
  void check_triple(const Triple& t) const;

 private:
  friend KnowledgeGraph load_dataset(const std::filesystem::path& directory);

  std::uint64_t triple_key(const Triple& t) const;
  std::uint64_t pair_key(std::uint64_t a, std::uint64_t b, std::uint64_t stride) const {
    return a * stride + b;
  }
  void build_indices();

  std::size_t entity_count_ = 0;
  std::size_t relation_count_ = 0;
  std::vector<Triple> train_;
  std::vector<Triple> valid_;
  std::vector<Triple> test_;

  std::vector<Index> incident_offsets_;
  std::vector<Index> incident_;
  std::vector<EntityId> connected_;

  std::unordered_set<std::uint64_t> known_;
  std::unordered_set<std::uint64_t> train_known_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> objects_of_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> subjects_of_;

  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
  LoadReport report_;
};

/// Reads train.txt / valid.txt / test.txt (subject TAB relation TAB object).
/// Ids are assigned in first-seen order over train, then valid, then test.
KnowledgeGraph load_dataset(const std::filesystem::path& directory);

/// Writes entities.tsv and relations.tsv (id TAB name).
void write_dictionaries(const KnowledgeGraph& g, const std::filesystem::path& directory);

/// Reads one id TAB name dictionary file back into a name list ordered by id.
std::vector<std::string> read_dictionary(const std::filesystem::path& file);

/// In-degree plus out-degree over the train split; a self-loop counts twice.
std::size_t degree(const KnowledgeGraph& g, EntityId v);

/// Train triples sharing an endpoint with t, excluding t itself. Sorted.
std::vector<Triple> neighbor_triples(const KnowledgeGraph& g, const Triple& t);
std::vector<Index> neighbor_triple_indices(const KnowledgeGraph& g, const Triple& t);

/// Train triples with both endpoints in `vertices`. Sorted.
std::vector<Triple> induced_subgraph(const KnowledgeGraph& g, std::span<const EntityId> vertices);
std::vector<Index> induced_subgraph_indices(const KnowledgeGraph& g,
                                            std::span<const EntityId> vertices);

struct DegreeSummary {
  double mean = 0.0;
  double median = 0.0;
};

/// Mean and median total degree over all |E| entities.
DegreeSummary degree_summary(const KnowledgeGraph& g);

}  // namespace kgc
