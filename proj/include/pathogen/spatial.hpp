#ifndef PATHOGEN_SPATIAL_HPP
#define PATHOGEN_SPATIAL_HPP

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pathogen/outcome.hpp"
#include "pathogen/params.hpp"
#include "pathogen/rng.hpp"
#include "pathogen/weighted_index.hpp"

namespace pathogen {

/// Lattice site; coordinates beyond the active dimension stay zero, so
/// hashing and equality can always use the full array.
struct Site {
  std::array<std::int32_t, kMaxDim> c{};

  Site neighbor(int axis, int direction) const {
    Site n = *this;
    n.c[static_cast<std::size_t>(axis)] += direction;
    return n;
  }
  friend bool operator==(const Site&, const Site&) = default;
};

struct SiteHash {
  std::size_t operator()(const Site& s) const {
    const std::uint64_t a =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.c[0])) << 32) |
        static_cast<std::uint32_t>(s.c[1]);
    const std::uint64_t b =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.c[2])) << 32) |
        static_cast<std::uint32_t>(s.c[3]);
    return static_cast<std::size_t>(mix64(a ^ mix64(b)));
  }
};

/// One event of the spatial dynamics.
struct SpEvent {
  enum class Kind { Birth, TypeDeath } kind = Kind::Birth;
  double at = 0.0;
  // Birth
  Site parent_site;
  Site child_site;
  std::uint64_t parent_type = 0;
  std::uint64_t child_type = 0;
  bool is_mutant = false;
  // TypeDeath
  std::uint64_t type_id = 0;
  std::uint64_t victims = 0;
};

struct ConsistencyReport {
  bool ok = true;
  std::string detail;
};

/// Sparse occupancy of Z^d for Models S1-S3: a hash-addressed site table
/// (no torus, no bounds) paired with a cumulative-weight index over per-site
/// empty-neighbor counts, so the total birth rate λ·boundary_weight and
/// uniform (occupied, empty-neighbor) pair selection are exact. Types carry
/// their site lists for atomic whole-type removal; in d=1 an ordered
/// coordinate set tracks the extent [L, R].
class SpatialState {
 public:
  double time() const { return time_; }
  int dim() const { return dim_; }
  std::uint64_t total() const { return site_entries_.size(); }
  std::uint64_t type_count() const { return type_entries_.size(); }
  std::uint64_t boundary_weight() const { return site_weights_.total(); }
  std::uint64_t next_type_id() const { return next_type_id_; }

  bool occupied(const Site& s) const { return site_index_.contains(s); }
  /// Extent of the occupied set, d=1 only.
  std::pair<std::int64_t, std::int64_t> extent() const;

  std::map<std::uint64_t, std::uint64_t> live_type_sizes() const;
  GenealogyRecord genealogy_snapshot() const;

  /// Full from-scratch verification: boundary weights, occupancy/type
  /// partition, d=1 interval property and extent bookkeeping.
  ConsistencyReport check_consistency() const;

  /// Number of occupied sites with at least one empty neighbor is at least
  /// ceil(sqrt(N)); recomputed from the occupancy itself. Pre: d >= 2.
  bool type_count_lower_bound_check() const;

  /// Arbitrary configuration for tests: (site, type id) pairs, distinct
  /// sites, positive ids.
  static SpatialState testing_state(
      const SimParams& params,
      const std::vector<std::pair<Site, std::uint64_t>>& occupancy,
      bool retain_genealogy = false);

 private:
  struct SiteEntry {
    Site site;
    std::uint64_t type_id = 0;
  };
  struct TypeEntry {
    std::uint64_t type_id = 0;
    std::vector<Site> sites;
    std::uint64_t parent_type = 0;
    double birth_time = 0.0;
    std::uint64_t mutant_offspring = 0;
    std::uint64_t max_size = 1;
  };

  int empty_neighbor_count(const Site& s) const;
  void insert_site(const Site& s, std::uint64_t type_id);
  void remove_type_sites(TypeEntry& type);

  double time_ = 0.0;
  int dim_ = 1;
  std::uint64_t next_type_id_ = 2;
  bool retain_genealogy_ = false;

  std::unordered_map<Site, std::uint32_t, SiteHash> site_index_;  // site -> slot
  std::vector<SiteEntry> site_entries_;
  WeightedIndex site_weights_;  // weight(slot) == empty-neighbor count in [0, 2d]

  std::unordered_map<std::uint64_t, std::uint32_t> type_index_;  // id -> slot
  std::vector<TypeEntry> type_entries_;
  WeightedIndex type_weights_;  // weight(slot) == site count of that type

  std::set<std::int32_t> coords_;  // occupied coordinates, d == 1 only
  std::vector<TypeRecord> completed_;

  friend SpatialState sp_init(const SimParams&, bool);
  friend SpEvent sp_apply_event(SpatialState&, const SimParams&, Rng&, double);
};

/// Fresh state: a single pathogen of type 1 at the origin.
SpatialState sp_init(const SimParams& params, bool retain_genealogy = false);

/// (birth rate, death rate) = (λ·boundary_weight, {1 | K | N}).
std::pair<double, double> sp_total_rates(const SpatialState& state,
                                         const SimParams& params);

/// Exponential holding time at the current aggregate rate.
double sp_draw_holding(const SpatialState& state, const SimParams& params, Rng& rng);

/// Categorize and apply one event at the given time. Draw order: event
/// category, target selection (one integer draw selects the (parent site,
/// empty neighbor) pair uniformly; neighbors are ordered -x,+x,-y,+y,...),
/// then (for births with 0 < r < 1) the mutation flag.
SpEvent sp_apply_event(SpatialState& state, const SimParams& params, Rng& rng,
                       double at);

/// Advance by one event: holding time, then sp_apply_event.
SpEvent sp_step(SpatialState& state, const SimParams& params, Rng& rng);

/// Run to extinction or the stopping rule.
Outcome sp_run(const SimParams& params, Rng& rng, const RecordOptions& rec = {});

inline bool sp_type_count_lower_bound_check(const SpatialState& state) {
  return state.type_count_lower_bound_check();
}
inline ConsistencyReport sp_check_consistency(const SpatialState& state) {
  return state.check_consistency();
}

}  // namespace pathogen

#endif  // PATHOGEN_SPATIAL_HPP
