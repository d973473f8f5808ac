#include "pathogen/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pathogen/detail/runner.hpp"

namespace pathogen {

namespace {

void require_spatial(const SimParams& params) {
  params.validate();
  if (!params.spatial())
    throw std::invalid_argument("spatial engine requires model S1, S2 or S3");
}

void require_live(const SpatialState& state) {
  if (state.total() == 0) throw std::logic_error("state is extinct");
}

}  // namespace

std::pair<std::int64_t, std::int64_t> SpatialState::extent() const {
  if (dim_ != 1) throw std::logic_error("extent is tracked in d=1 only");
  if (coords_.empty()) throw std::logic_error("extent of an empty configuration");
  return {*coords_.begin(), *coords_.rbegin()};
}

std::map<std::uint64_t, std::uint64_t> SpatialState::live_type_sizes() const {
  std::map<std::uint64_t, std::uint64_t> sizes;
  for (const TypeEntry& t : type_entries_) sizes[t.type_id] = t.sites.size();
  return sizes;
}

GenealogyRecord SpatialState::genealogy_snapshot() const {
  GenealogyRecord record;
  record.types = completed_;
  for (const TypeEntry& t : type_entries_) {
    TypeRecord open;
    open.type_id = t.type_id;
    open.parent_type = t.parent_type;
    open.birth_time = t.birth_time;
    open.mutant_offspring = t.mutant_offspring;
    open.max_size = t.max_size;
    record.types.push_back(open);
  }
  return record;
}

int SpatialState::empty_neighbor_count(const Site& s) const {
  int empties = 0;
  for (int axis = 0; axis < dim_; ++axis)
    for (int dir : {-1, +1})
      if (!occupied(s.neighbor(axis, dir))) ++empties;
  return empties;
}

void SpatialState::insert_site(const Site& s, std::uint64_t type_id) {
  site_index_.emplace(s, static_cast<std::uint32_t>(site_entries_.size()));
  site_entries_.push_back({s, type_id});
  site_weights_.push_back(static_cast<std::uint64_t>(empty_neighbor_count(s)));
  // Each occupied neighbor just lost one empty neighbor.
  for (int axis = 0; axis < dim_; ++axis) {
    for (int dir : {-1, +1}) {
      const auto it = site_index_.find(s.neighbor(axis, dir));
      if (it != site_index_.end()) site_weights_.add(it->second, -1);
    }
  }
  if (dim_ == 1) coords_.insert(s.c[0]);
}

void SpatialState::remove_type_sites(TypeEntry& type) {
  // Phase 1: vacate every site of the type.
  for (const Site& s : type.sites) {
    const auto it = site_index_.find(s);
    const std::uint32_t slot = it->second;
    site_index_.erase(it);
    const std::size_t last = site_entries_.size() - 1;
    if (slot != last) {
      site_entries_[slot] = site_entries_[last];
      site_weights_.set_weight(slot, site_weights_.weight(last));
      site_index_[site_entries_[slot].site] = slot;
    }
    site_weights_.pop_back();
    site_entries_.pop_back();
    if (dim_ == 1) coords_.erase(s.c[0]);
  }
  // Phase 2: every surviving neighbor of a vacated site gained one empty
  // neighbor. Done after all removals so intra-type adjacency cancels out.
  for (const Site& s : type.sites) {
    for (int axis = 0; axis < dim_; ++axis) {
      for (int dir : {-1, +1}) {
        const auto it = site_index_.find(s.neighbor(axis, dir));
        if (it != site_index_.end()) site_weights_.add(it->second, +1);
      }
    }
  }
}

ConsistencyReport SpatialState::check_consistency() const {
  std::ostringstream detail;
  // Site table vs. index, and incremental empty-neighbor weights.
  if (site_index_.size() != site_entries_.size()) {
    detail << "site index size " << site_index_.size() << " != entries "
           << site_entries_.size();
    return {false, detail.str()};
  }
  std::uint64_t recomputed_total = 0;
  for (std::size_t slot = 0; slot < site_entries_.size(); ++slot) {
    const SiteEntry& e = site_entries_[slot];
    const auto it = site_index_.find(e.site);
    if (it == site_index_.end() || it->second != slot) {
      detail << "site index mismatch at slot " << slot;
      return {false, detail.str()};
    }
    const auto w = static_cast<std::uint64_t>(empty_neighbor_count(e.site));
    recomputed_total += w;
    if (site_weights_.weight(slot) != w) {
      detail << "boundary weight at slot " << slot << ": stored "
             << site_weights_.weight(slot) << ", recomputed " << w;
      return {false, detail.str()};
    }
  }
  if (recomputed_total != site_weights_.total()) {
    detail << "boundary weight total: stored " << site_weights_.total()
           << ", recomputed " << recomputed_total;
    return {false, detail.str()};
  }
  // Types partition the occupancy.
  std::uint64_t covered = 0;
  for (std::size_t slot = 0; slot < type_entries_.size(); ++slot) {
    const TypeEntry& t = type_entries_[slot];
    const auto it = type_index_.find(t.type_id);
    if (it == type_index_.end() || it->second != slot) {
      detail << "type index mismatch for type " << t.type_id;
      return {false, detail.str()};
    }
    if (type_weights_.weight(slot) != t.sites.size()) {
      detail << "type weight mismatch for type " << t.type_id;
      return {false, detail.str()};
    }
    for (const Site& s : t.sites) {
      const auto site_it = site_index_.find(s);
      if (site_it == site_index_.end() ||
          site_entries_[site_it->second].type_id != t.type_id) {
        detail << "type " << t.type_id << " claims a site it does not occupy";
        return {false, detail.str()};
      }
    }
    covered += t.sites.size();
    if (dim_ == 1 && !t.sites.empty()) {
      std::int32_t lo = t.sites.front().c[0], hi = lo;
      for (const Site& s : t.sites) {
        lo = std::min(lo, s.c[0]);
        hi = std::max(hi, s.c[0]);
      }
      if (static_cast<std::size_t>(hi - lo + 1) != t.sites.size()) {
        detail << "type " << t.type_id << " does not occupy an interval";
        return {false, detail.str()};
      }
    }
  }
  if (covered != site_entries_.size()) {
    detail << "type site lists cover " << covered << " sites, occupancy has "
           << site_entries_.size();
    return {false, detail.str()};
  }
  if (type_weights_.total() != site_entries_.size()) {
    detail << "type weight total != population";
    return {false, detail.str()};
  }
  if (dim_ == 1) {
    if (coords_.size() != site_entries_.size()) {
      detail << "coordinate set size != population";
      return {false, detail.str()};
    }
    for (const SiteEntry& e : site_entries_) {
      if (!coords_.contains(e.site.c[0])) {
        detail << "coordinate set missing an occupied site";
        return {false, detail.str()};
      }
    }
  }
  return {true, ""};
}

bool SpatialState::type_count_lower_bound_check() const {
  if (dim_ < 2) throw std::logic_error("lower-bound check applies to d >= 2");
  std::uint64_t with_empty_neighbor = 0;
  for (const SiteEntry& e : site_entries_)
    if (empty_neighbor_count(e.site) > 0) ++with_empty_neighbor;
  const auto needed = static_cast<std::uint64_t>(
      std::ceil(std::sqrt(static_cast<double>(site_entries_.size()))));
  return with_empty_neighbor >= needed;
}

SpatialState SpatialState::testing_state(
    const SimParams& params,
    const std::vector<std::pair<Site, std::uint64_t>>& occupancy,
    bool retain_genealogy) {
  require_spatial(params);
  SpatialState state;
  state.dim_ = *params.dim;
  state.retain_genealogy_ = retain_genealogy;
  state.next_type_id_ = 1;
  for (const auto& [site, type_id] : occupancy) {
    if (type_id == 0) throw std::invalid_argument("type ids must be positive");
    if (state.occupied(site)) throw std::invalid_argument("duplicate site");
    state.insert_site(site, type_id);
    const auto it = state.type_index_.find(type_id);
    if (it == state.type_index_.end()) {
      state.type_index_.emplace(type_id,
                                static_cast<std::uint32_t>(state.type_entries_.size()));
      TypeEntry t;
      t.type_id = type_id;
      t.sites.push_back(site);
      state.type_entries_.push_back(std::move(t));
      state.type_weights_.push_back(1);
    } else {
      TypeEntry& t = state.type_entries_[it->second];
      t.sites.push_back(site);
      t.max_size = std::max<std::uint64_t>(t.max_size, t.sites.size());
      state.type_weights_.add(it->second, 1);
    }
    state.next_type_id_ = std::max(state.next_type_id_, type_id + 1);
  }
  return state;
}

SpatialState sp_init(const SimParams& params, bool retain_genealogy) {
  require_spatial(params);
  SpatialState state;
  state.dim_ = *params.dim;
  state.retain_genealogy_ = retain_genealogy;
  state.insert_site(Site{}, 1);
  SpatialState::TypeEntry origin;
  origin.type_id = 1;
  origin.sites.push_back(Site{});
  state.type_entries_.push_back(std::move(origin));
  state.type_weights_.push_back(1);
  state.type_index_.emplace(1, 0);
  state.next_type_id_ = 2;
  return state;
}

std::pair<double, double> sp_total_rates(const SpatialState& state,
                                         const SimParams& params) {
  require_live(state);
  const double birth = params.lambda * static_cast<double>(state.boundary_weight());
  double death = 0.0;
  switch (params.model) {
    case ModelId::S1: death = 1.0; break;
    case ModelId::S2: death = static_cast<double>(state.type_count()); break;
    case ModelId::S3: death = static_cast<double>(state.total()); break;
    default: throw std::invalid_argument("spatial rates require S1, S2 or S3");
  }
  return {birth, death};
}

double sp_draw_holding(const SpatialState& state, const SimParams& params,
                       Rng& rng) {
  const auto [birth, death] = sp_total_rates(state, params);
  return rng.exponential(birth + death);
}

SpEvent sp_apply_event(SpatialState& state, const SimParams& params, Rng& rng,
                       double at) {
  const auto [birth_rate, death_rate] = sp_total_rates(state, params);
  state.time_ = at;

  SpEvent event;
  event.at = at;
  if (rng.next_double() * (birth_rate + death_rate) < birth_rate) {
    event.kind = SpEvent::Kind::Birth;
    // One integer in [0, boundary_weight) addresses a unique (occupied site,
    // empty neighbor) pair: the sampled slot is the parent, the remainder
    // indexes its empty neighbors in axis order.
    std::uint64_t remainder = rng.below(state.site_weights_.total());
    const std::size_t parent_slot = state.site_weights_.sample_with_remainder(&remainder);
    const Site parent_site = state.site_entries_[parent_slot].site;
    const std::uint64_t parent_type = state.site_entries_[parent_slot].type_id;

    Site child_site{};
    bool found = false;
    std::uint64_t skip = remainder;
    for (int axis = 0; axis < state.dim_ && !found; ++axis) {
      for (int dir : {-1, +1}) {
        const Site candidate = parent_site.neighbor(axis, dir);
        if (state.occupied(candidate)) continue;
        if (skip == 0) {
          child_site = candidate;
          found = true;
          break;
        }
        --skip;
      }
    }
    if (!found) throw std::logic_error("boundary weight inconsistent with occupancy");

    event.parent_site = parent_site;
    event.child_site = child_site;
    event.parent_type = parent_type;
    event.is_mutant = rng.bernoulli(params.r);
    event.child_type = event.is_mutant ? state.next_type_id_++ : parent_type;

    state.insert_site(child_site, event.child_type);
    if (event.is_mutant) {
      SpatialState::TypeEntry child;
      child.type_id = event.child_type;
      child.parent_type = parent_type;
      child.birth_time = at;
      child.sites.push_back(child_site);
      state.type_index_.emplace(event.child_type,
                                static_cast<std::uint32_t>(state.type_entries_.size()));
      state.type_entries_.push_back(std::move(child));
      state.type_weights_.push_back(1);
      state.type_entries_[state.type_index_.at(parent_type)].mutant_offspring += 1;
    } else {
      const std::uint32_t slot = state.type_index_.at(parent_type);
      SpatialState::TypeEntry& type = state.type_entries_[slot];
      type.sites.push_back(child_site);
      type.max_size = std::max<std::uint64_t>(type.max_size, type.sites.size());
      state.type_weights_.add(slot, 1);
    }
  } else {
    event.kind = SpEvent::Kind::TypeDeath;
    const std::size_t slot =
        params.model == ModelId::S3
            ? state.type_weights_.sample(rng.below(state.type_weights_.total()))
            : static_cast<std::size_t>(rng.below(state.type_entries_.size()));
    SpatialState::TypeEntry& victim = state.type_entries_[slot];
    event.type_id = victim.type_id;
    event.victims = victim.sites.size();

    state.remove_type_sites(victim);
    if (state.retain_genealogy_) {
      TypeRecord record;
      record.type_id = victim.type_id;
      record.parent_type = victim.parent_type;
      record.birth_time = victim.birth_time;
      record.death_time = at;
      record.mutant_offspring = victim.mutant_offspring;
      record.max_size = victim.max_size;
      state.completed_.push_back(record);
    }
    state.type_index_.erase(victim.type_id);
    const std::size_t last = state.type_entries_.size() - 1;
    if (slot != last) {
      state.type_entries_[slot] = std::move(state.type_entries_[last]);
      state.type_weights_.set_weight(slot, state.type_weights_.weight(last));
      state.type_index_[state.type_entries_[slot].type_id] =
          static_cast<std::uint32_t>(slot);
    }
    state.type_weights_.pop_back();
    state.type_entries_.pop_back();
  }
  return event;
}

SpEvent sp_step(SpatialState& state, const SimParams& params, Rng& rng) {
  const double dt = sp_draw_holding(state, params, rng);
  return sp_apply_event(state, params, rng, state.time() + dt);
}

namespace {

struct SpEngine {
  SpatialState state;
  const SimParams& params;
  Rng& rng;

  double time() const { return state.time(); }
  std::uint64_t population() const { return state.total(); }
  std::uint64_t types() const { return state.type_count(); }
  double draw_holding() { return sp_draw_holding(state, params, rng); }
  void apply(double at) { sp_apply_event(state, params, rng, at); }
  bool verify() const { return state.check_consistency().ok; }
  GenealogyRecord genealogy_snapshot() const { return state.genealogy_snapshot(); }

  SeriesPoint sample(double t) const {
    SeriesPoint p;
    p.t = t;
    p.population = state.total();
    p.type_count = state.type_count();
    if (state.dim() == 1 && state.total() > 0) {
      const auto [left, right] = state.extent();
      p.has_extent = true;
      p.left = left;
      p.right = right;
    }
    return p;
  }
};

}  // namespace

Outcome sp_run(const SimParams& params, Rng& rng, const RecordOptions& rec) {
  SpEngine engine{sp_init(params, rec.genealogy), params, rng};
  return detail::run_to_stop(engine, params.stop, rec);
}

}  // namespace pathogen
