#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pathogen/spatial.hpp"
#include "support/reference_contact_process.hpp"
#include "support/stat_tests.hpp"

using namespace pathogen;

namespace {

SimParams sp_params(ModelId model, int dim, double lambda, double r) {
  SimParams params;
  params.model = model;
  params.lambda = lambda;
  params.r = r;
  params.dim = dim;
  return params;
}

Site site1(std::int32_t x) {
  Site s;
  s.c[0] = x;
  return s;
}

Site site2(std::int32_t x, std::int32_t y) {
  Site s;
  s.c[0] = x;
  s.c[1] = y;
  return s;
}

}  // namespace

TEST_CASE("sp_init occupies the origin with boundary weight 2d") {
  for (const auto& [model, dim] : {std::pair{ModelId::S2, 1}, {ModelId::S3, 2},
                                   {ModelId::S1, 3}}) {
    const SpatialState state = sp_init(sp_params(model, dim, 1.0, 0.5));
    CHECK(state.total() == 1);
    CHECK(state.type_count() == 1);
    CHECK(state.boundary_weight() == static_cast<std::uint64_t>(2 * dim));
    CHECK(state.occupied(Site{}));
    CHECK(state.check_consistency().ok);
  }
  CHECK_THROWS_AS(sp_init(sp_params(ModelId::M1, 1, 1.0, 0.5)),
                  std::invalid_argument);
  SimParams no_dim;
  no_dim.model = ModelId::S1;
  no_dim.lambda = 1.0;
  CHECK_THROWS_AS(sp_init(no_dim), std::invalid_argument);
  CHECK_THROWS_AS(sp_init(sp_params(ModelId::S1, 5, 1.0, 0.5)),
                  std::invalid_argument);
}

TEST_CASE("total rates: interval geometry and per-model death rules") {
  // d=1, five contiguous sites of mixed types: only the two ends are fertile.
  const std::vector<std::pair<Site, std::uint64_t>> interval = {
      {site1(0), 1}, {site1(1), 1}, {site1(2), 2}, {site1(3), 3}, {site1(4), 3}};
  const auto s2 = SpatialState::testing_state(sp_params(ModelId::S2, 1, 2.0, 0.5),
                                              interval);
  CHECK(s2.boundary_weight() == 2);
  CHECK(sp_total_rates(s2, sp_params(ModelId::S2, 1, 2.0, 0.5)) ==
        std::pair{4.0, 3.0});
  const auto s3 = SpatialState::testing_state(sp_params(ModelId::S3, 1, 2.0, 0.5),
                                              interval);
  CHECK(sp_total_rates(s3, sp_params(ModelId::S3, 1, 2.0, 0.5)) ==
        std::pair{4.0, 5.0});
  const auto s1 = SpatialState::testing_state(sp_params(ModelId::S1, 1, 2.0, 0.5),
                                              interval);
  CHECK(sp_total_rates(s1, sp_params(ModelId::S1, 1, 2.0, 0.5)) ==
        std::pair{4.0, 1.0});
  CHECK(s1.extent() == std::pair<std::int64_t, std::int64_t>{0, 4});
}

TEST_CASE("a single pathogen births with probability 2d lambda/(2d lambda + 1)") {
  const auto params = sp_params(ModelId::S3, 2, 0.75, 0.5);
  const double expected = 4 * 0.75 / (4 * 0.75 + 1.0);
  Rng rng = derive_trial_rng(7, 0);
  const int reps = 20000;
  int births = 0;
  for (int i = 0; i < reps; ++i) {
    auto state = sp_init(params);
    births += sp_step(state, params, rng).kind == SpEvent::Kind::Birth ? 1 : 0;
  }
  const double se = std::sqrt(expected * (1.0 - expected) / reps);
  CHECK(std::abs(births / static_cast<double>(reps) - expected) < 4.0 * se);
}

TEST_CASE("whole-type removal vacates every site in one event") {
  const auto params = sp_params(ModelId::S1, 1, 1e-9, 0.5);
  auto state = SpatialState::testing_state(
      params, {{site1(0), 1}, {site1(1), 1}, {site1(2), 1}});
  Rng rng = derive_trial_rng(11, 0);
  const SpEvent event = sp_step(state, params, rng);
  REQUIRE(event.kind == SpEvent::Kind::TypeDeath);
  CHECK(event.victims == 3);
  CHECK(state.total() == 0);
  CHECK(state.type_count() == 0);
  CHECK(state.boundary_weight() == 0);
  CHECK(state.check_consistency().ok);
}

TEST_CASE("births stay adjacent, land on empty sites, and mutate per r") {
  const auto params = sp_params(ModelId::S2, 2, 1.5, 0.4);
  auto state = sp_init(params, true);
  Rng rng = derive_trial_rng(13, 0);
  for (int step = 0; step < 4000 && state.total() > 0; ++step) {
    const SpEvent event = sp_step(state, params, rng);
    if (event.kind == SpEvent::Kind::Birth) {
      int l1 = 0;
      for (int axis = 0; axis < 2; ++axis)
        l1 += std::abs(event.child_site.c[axis] - event.parent_site.c[axis]);
      REQUIRE(l1 == 1);
      REQUIRE(state.occupied(event.child_site));
      if (event.is_mutant)
        REQUIRE(event.child_type != event.parent_type);
      else
        REQUIRE(event.child_type == event.parent_type);
    }
  }
}

TEST_CASE("incremental bookkeeping matches from-scratch recomputation") {
  Rng pick = derive_trial_rng(17, 0);
  for (ModelId model : {ModelId::S1, ModelId::S2, ModelId::S3}) {
    for (int dim : {1, 2, 3}) {
      const double lambda = 0.3 + 2.0 * pick.next_double();
      const double r = pick.next_double();
      const auto params = sp_params(model, dim, lambda, r);
      auto state = sp_init(params);
      Rng rng = derive_trial_rng(19, static_cast<std::uint64_t>(dim) * 100 +
                                         static_cast<std::uint64_t>(model));
      for (int step = 0; step < 1500 && state.total() > 0; ++step) {
        sp_step(state, params, rng);
        const ConsistencyReport report = state.check_consistency();
        INFO(report.detail);
        REQUIRE(report.ok);
      }
    }
  }
}

TEST_CASE("d=1 extent brackets the population and types stay intervals") {
  const auto params = sp_params(ModelId::S1, 1, 1.5, 0.3);
  auto state = sp_init(params);
  Rng rng = derive_trial_rng(23, 0);
  for (int step = 0; step < 4000 && state.total() > 0; ++step) {
    sp_step(state, params, rng);
    if (state.total() == 0) break;
    const auto [left, right] = state.extent();
    CHECK(left <= right);
    CHECK(state.total() <= static_cast<std::uint64_t>(right - left + 1));
  }
  // interval property is part of the consistency check; verified above
  CHECK(state.check_consistency().ok);
}

TEST_CASE("sqrt lower bound diagnostic on occupied-with-empty-neighbor sites") {
  SUBCASE("single pathogen") {
    const auto state = sp_init(sp_params(ModelId::S1, 2, 1.0, 0.5));
    CHECK(state.type_count_lower_bound_check());
  }
  SUBCASE("full 3x3 block: 8 boundary sites >= 3") {
    std::vector<std::pair<Site, std::uint64_t>> block;
    for (std::int32_t x = 0; x < 3; ++x)
      for (std::int32_t y = 0; y < 3; ++y)
        block.push_back({site2(x, y), static_cast<std::uint64_t>(1 + x * 3 + y)});
    const auto state =
        SpatialState::testing_state(sp_params(ModelId::S1, 2, 1.0, 0.5), block);
    CHECK(state.type_count_lower_bound_check());
  }
  SUBCASE("holds along a supercritical S1 d=2 trajectory") {
    const auto params = sp_params(ModelId::S1, 2, 0.5, 0.5);
    auto state = sp_init(params);
    Rng rng = derive_trial_rng(29, 0);
    for (int step = 0; step < 5000 && state.total() > 0; ++step) {
      sp_step(state, params, rng);
      if (state.total() > 0 && step % 50 == 0)
        CHECK(state.type_count_lower_bound_check());
    }
  }
  SUBCASE("rejects d=1") {
    const auto state = sp_init(sp_params(ModelId::S1, 1, 1.0, 0.5));
    CHECK_THROWS_AS(state.type_count_lower_bound_check(), std::logic_error);
  }
}

TEST_CASE("S2 at lambda <= 1/2d dies out") {
  const auto params = sp_params(ModelId::S2, 1, 0.45, 0.5);
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    Rng rng = derive_trial_rng(31, trial);
    CHECK(sp_run(params, rng).verdict.extinct());
  }
}

TEST_CASE("S1 survives at desk scale in d=2") {
  auto params = sp_params(ModelId::S1, 2, 0.5, 0.5);
  params.stop.max_time = 100.0;
  params.stop.max_population = 2000;
  int survivors = 0;
  for (std::uint64_t trial = 0; trial < 60; ++trial) {
    Rng rng = derive_trial_rng(37, trial);
    survivors += sp_run(params, rng).verdict.survived_proxy() ? 1 : 0;
  }
  CHECK(survivors > 0);
}

TEST_CASE("spatial outcomes replay identically from the same trial stream") {
  for (ModelId model : {ModelId::S1, ModelId::S2, ModelId::S3}) {
    auto params = sp_params(model, 1, 1.8, 0.35);
    params.stop.max_population = 400;
    params.stop.max_time = 60.0;
    RecordOptions rec;
    rec.series = true;
    rec.genealogy = true;
    Rng rng_a = derive_trial_rng(41, 3);
    Rng rng_b = derive_trial_rng(41, 3);
    const Outcome a = sp_run(params, rng_a, rec);
    const Outcome b = sp_run(params, rng_b, rec);
    CHECK(a == b);
  }
}

TEST_CASE("d=1 series carries the extent") {
  auto params = sp_params(ModelId::S1, 1, 1.2, 0.4);
  params.stop.max_time = 30.0;
  RecordOptions rec;
  rec.series = true;
  Rng rng = derive_trial_rng(43, 0);
  const Outcome out = sp_run(params, rng, rec);
  REQUIRE_FALSE(out.series.empty());
  for (const SeriesPoint& p : out.series) {
    REQUIRE(p.has_extent);
    CHECK(p.left <= p.right);
    CHECK(p.population <= static_cast<std::uint64_t>(p.right - p.left + 1));
  }
}

TEST_CASE("r=1 reduction: S2/S3 trajectories match the reference contact process") {
  // Two-sample KS at significance 0.001 against an attempt-based independent
  // implementation; the engines under test use exact boundary-pair rates.
  const int trials = 2000;

  SUBCASE("extinction times at subcritical lambda (d=1)") {
    const double lambda = 1.0;
    testsupport::ReferenceContactProcess reference{1, lambda};
    std::vector<double> ref_times;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
      Rng rng = derive_trial_rng(47, trial);
      const auto res = reference.run(rng, 1e9);
      REQUIRE(res.extinct);
      ref_times.push_back(res.time);
    }
    for (ModelId model : {ModelId::S2, ModelId::S3}) {
      auto params = sp_params(model, 1, lambda, 1.0);
      params.stop.max_time = 1e8;
      std::vector<double> engine_times;
      for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Rng rng = derive_trial_rng(53 + static_cast<std::uint64_t>(model), trial);
        const Outcome out = sp_run(params, rng);
        REQUIRE(out.verdict.extinct());
        engine_times.push_back(out.verdict.time);
      }
      CHECK(testsupport::ks_two_sample_pvalue(ref_times, engine_times) > 0.001);
    }
  }

  SUBCASE("population at a fixed time for supercritical lambda (d=1)") {
    const double lambda = 2.0, t_obs = 8.0;
    testsupport::ReferenceContactProcess reference{1, lambda};
    std::vector<double> ref_pop;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
      Rng rng = derive_trial_rng(59, trial);
      ref_pop.push_back(static_cast<double>(reference.run(rng, t_obs).population));
    }
    for (ModelId model : {ModelId::S2, ModelId::S3}) {
      auto params = sp_params(model, 1, lambda, 1.0);
      params.stop.max_time = t_obs;
      std::vector<double> engine_pop;
      for (std::uint64_t trial = 0; trial < trials; ++trial) {
        Rng rng = derive_trial_rng(61 + static_cast<std::uint64_t>(model), trial);
        engine_pop.push_back(static_cast<double>(sp_run(params, rng).final_population));
      }
      CHECK(testsupport::ks_two_sample_pvalue(ref_pop, engine_pop) > 0.001);
    }
  }

  SUBCASE("extinction times in d=2") {
    const double lambda = 0.25;
    testsupport::ReferenceContactProcess reference{2, lambda};
    std::vector<double> ref_times;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
      Rng rng = derive_trial_rng(67, trial);
      const auto res = reference.run(rng, 1e9);
      REQUIRE(res.extinct);
      ref_times.push_back(res.time);
    }
    auto params = sp_params(ModelId::S3, 2, lambda, 1.0);
    params.stop.max_time = 1e8;
    std::vector<double> engine_times;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
      Rng rng = derive_trial_rng(71, trial);
      const Outcome out = sp_run(params, rng);
      REQUIRE(out.verdict.extinct());
      engine_times.push_back(out.verdict.time);
    }
    CHECK(testsupport::ks_two_sample_pvalue(ref_times, engine_times) > 0.001);
  }
}

TEST_CASE("max type size tail decays roughly exponentially (S1, d=1)") {
  auto params = sp_params(ModelId::S1, 1, 1.0, 0.5);
  params.stop.max_time = 120.0;
  RecordOptions rec;
  rec.genealogy = true;
  std::vector<double> max_sizes;
  for (std::uint64_t trial = 0; trial < 150; ++trial) {
    Rng rng = derive_trial_rng(73, trial);
    const Outcome out = sp_run(params, rng, rec);
    for (const TypeRecord& type : out.genealogy->types)
      if (type.completed())
        max_sizes.push_back(static_cast<double>(type.max_size));
  }
  REQUIRE(max_sizes.size() > 1000);
  std::vector<double> a_values, log_tail;
  for (double a = 1.0;; a += 1.0) {
    const auto above = static_cast<double>(
        std::count_if(max_sizes.begin(), max_sizes.end(),
                      [a](double m) { return m > a; }));
    if (above < 10.0) break;
    a_values.push_back(a);
    log_tail.push_back(std::log(above / static_cast<double>(max_sizes.size())));
  }
  REQUIRE(a_values.size() >= 3);
  CHECK(testsupport::lsq_slope(a_values, log_tail) < 0.0);
}
