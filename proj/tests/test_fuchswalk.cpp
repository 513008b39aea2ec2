#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hypwalk/fuchswalk.hpp"
#include "hypwalk/polygon.hpp"

using namespace hypwalk;

namespace {

SymmetricPolygon octagon_k2() {
  PolygonSpec spec;
  spec.m = 4;
  spec.target_k = 2;
  spec.central_angles.assign(4, kPi / 4.0);
  spec.weights.assign(4, 1.0);
  return build(spec);
}

StepDistribution single_generator_measure() {
  std::vector<double> p(8, 0.0);
  p[0] = 1.0;
  return step_distribution(StepKind::free_group, p);
}

}  // namespace

TEST_CASE("deterministic single-generator walk runs along the axis") {
  SymmetricPolygon P = octagon_k2();
  auto gens = side_pairings(P);
  auto lens = pairing_lengths(P);
  auto sample = simulate(gens, single_generator_measure(), 10, 3, 5u);

  REQUIRE(sample.paths() == 3);
  for (long i = 0; i < 3; ++i) {
    REQUIRE(sample.distance[i] == Catch::Approx(10.0 * lens[0]).margin(1e-9));
    REQUIRE(sample.distance[i] == Catch::Approx(30.571418).margin(1e-5));
    REQUIRE(sample.boundary_angle[i] >= 0.0);
    REQUIRE(sample.boundary_angle[i] < 2.0 * kPi);
    double off_axis = std::min(sample.boundary_angle[i],
                               2.0 * kPi - sample.boundary_angle[i]);
    REQUIRE(off_axis < 1e-9);
  }

  auto drift = estimate_drift(sample);
  REQUIRE(drift.drift == Catch::Approx(lens[0]).margin(1e-9));
  REQUIRE(drift.ci_half_width == 0.0);

  auto hist = boundary_histogram(sample, 16);
  REQUIRE(hist.counts[0] == 3);
  REQUIRE(hist.quality_ok);
}

TEST_CASE("simulation is reproducible and worker-count independent") {
  SymmetricPolygon P = octagon_k2();
  auto gens = side_pairings(P);
  auto mu = uniform_step_distribution(StepKind::free_group, 8);

  auto s1 = simulate(gens, mu, 100, 500, 42u, 1);
  auto s8 = simulate(gens, mu, 100, 500, 42u, 8);
  auto s1b = simulate(gens, mu, 100, 500, 42u, 1);
  for (long i = 0; i < 500; ++i) {
    REQUIRE(s1.distance[i] == s8.distance[i]);
    REQUIRE(s1.boundary_angle[i] == s8.boundary_angle[i]);
    REQUIRE(s1.terminal[i].a == s8.terminal[i].a);
    REQUIRE(s1.terminal[i].b == s8.terminal[i].b);
    REQUIRE(s1.distance[i] == s1b.distance[i]);
  }

  REQUIRE(simulate(gens, mu, 100, 0, 42u).paths() == 0);

  // zero steps leave every path at the origin
  auto zero = simulate(gens, mu, 0, 5, 1u);
  REQUIRE(zero.distance[0] == 0.0);
  REQUIRE(zero.boundary_angle[0] == 0.0);
}

TEST_CASE("entropy upper bounds from convolution powers") {
  SymmetricPolygon P = octagon_k2();
  auto gens = side_pairings(P);
  auto mu = uniform_step_distribution(StepKind::free_group, 8);

  auto bounds = entropy_upper_bounds(mu, gens, 5);
  REQUIRE(bounds.size() == 5);
  REQUIRE(bounds[0] == Catch::Approx(std::log(8.0)).margin(1e-12));
  REQUIRE(bounds[0] == Catch::Approx(2.0794415).margin(1e-7));
  // 8 of the 64 two-step products collapse to the identity, 56 survive
  REQUIRE(bounds[1] == Catch::Approx(45.0 / 16.0 * std::log(2.0)).margin(1e-9));
  REQUIRE(bounds[1] == Catch::Approx(1.9494764).margin(1e-7));
  for (size_t i = 1; i < bounds.size(); ++i) REQUIRE(bounds[i] <= bounds[i - 1] + 1e-9);
  // subadditivity of H(mu^n) across all computed splits
  for (size_t i = 1; i < bounds.size(); ++i)
    for (size_t j = 1; i + j <= bounds.size(); ++j)
      REQUIRE((i + j) * bounds[i + j - 1] <=
              i * bounds[i - 1] + j * bounds[j - 1] + 1e-9);

  auto det = entropy_upper_bounds(single_generator_measure(), gens, 4);
  for (double b : det) REQUIRE(b == 0.0);

  try {
    entropy_upper_bounds(mu, gens, 12);
    FAIL("expected SupportTooLarge");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::support_too_large);
  }
}

TEST_CASE("drift of the symmetric one-pair walk decays with the horizon") {
  SymmetricPolygon P = octagon_k2();
  auto gens = side_pairings(P);
  std::vector<double> p(8, 0.0);
  p[0] = 0.5;
  p[4] = 0.5;
  auto mu = step_distribution(StepKind::free_group, p);
  double prev = 1e9;
  for (long n : {50L, 200L, 800L}) {
    auto d = estimate_drift(simulate(gens, mu, n, 4000, 99u));
    REQUIRE(d.drift < prev);
    prev = d.drift;
  }
}

TEST_CASE("uniform octagon walk: drift bounds and boundary histogram") {
  SymmetricPolygon P = octagon_k2();
  auto gens = side_pairings(P);
  auto lens = pairing_lengths(P);
  auto mu = uniform_step_distribution(StepKind::free_group, 8);

  auto sample = simulate(gens, mu, 200, 20000, 777u);
  auto drift = estimate_drift(sample);
  REQUIRE(drift.drift == Catch::Approx(1.6983730).margin(1e-6));
  REQUIRE(drift.ci_half_width == Catch::Approx(0.0016083).margin(1e-6));
  REQUIRE(drift.drift > 0.0);
  REQUIRE(drift.drift <= lens[0]);

  auto hist = boundary_histogram(sample, 16);
  REQUIRE(hist.quality_ok);
  REQUIRE(hist.far_fraction >= 0.95);
  double fsum = 0.0;
  for (double f : hist.frequencies) fsum += f;
  REQUIRE(fsum == Catch::Approx(1.0).margin(1e-12));

  // central symmetry: rotating the boundary by pi preserves the law
  for (int k = 0; k < 8; ++k) {
    double a = static_cast<double>(hist.counts[k]);
    double b = static_cast<double>(hist.counts[k + 8]);
    double z = std::abs(a - b) / std::sqrt(std::max(1.0, a + b));
    REQUIRE(z <= 4.0);
  }

  // per-path distances grow by at most one step length
  auto sa = simulate(gens, mu, 120, 300, 31u);
  auto sb = simulate(gens, mu, 121, 300, 31u);
  double max_len = *std::max_element(lens.begin(), lens.end());
  for (long i = 0; i < 300; ++i)
    REQUIRE(sb.distance[i] <= sa.distance[i] + max_len + 1e-9);
}

TEST_CASE("dimension report composes drift, entropy, and the criterion") {
  SymmetricPolygon P = octagon_k2();
  auto mu = uniform_step_distribution(StepKind::free_group, 8);
  auto r = dimension_report(P, mu, 200, 2000, 2024u, 2);

  REQUIRE(r.volume_growth == 1.0);
  REQUIRE(r.criterion.verdict == Verdict::singular);
  REQUIRE(r.criterion.sigma == Catch::Approx(0.35928112).margin(1e-7));
  REQUIRE(r.entropy_bounds.size() == 2);
  REQUIRE(r.drift.drift == Catch::Approx(1.6922057022).margin(1e-9));
  REQUIRE(r.dimension_bound ==
          Catch::Approx((45.0 / 16.0 * std::log(2.0)) / r.drift.drift).margin(1e-12));
  REQUIRE(r.dimension_bound == Catch::Approx(1.1520327835).margin(1e-9));

  auto rdet = dimension_report(P, single_generator_measure(), 50, 100, 3u, 2);
  REQUIRE(rdet.dimension_bound == 0.0);
}

TEST_CASE("simulation guards") {
  SymmetricPolygon P = octagon_k2();
  auto gens = side_pairings(P);
  auto mu = uniform_step_distribution(StepKind::free_group, 8);

  try {
    simulate(std::vector<Isometry>(3, identity_isometry()), mu, 5, 5, 1u);
    FAIL("expected SymbolMismatch");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::symbol_mismatch);
  }

  try {
    dimension_report(P, uniform_step_distribution(StepKind::involutive, 8), 50, 100, 1u, 2);
    FAIL("expected SymbolMismatch");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::symbol_mismatch);
  }

  try {
    estimate_drift(simulate(gens, mu, 10, 1, 1u));
    FAIL("expected InsufficientSample");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::insufficient_sample);
  }

  try {
    estimate_drift(simulate(gens, mu, 0, 5, 1u));
    FAIL("expected InsufficientSample");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::insufficient_sample);
  }
}
