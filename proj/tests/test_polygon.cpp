#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "hypwalk/polygon.hpp"
#include "hypwalk/rng.hpp"
#include "support.hpp"

using namespace hypwalk;

namespace {

PolygonSpec regular_spec(int m, int k) {
  PolygonSpec s;
  s.m = m;
  s.central_angles.assign(m, kPi / m);
  s.weights.assign(m, 1.0);
  s.target_k = k;
  return s;
}

// weight sum phi(x...) = sum 1/(1+e^{2x}), the quantity the reductions
// may only increase
double weight_sum(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += 1.0 / (1.0 + std::exp(2.0 * x));
  return s;
}

PolygonSpec obtuse_m5_spec() {
  PolygonSpec s;
  s.m = 5;
  s.central_angles = {0.45, 0.75, 0.65, 0.55, kPi - 2.4};
  s.weights = {1.0, 0.8, 1.1, 0.95, 1.05};
  s.target_k = 1;
  return s;
}

PolygonSpec unmatched_m4_spec() {
  PolygonSpec s;
  s.m = 4;
  s.central_angles = {0.7, 0.9, 0.75, kPi - 0.7 - 0.9 - 0.75};
  s.weights = {1.0, 1.3, 0.8, 1.1};
  s.target_k = 1;
  return s;
}

void check_polygon_invariants(const SymmetricPolygon& P) {
  const int m = P.m;
  const int n = 2 * m;
  for (int i = 0; i < m; ++i) {
    REQUIRE(std::abs(P.vertices[i + m].z + P.vertices[i].z) < 1e-10);
    REQUIRE(std::abs(P.midpoints[i + m].z + P.midpoints[i].z) < 1e-10);
  }
  // interior angle at each vertex agrees with the two-apothem formula
  for (int i = 0; i < m; ++i) {
    double alpha = P.central_angles[i];
    double expect = vertex_angle(P.apothems[i], P.apothems[(i + 1) % m], alpha);
    REQUIRE(P.gamma[i] == Catch::Approx(expect).margin(1e-10));
    DiskPoint v = P.vertices[i];
    DiskPoint prev = P.midpoints[i];
    DiskPoint next = P.midpoints[(i + 1) % n];
    double measured = angle_at(v, prev, next);
    REQUIRE(measured == Catch::Approx(P.gamma[i]).margin(1e-8));
  }
  double fan = 0.0;
  for (double a : P.midpoint_alpha) fan += a;
  REQUIRE(fan == Catch::Approx(kPi).margin(1e-9));
  double area = (n - 2) * kPi - 2.0 * P.angle_sum_half();
  REQUIRE(area > 0.0);
  // midpoint q_i sits between vertices p_{i-1} and p_i on side i
  for (int i = 0; i < n; ++i) {
    DiskPoint a = P.vertices[(i + n - 1) % n];
    DiskPoint b = P.vertices[i];
    DiskPoint q = P.midpoints[i];
    REQUIRE(dist(a, q) + dist(q, b) - dist(a, b) < 1e-9);
    REQUIRE(std::abs(dist(a, q) - dist(q, b)) < 1e-9);
  }
}

}  // namespace

TEST_CASE("vertex angle formula and its z-form") {
  REQUIRE(vertex_angle(1.5285709, 1.5285709, kPi / 4) ==
          Catch::Approx(0.7853982).margin(1e-7));
  REQUIRE(vertex_angle(0.5, 0.5, kPi / 2) ==
          Catch::Approx(1.2958305).margin(1e-7));
  REQUIRE(vertex_angle(0.5, 0.5, kPi / 2) ==
          Catch::Approx(std::acos(std::sinh(0.5) * std::sinh(0.5))).margin(1e-12));

  try {
    vertex_angle(0.2, 0.2, 2.8);
    FAIL("expected SidesDoNotMeet");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::sides_do_not_meet);
  }

  RngStream rng(301, 0);
  for (int i = 0; i < 100; ++i) {
    double a1 = rng.next_double(0.3, 2.0);
    double a2 = rng.next_double(0.3, 2.0);
    double alpha = rng.next_double(0.2, 1.4);
    double gamma;
    try {
      gamma = vertex_angle(a1, a2, alpha);
    } catch (const Error&) {
      continue;
    }
    double z1 = std::tanh(a1), z2 = std::tanh(a2);
    double zform = (-std::cos(alpha) + z1 * z2) /
                   std::sqrt((1.0 - z1 * z1) * (1.0 - z2 * z2));
    REQUIRE(std::cos(gamma) == Catch::Approx(zform).margin(1e-12));
  }
}

TEST_CASE("building regular polygons hits the closed-form apothems") {
  SymmetricPolygon oct2 = build(regular_spec(4, 2));
  REQUIRE(oct2.k.has_value());
  REQUIRE(*oct2.k == 2);
  for (double a : oct2.apothems) {
    REQUIRE(a == Catch::Approx(1.5285709).margin(1e-7));
    REQUIRE(a == Catch::Approx(std::acosh(1.0 + std::sqrt(2.0))).margin(1e-9));
  }
  for (double g : oct2.gamma) REQUIRE(g == Catch::Approx(kPi / 4).margin(1e-9));
  check_polygon_invariants(oct2);

  SymmetricPolygon oct1 = build(regular_spec(4, 1));
  for (double a : oct1.apothems) {
    REQUIRE(a == Catch::Approx(1.2242262).margin(1e-7));
    REQUIRE(a == Catch::Approx(std::acosh(std::cos(kPi / 4) / std::sin(kPi / 8)))
                     .margin(1e-9));
  }
  for (double g : oct1.gamma) REQUIRE(g == Catch::Approx(kPi / 2).margin(1e-9));
  check_polygon_invariants(oct1);

  try {
    build(regular_spec(3, 1));
    FAIL("expected TargetUnreachable");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::target_unreachable);
  }

  // no target: the weights are taken verbatim as apothems
  PolygonSpec verbatim = regular_spec(4, 2);
  verbatim.target_k.reset();
  verbatim.weights.assign(4, std::acosh(1.0 + std::sqrt(2.0)));
  SymmetricPolygon direct = build(verbatim);
  REQUIRE(direct.k.has_value());
  REQUIRE(*direct.k == 2);
  for (double g : direct.gamma) REQUIRE(g == Catch::Approx(kPi / 4).margin(1e-9));
}

TEST_CASE("cycle order detection") {
  REQUIRE(check_cycle(build(regular_spec(4, 2))) == 2);
  REQUIRE(check_cycle(build(regular_spec(4, 1))) == 1);

  SymmetricPolygon P = build(regular_spec(4, 2));
  std::vector<std::pair<double, double>> frames;
  for (int i = 0; i < P.m; ++i)
    frames.emplace_back(P.apothems[i] + (i == 0 ? 0.05 : 0.0), P.foot_angles[i]);
  SymmetricPolygon bent = build_from_sides(frames);
  try {
    check_cycle(bent);
    FAIL("expected NoIntegerCycle");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::no_integer_cycle);
  }
  REQUIRE_FALSE(bent.k.has_value());
}

TEST_CASE("side pairings translate opposite sides onto each other") {
  SymmetricPolygon P = build(regular_spec(4, 2));
  auto g = side_pairings(P);
  auto len = pairing_lengths(P);
  REQUIRE(g.size() == 8);
  REQUIRE(len.size() == 8);
  for (int i = 0; i < 8; ++i) REQUIRE(len[i] == Catch::Approx(3.0571418).margin(1e-7));
  for (int i = 0; i < 4; ++i) REQUIRE(len[i] == len[i + 4]);

  for (int i = 0; i < 8; ++i)
    REQUIRE(approx_equal(compose(g[i], g[(i + 4) % 8]), identity_isometry(), 1e-12));

  RngStream rng(302, 0);
  for (int trial = 0; trial < 12; ++trial) {
    int m = 3 + static_cast<int>(rng.next_double() * 3.0);
    int k = (m == 3) ? 2 : 1 + static_cast<int>(rng.next_double() * 2.0);
    SymmetricPolygon Q = sample_polygon(m, k, rng);
    auto gq = side_pairings(Q);
    const int n = 2 * m;
    for (int i = 0; i < n; ++i) {
      REQUIRE(translation_length(gq[i]) ==
              Catch::Approx(2.0 * Q.midpoint_dist[i % m]).margin(1e-9));
      // endpoints of the opposite side land on this side's endpoints
      DiskPoint e1 = apply(gq[i], Q.vertices[(i + m + n - 1) % n]);
      DiskPoint e2 = apply(gq[i], Q.vertices[(i + m) % n]);
      DiskPoint t1 = Q.vertices[(i + n - 1) % n];
      DiskPoint t2 = Q.vertices[i];
      double direct = std::max(dist(e1, t1), dist(e2, t2));
      double swapped = std::max(dist(e1, t2), dist(e2, t1));
      REQUIRE(std::min(direct, swapped) < 1e-9);
    }
  }
}

TEST_CASE("neutralizing pair search") {
  auto acute = neutralizing_pairs(build(regular_spec(4, 2)));
  REQUIRE(acute.obtuse.empty());
  REQUIRE(acute.pairs.empty());
  REQUIRE(acute.disjoint);

  auto decagon = neutralizing_pairs(build(regular_spec(5, 1)));
  REQUIRE(decagon.obtuse.empty());
  REQUIRE(decagon.disjoint);

  SymmetricPolygon P = build(obtuse_m5_spec());
  double expect_gamma[5] = {2.1469453479, 1.0797871964, 1.0825436000,
                            1.5791801993, 0.3947289635};
  for (int i = 0; i < 5; ++i)
    REQUIRE(P.gamma[i] == Catch::Approx(expect_gamma[i]).margin(1e-9));
  auto rep = neutralizing_pairs(P);
  REQUIRE(rep.obtuse == std::vector<int>{0, 3, 5, 8});
  REQUIRE(rep.unmatched.empty());
  REQUIRE(rep.disjoint);
  std::set<std::pair<int, int>> got(rep.pairs.begin(), rep.pairs.end());
  std::set<std::pair<int, int>> want{{0, 9}, {5, 4}, {3, 2}, {8, 7}};
  REQUIRE(got == want);

  auto stuck = neutralizing_pairs(build(unmatched_m4_spec()));
  REQUIRE(stuck.obtuse == std::vector<int>{0, 2, 4, 6});
  REQUIRE(stuck.unmatched == std::vector<int>{2, 6});
  REQUIRE_FALSE(stuck.disjoint);
}

TEST_CASE("pentagon surgery keeps the new angle at most a right angle") {
  // the regular pentagon with five right angles: the boundary case C+D=pi
  const double r = 0.397975426785;
  std::vector<DiskPoint> v;
  for (int j = 0; j < 5; ++j)
    v.emplace_back(std::polar(r, 2.0 * kPi * j / 5));
  for (int j = 0; j < 5; ++j)
    REQUIRE(angle_at(v[j], v[(j + 4) % 5], v[(j + 1) % 5]) ==
            Catch::Approx(kPi / 2).margin(1e-9));
  auto boundary = pentagon_surgery(v[0], v[1], v[2], v[3], v[4]);
  REQUIRE(boundary.delta == Catch::Approx(kPi / 2).margin(1e-9));

  // a generic instance, frozen: turtle walk with angles 1.3 and 1.5
  {
    DiskPoint O(0.0, 0.0);
    Isometry M = identity_isometry();
    DiskPoint B = O;
    M = compose(M, translation_x(1.0));
    DiskPoint C = apply(M, O);
    M = compose(M, rotation_about_origin(kPi - 1.3));
    M = compose(M, translation_x(0.9));
    DiskPoint D = apply(M, O);
    M = compose(M, rotation_about_origin(kPi - 1.5));
    M = compose(M, translation_x(1.1));
    DiskPoint E = apply(M, O);
    M = compose(M, rotation_about_origin(kPi / 2));
    DiskPoint N = apply(compose(M, translation_x(0.1)), O);
    auto apex = intersect(geodesic_through(E, N), geodesic_from_direction(B, kPi / 2));
    REQUIRE(apex.has_value());
    DiskPoint A = *apex;
    REQUIRE(A.re() == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(A.im() == Catch::Approx(0.4142725265).margin(1e-9));
    auto out = pentagon_surgery(A, B, C, D, E);
    REQUIRE(out.f.re() == Catch::Approx(0.4164007287).margin(1e-9));
    REQUIRE(out.f.im() == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(out.g.re() == Catch::Approx(0.4769093895).margin(1e-9));
    REQUIRE(out.g.im() == Catch::Approx(0.3412570643).margin(1e-9));
    REQUIRE(out.delta == Catch::Approx(1.2269167222).margin(1e-9));
    // the cut lands between E and D, and meets BC at a right angle
    REQUIRE(dist(E, out.g) + dist(out.g, D) - dist(E, D) < 1e-9);
    REQUIRE(angle_at(out.f, B, out.g) == Catch::Approx(kPi / 2).margin(1e-9));
  }

  // guard: angle C beyond a right angle is rejected
  {
    SymmetricPolygon P = build(regular_spec(4, 1));
    try {
      pentagon_surgery(P.vertices[0], P.vertices[1], P.vertices[2],
                       P.vertices[3], P.vertices[4]);
      FAIL("expected PreconditionViolated");
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::precondition_violated);
    }
  }

  RngStream rng(303, 0);
  for (int i = 0; i < 300; ++i) {
    auto pent = testsupport::sample_pentagon(rng);
    auto out = pentagon_surgery(pent.a, pent.b, pent.c, pent.d, pent.e);
    REQUIRE(out.delta <= kPi / 2 + 1e-9);
  }
}

TEST_CASE("reducing to acute angles preserves the weight-sum bound") {
  SymmetricPolygon oct2 = build(regular_spec(4, 2));
  SymmetricPolygon same = reduce_to_acute(oct2);
  REQUIRE(same.m == oct2.m);
  for (int i = 0; i < 4; ++i) {
    REQUIRE(same.apothems[i] == Catch::Approx(oct2.apothems[i]).margin(1e-12));
    REQUIRE(same.gamma[i] == Catch::Approx(oct2.gamma[i]).margin(1e-12));
  }

  SymmetricPolygon P = build(obtuse_m5_spec());
  SymmetricPolygon R = reduce_to_acute(P);
  REQUIRE(R.m == P.m);
  for (double gm : R.gamma) REQUIRE(gm <= kPi / 2 + 1e-12);
  REQUIRE(weight_sum(P.midpoint_dist) <= weight_sum(R.apothems) + 1e-12);
  check_polygon_invariants(R);

  try {
    reduce_to_acute(build(unmatched_m4_spec()));
    FAIL("expected DualTrickRequired");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::dual_trick_required);
  }
}

TEST_CASE("dual polygon of a total-angle-4pi polygon") {
  SymmetricPolygon P = build(regular_spec(5, 1));
  DualPolygon D = dual(P);
  REQUIRE(D.m == 5);
  REQUIRE(D.closure_residual < 1e-8);
  double angle_total = 0.0;
  for (int i = 0; i < 5; ++i) {
    REQUIRE(D.side_lengths[i] == Catch::Approx(3.2338434).margin(1e-6));
    REQUIRE(D.side_lengths[i] ==
            Catch::Approx(2.0 * std::acosh(std::cos(kPi / 5) / std::sin(kPi / 10)))
                .margin(1e-9));
    REQUIRE(D.angles[i] == Catch::Approx(kPi / 5).margin(1e-8));
    angle_total += D.angles[i];
  }
  REQUIRE(angle_total == Catch::Approx(kPi).margin(1e-8));

  // the weight sum is basepoint independent: primal and dual agree
  double primal = 0.0;
  for (double l : pairing_lengths(P)) primal += 1.0 / (1.0 + std::exp(l));
  double dual_sum = 0.0;
  for (double s : D.side_lengths) dual_sum += 2.0 / (1.0 + std::exp(s));
  REQUIRE(primal == Catch::Approx(0.37911814).margin(1e-7));
  REQUIRE(dual_sum == Catch::Approx(primal).margin(1e-10));

  // every primal vertex lands on the shared basepoint image: its distance
  // to each dual side midpoint is half the corresponding side length
  for (int i = 0; i < 5; ++i)
    REQUIRE(dist(D.basepoint, D.side_mids[i]) ==
            Catch::Approx(0.5 * P.side_length(i)).margin(1e-8));

  try {
    dual(build(regular_spec(4, 2)));
    FAIL("expected PreconditionAngleSum");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::precondition_angle_sum);
  }
}

TEST_CASE("moving the basepoint preserves the weight sum") {
  // regular decagon: redistribution lands back on the regular polygon
  SymmetricPolygon P = build(regular_spec(5, 1));
  Redistribution R = redistribute_basepoint(dual(P));
  REQUIRE(R.polygon.m == 5);
  for (double a : R.polygon.apothems)
    REQUIRE(a == Catch::Approx(1.6169216675).margin(1e-7));
  for (double g : R.polygon.gamma)
    REQUIRE(g == Catch::Approx(2.0 * kPi / 5).margin(1e-8));

  // irregular polygon with unmatched obtuse angles: the full pipeline
  SymmetricPolygon Q = build(unmatched_m4_spec());
  double sigma_before = 0.0;
  for (double l : pairing_lengths(Q)) sigma_before += 1.0 / (1.0 + std::exp(l));
  Redistribution moved = redistribute_basepoint(dual(Q));
  double sigma_after = 0.0;
  for (double l : pairing_lengths(moved.polygon))
    sigma_after += 1.0 / (1.0 + std::exp(l));
  REQUIRE(sigma_before == Catch::Approx(0.623656870993).margin(1e-9));
  REQUIRE(sigma_after == Catch::Approx(sigma_before).margin(1e-10));
  auto rep = neutralizing_pairs(moved.polygon);
  REQUIRE(rep.disjoint);
  REQUIRE(rep.obtuse.size() <= 4);
  SymmetricPolygon reduced = reduce_to_acute(moved.polygon);
  for (double g : reduced.gamma) REQUIRE(g <= kPi / 2 + 1e-12);

  // random roundtrips preserve the weight sum
  RngStream rng(304, 0);
  for (int i = 0; i < 25; ++i) {
    int m = 4 + static_cast<int>(rng.next_double() * 3.0);
    SymmetricPolygon S = sample_polygon(m, 1, rng);
    double before = 0.0;
    for (double l : pairing_lengths(S)) before += 1.0 / (1.0 + std::exp(l));
    Redistribution round = redistribute_basepoint(dual(S));
    double after = 0.0;
    for (double l : pairing_lengths(round.polygon))
      after += 1.0 / (1.0 + std::exp(l));
    REQUIRE(after == Catch::Approx(before).margin(1e-10));
  }

  // degenerate needle-shaped dual: the guard must fire, not silently pass
  DualPolygon N;
  N.m = 3;
  N.side_lengths = {4.0, 4.0, 7.98};
  N.angles = {0.02, 0.02, 3.10};
  N.vertices = {DiskPoint(0.0, 0.0), DiskPoint(0.96, 0.0), DiskPoint(-0.96, 0.0)};
  N.side_mids = {DiskPoint(0.5, 0.001), DiskPoint(0.0, -0.001),
                 DiskPoint(-0.5, 0.001)};
  N.basepoint = DiskPoint(0.0, 0.0005);
  try {
    redistribute_basepoint(N);
    FAIL("expected ReconstructionFailed");
  } catch (const Error& e) {
    REQUIRE(e.code() == ErrorCode::reconstruction_failed);
  }
}

TEST_CASE("random polygons satisfy the structural invariants") {
  RngStream rng(305, 0);
  for (int i = 0; i < 60; ++i) {
    int m = 3 + static_cast<int>(rng.next_double() * 4.0);
    int k = 1 + static_cast<int>(rng.next_double() * 3.0);
    if (m == 3 && k == 1) k = 2;
    SymmetricPolygon P = sample_polygon(m, k, rng);
    REQUIRE(P.k.has_value());
    REQUIRE(*P.k == k);
    REQUIRE(P.angle_sum_half() == Catch::Approx(2.0 * kPi / k).margin(1e-8));
    check_polygon_invariants(P);
    auto g = side_pairings(P);
    for (int j = 0; j < 2 * m; ++j)
      REQUIRE(translation_length(g[j]) ==
              Catch::Approx(2.0 * P.midpoint_dist[j % m]).margin(1e-9));
  }

  // the half angle sum decreases strictly as the apothem scale grows
  PolygonSpec s;
  s.m = 4;
  s.central_angles = {0.6, 0.8, 0.9, kPi - 2.3};
  s.weights = {1.0, 1.2, 0.9, 1.1};
  double prev = 4.0 * kPi;
  for (double t = 0.2; t < 2.4; t += 0.2) {
    PolygonSpec scaled = s;
    for (double& w : scaled.weights) w *= t;
    double sum = build(scaled).angle_sum_half();
    REQUIRE(sum < prev);
    prev = sum;
  }
}

TEST_CASE("side frames round trip through the frame builder") {
  RngStream rng(306, 0);
  for (int i = 0; i < 20; ++i) {
    int m = 3 + static_cast<int>(rng.next_double() * 4.0);
    SymmetricPolygon P = sample_polygon(m, 2, rng);
    std::vector<std::pair<double, double>> frames;
    for (int j = 0; j < m; ++j)
      frames.emplace_back(P.apothems[j], P.foot_angles[j]);
    SymmetricPolygon Q = build_from_sides(frames);
    REQUIRE(Q.m == P.m);
    for (int j = 0; j < m; ++j) {
      REQUIRE(Q.apothems[j] == Catch::Approx(P.apothems[j]).margin(1e-12));
      REQUIRE(Q.gamma[j] == Catch::Approx(P.gamma[j]).margin(1e-10));
    }
  }
}
