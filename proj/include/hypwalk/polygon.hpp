#pragma once

// Centrally symmetric hyperbolic polygons.
//
// A polygon here is a compact convex 2m-gon in the Poincare disk whose
// vertex set is invariant under z -> -z.  It is stored through the m
// representative sides lying in an angular half-window: side i is the
// geodesic at distance apothem[i] from the origin whose closest point
// (the foot) sits at angle foot_angle[i]; side i+m is the antipode.
// Everything else (vertices, edge midpoints, interior angles) is derived
// from that description.
//
// Index conventions, all 0-based.  Side i joins vertex i-1 to vertex i
// (side 0 starts at the antipode of vertex m-1).  central_angle[i] is the
// origin angle between the feet of sides i and i+1; midpoint_alpha[i] is
// the origin angle between edge midpoints q_i and q_{i+1}; gamma[i] is
// the interior angle at vertex i.  All three lists have m entries and
// repeat around the antipodal half; the central and midpoint angle lists
// each sum to pi.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "error.hpp"
#include "hyperbolic.hpp"
#include "rng.hpp"

namespace hypwalk {

inline constexpr double kCycleSolveTol = 1e-11;
inline constexpr double kCycleCheckTol = 1e-8;
inline constexpr int kMaxCycleOrder = 64;

// Interior angle at the vertex shared by two adjacent sides with apothems
// a1, a2 whose feet subtend the central angle alpha.  Derived from the
// quadrilateral (origin, foot1, vertex, foot2), which has right angles at
// both feet.
inline double vertex_angle(double a1, double a2, double alpha) {
  require(a1 > 0.0 && a2 > 0.0, ErrorCode::invalid_argument,
          "vertex_angle: apothems must be positive");
  require(alpha > 0.0 && alpha < kPi, ErrorCode::invalid_argument,
          "vertex_angle: central angle must lie in (0, pi)");
  double c = -std::cosh(a1) * std::cosh(a2) * std::cos(alpha) +
             std::sinh(a1) * std::sinh(a2);
  if (c >= 1.0 - 1e-12)
    fail(ErrorCode::sides_do_not_meet,
         "vertex_angle: sides diverge (cos would be " + std::to_string(c) + ")");
  if (c <= -1.0 + 1e-12)
    fail(ErrorCode::degenerate_angle,
         "vertex_angle: vertex angle collapses to pi");
  return std::acos(c);
}

// Geodesic at distance `apothem` from the origin, foot at angle `phi`.
// Its ideal endpoints sit symmetrically about phi at offset
// arccos(tanh apothem).
inline Geodesic side_geodesic(double apothem, double phi) {
  require(apothem > 0.0, ErrorCode::invalid_argument,
          "side_geodesic: apothem must be positive");
  double beta = std::acos(std::tanh(apothem));
  return Geodesic(phi - beta, phi + beta);
}

struct PolygonSpec {
  int m = 0;
  std::vector<double> central_angles;  // m entries, positive, sum pi
  std::vector<double> weights;         // m positive apothem weights
  std::optional<int> target_k;         // solve for angle sum 2*pi/k
  std::optional<double> target_angle_sum;  // or an explicit half-sum target
};

struct SymmetricPolygon {
  int m = 0;
  std::optional<int> k;                 // angle-cycle order, if integral
  std::vector<double> apothems;         // m
  std::vector<double> foot_angles;      // m, foot_angles[0] == 0
  std::vector<double> central_angles;   // m, feet convention
  std::vector<double> gamma;            // m interior angles (period m)
  std::vector<double> midpoint_dist;    // m, dist(origin, q_i)
  std::vector<double> midpoint_alpha;   // m, angles between q_i and q_{i+1}
  std::vector<DiskPoint> vertices;      // 2m, vertices[i+m] = -vertices[i]
  std::vector<DiskPoint> midpoints;     // 2m edge midpoints

  Geodesic side(int i) const {
    int j = i % (2 * m);
    if (j < 0) j += 2 * m;
    Geodesic g = side_geodesic(apothems[j % m], foot_angles[j % m]);
    return j < m ? g : g.negated();
  }

  double side_length(int i) const {
    int j = i % (2 * m);
    if (j < 0) j += 2 * m;
    const DiskPoint& a = vertices[(j + 2 * m - 1) % (2 * m)];
    return 2.0 * dist(a, midpoints[j]);
  }

  double angle_sum_half() const {
    double s = 0.0;
    for (double g : gamma) s += g;
    return s;
  }
};

namespace detail {

// Assembles the full polygon data from representative side frames.
// Frames must already be normalized: foot angles strictly increasing in
// [0, pi) with foot_angles[0] == 0.
inline SymmetricPolygon assemble(std::vector<double> apothems,
                                 std::vector<double> feet) {
  const int m = static_cast<int>(apothems.size());
  SymmetricPolygon P;
  P.m = m;
  P.apothems = std::move(apothems);
  P.foot_angles = std::move(feet);

  P.central_angles.resize(m);
  for (int i = 0; i < m; ++i) {
    double next = (i + 1 < m) ? P.foot_angles[i + 1] : P.foot_angles[0] + kPi;
    P.central_angles[i] = next - P.foot_angles[i];
    require(P.central_angles[i] > 1e-12, ErrorCode::degenerate_vertex,
            "polygon: consecutive side feet coincide");
  }

  std::vector<Geodesic> sides;
  sides.reserve(m + 1);
  for (int i = 0; i < m; ++i)
    sides.push_back(side_geodesic(P.apothems[i], P.foot_angles[i]));
  sides.push_back(sides[0].negated());

  std::vector<DiskPoint> verts;
  verts.reserve(2 * m);
  for (int i = 0; i < m; ++i) {
    auto hit = intersect(sides[i], sides[i + 1]);
    if (!hit)
      fail(ErrorCode::sides_do_not_meet,
           "polygon: sides " + std::to_string(i) + " and " +
               std::to_string(i + 1) + " do not intersect");
    verts.push_back(*hit);
  }
  for (int i = 0; i < m; ++i)
    verts.push_back(DiskPoint(-verts[i].z));
  P.vertices = std::move(verts);

  P.midpoints.reserve(2 * m);
  for (int i = 0; i < 2 * m; ++i) {
    const DiskPoint& prev = P.vertices[(i + 2 * m - 1) % (2 * m)];
    P.midpoints.push_back(midpoint(prev, P.vertices[i]));
  }

  P.gamma.resize(m);
  P.midpoint_dist.resize(m);
  P.midpoint_alpha.resize(m);
  // The measured vertex angle has to agree with the right-angled
  // quadrilateral relation; a mismatch means the sides do not bound a
  // convex symmetric polygon in the stated order.  Vertex coordinates
  // come out of a near-cancelling fixed-point formula whose error grows
  // like eps over the squared polygon scale, so the comparison loosens
  // accordingly for very small polygons.
  double min_apothem = *std::min_element(P.apothems.begin(), P.apothems.end());
  double gamma_tol = 1e-10 + 4e-13 / (min_apothem * min_apothem);
  double half_sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const DiskPoint& prev = P.vertices[(i + 2 * m - 1) % (2 * m)];
    const DiskPoint& next = P.vertices[i + 1];
    double measured = angle_at(P.vertices[i], prev, next);
    P.gamma[i] = vertex_angle(P.apothems[i], P.apothems[(i + 1) % m],
                              P.central_angles[i]);
    require(std::abs(std::cos(measured) - std::cos(P.gamma[i])) <= gamma_tol,
            ErrorCode::degenerate_vertex,
            "polygon: vertex angle inconsistent with side placement");
    require(P.gamma[i] > 1e-12 && P.gamma[i] < kPi - 1e-12,
            ErrorCode::degenerate_vertex, "polygon: flat or empty vertex");
    P.midpoint_dist[i] = dist(DiskPoint(Complex(0, 0)), P.midpoints[i]);
    Complex qa = P.midpoints[i].z;
    Complex qb = (i + 1 < m) ? P.midpoints[i + 1].z : -P.midpoints[0].z;
    P.midpoint_alpha[i] = wrap_two_pi(std::arg(qb) - std::arg(qa));
    require(P.midpoint_alpha[i] > 0.0 && P.midpoint_alpha[i] < kPi,
            ErrorCode::degenerate_vertex,
            "polygon: midpoint fan is not monotone");
    half_sum += P.gamma[i];
  }
  require(half_sum < (m - 1) * kPi - 1e-12, ErrorCode::degenerate_vertex,
          "polygon: angle sum leaves no hyperbolic area");
  return P;
}

}  // namespace detail

// Builds the polygon bounded by the given side frames (apothem, foot
// angle) and their antipodes.  Frames are reduced to the half-window
// [0, pi), sorted, and rotated so the first foot lands at angle zero.
inline SymmetricPolygon build_from_sides(
    std::vector<std::pair<double, double>> frames) {
  const int m = static_cast<int>(frames.size());
  require(m >= 2, ErrorCode::invalid_argument,
          "build_from_sides: need at least two representative sides");
  for (auto& f : frames) {
    require(f.first > 0.0, ErrorCode::invalid_argument,
            "build_from_sides: apothems must be positive");
    double phi = wrap_two_pi(f.second);
    if (phi >= kPi) phi -= kPi;  // swap in the antipodal representative
    f.second = phi;
  }
  std::sort(frames.begin(), frames.end(),
            [](const auto& x, const auto& y) { return x.second < y.second; });
  std::vector<double> apothems(m), feet(m);
  double base = frames[0].second;
  for (int i = 0; i < m; ++i) {
    apothems[i] = frames[i].first;
    feet[i] = frames[i].second - base;
  }
  return detail::assemble(std::move(apothems), std::move(feet));
}

// Angle-cycle order: the k with sum(gamma) == 2*pi/k, if any.
inline int check_cycle(const SymmetricPolygon& P) {
  double s = P.angle_sum_half();
  for (int k = 1; k <= kMaxCycleOrder; ++k)
    if (std::abs(s - 2.0 * kPi / k) <= kCycleCheckTol) return k;
  fail(ErrorCode::no_integer_cycle,
       "check_cycle: angle sum " + std::to_string(s) +
           " is not 2*pi/k for k <= " + std::to_string(kMaxCycleOrder));
}

// Builds a polygon from a spec.  With a target (either an integer cycle
// order k or an explicit angle-sum target for the m representative
// vertices) the common apothem scale is solved by bisection; the angle
// sum decreases strictly from the Euclidean limit (m-1)*pi as the scale
// grows.
inline SymmetricPolygon build(const PolygonSpec& spec) {
  const int m = spec.m;
  require(m >= 2, ErrorCode::invalid_argument, "build: m must be at least 2");
  require(static_cast<int>(spec.central_angles.size()) == m,
          ErrorCode::invalid_argument, "build: need m central angles");
  require(static_cast<int>(spec.weights.size()) == m,
          ErrorCode::invalid_argument, "build: need m apothem weights");
  double alpha_sum = 0.0;
  for (double a : spec.central_angles) {
    require(a > 0.0, ErrorCode::invalid_argument,
            "build: central angles must be positive");
    alpha_sum += a;
  }
  require(std::abs(alpha_sum - kPi) <= 1e-12, ErrorCode::invalid_argument,
          "build: central angles must sum to pi");
  for (double w : spec.weights)
    require(w > 0.0, ErrorCode::invalid_argument,
            "build: weights must be positive");
  require(!(spec.target_k && spec.target_angle_sum),
          ErrorCode::invalid_argument,
          "build: give either target_k or target_angle_sum, not both");

  std::vector<double> feet(m, 0.0);
  for (int i = 1; i < m; ++i) feet[i] = feet[i - 1] + spec.central_angles[i - 1];

  auto at_scale = [&](double t) {
    std::vector<double> ap(m);
    for (int i = 0; i < m; ++i) ap[i] = t * spec.weights[i];
    return detail::assemble(std::move(ap), feet);
  };

  if (!spec.target_k && !spec.target_angle_sum) {
    SymmetricPolygon P = at_scale(1.0);
    double s = P.angle_sum_half();
    for (int k = 1; k <= kMaxCycleOrder; ++k)
      if (std::abs(s - 2.0 * kPi / k) <= kCycleCheckTol) P.k = k;
    return P;
  }

  double target;
  if (spec.target_k) {
    require(*spec.target_k >= 1 && *spec.target_k <= kMaxCycleOrder,
            ErrorCode::invalid_argument, "build: k out of range");
    target = 2.0 * kPi / *spec.target_k;
  } else {
    target = *spec.target_angle_sum;
  }
  if (target >= (m - 1) * kPi - 1e-12)
    fail(ErrorCode::target_unreachable,
         "build: angle-sum target " + std::to_string(target) +
             " is not below the Euclidean limit " +
             std::to_string((m - 1) * kPi));
  require(target > 0.0, ErrorCode::invalid_argument,
          "build: angle-sum target must be positive");

  // The angle sum in closed form, extended continuously past the valid
  // range: a diverging side pair contributes 0, a flattening one pi.
  // Bisection runs on this smooth scalar; the single assemble() at the
  // solved scale then validates the actual polygon.
  auto angle_sum = [&](double t) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      double c = -std::cosh(t * spec.weights[i]) *
                     std::cosh(t * spec.weights[(i + 1) % m]) *
                     std::cos(spec.central_angles[i]) +
                 std::sinh(t * spec.weights[i]) *
                     std::sinh(t * spec.weights[(i + 1) % m]);
      if (c >= 1.0) continue;
      s += (c <= -1.0) ? kPi : std::acos(c);
    }
    return s;
  };

  double lo = 1e-4;
  require(angle_sum(lo) > target, ErrorCode::degenerate_vertex,
          "build: angle sum below target even for tiny apothems");
  double hi = lo;
  bool bracketed = false;
  for (int it = 0; it < 80; ++it) {
    hi *= 2.0;
    if (angle_sum(hi) < target) { bracketed = true; break; }
  }
  require(bracketed, ErrorCode::degenerate_vertex,
          "build: angle sum never drops to the target");
  double a = lo, b = hi;
  for (int it = 0; it < 300; ++it) {
    double mid = 0.5 * (a + b);
    double s = angle_sum(mid);
    if (std::abs(s - target) <= kCycleSolveTol) { a = b = mid; break; }
    if (s > target) a = mid; else b = mid;
  }
  SymmetricPolygon P = [&] {
    try {
      return at_scale(0.5 * (a + b));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::sides_do_not_meet ||
          e.code() == ErrorCode::degenerate_angle)
        fail(ErrorCode::degenerate_vertex,
             "build: a vertex degenerates before the angle-sum target is "
             "reached");
      throw;
    }
  }();
  require(std::abs(P.angle_sum_half() - target) <= 1e-9,
          ErrorCode::degenerate_vertex,
          "build: bisection failed to meet the angle-sum target");
  if (spec.target_k) {
    P.k = *spec.target_k;
  } else {
    double s = P.angle_sum_half();
    for (int k = 1; k <= kMaxCycleOrder; ++k)
      if (std::abs(s - 2.0 * kPi / k) <= kCycleCheckTol) P.k = k;
  }
  return P;
}

// Side pairings of the symmetric polygon: g_i is the composition of the
// half-turn about edge midpoint q_i with the half-turn about the origin.
// It carries side i+m onto side i swapping endpoint classes; g_{i+m} is
// its inverse.
inline std::vector<Isometry> side_pairings(const SymmetricPolygon& P) {
  std::vector<Isometry> g;
  g.reserve(2 * P.m);
  Isometry flip = rotation_pi(DiskPoint(Complex(0, 0)));
  for (int i = 0; i < P.m; ++i)
    g.push_back(compose(rotation_pi(P.midpoints[i]), flip));
  for (int i = 0; i < P.m; ++i)
    g.push_back(inverse(g[i]));
  return g;
}

// Translation lengths of the 2m side pairings: 2*dist(origin, q_i).
inline std::vector<double> pairing_lengths(const SymmetricPolygon& P) {
  std::vector<double> len(2 * P.m);
  for (int i = 0; i < P.m; ++i)
    len[i] = len[i + P.m] = 2.0 * P.midpoint_dist[i];
  return len;
}

struct NeutralizingPairs {
  std::vector<int> obtuse;                   // vertex indices in [0, 2m)
  std::vector<std::pair<int, int>> pairs;    // (obtuse vertex, partner vertex)
  std::vector<int> unmatched;                // obtuse vertices with no partner
  bool disjoint = false;                     // all obtuse vertices got matched
};

// Matches every obtuse vertex with an adjacent non-obtuse vertex so that
// each pair's angles sum to at most pi and no vertex is reused.  The
// matching is computed on the m antipodal classes (augmenting paths on
// the class cycle, so a valid matching is found whenever one exists) and
// then lifted to both halves, which keeps it centrally symmetric.  The
// tolerances mirror the pentagon-surgery preconditions the pairs feed:
// basepoint redistribution produces pair sums that equal pi exactly.
inline NeutralizingPairs neutralizing_pairs(const SymmetricPolygon& P) {
  const int m = P.m;
  const int n = 2 * m;
  NeutralizingPairs rep;
  std::vector<char> is_obtuse(m, 0);
  for (int c = 0; c < m; ++c)
    is_obtuse[c] = P.gamma[c] > kPi / 2 + 1e-9;
  for (int i = 0; i < n; ++i)
    if (is_obtuse[i % m]) rep.obtuse.push_back(i);

  // partner_of[c]: obtuse class matched to partner class c, or -1.
  std::vector<int> partner_of(m, -1);
  auto viable = [&](int c, int p) {
    return !is_obtuse[p] && P.gamma[c] + P.gamma[p] <= kPi + 1e-9;
  };
  std::vector<int> match_of(m, -1);  // obtuse class -> partner class
  for (int c = 0; c < m; ++c) {
    if (!is_obtuse[c]) continue;
    std::vector<char> seen(m, 0);
    // Depth-first augmenting search; candidate sets have size <= 2 so
    // recursion depth is bounded by m.
    auto augment = [&](auto&& self, int u) -> bool {
      for (int d : {-1, +1}) {
        int p = (u + d + m) % m;
        if (p == u || seen[p] || !viable(u, p)) continue;
        seen[p] = 1;
        if (partner_of[p] < 0 || self(self, partner_of[p])) {
          partner_of[p] = u;
          match_of[u] = p;
          return true;
        }
      }
      return false;
    };
    if (!augment(augment, c)) {
      rep.unmatched.push_back(c);
      rep.unmatched.push_back(c + m);
    }
  }

  for (int c = 0; c < m; ++c) {
    if (!is_obtuse[c] || match_of[c] < 0) continue;
    int p = match_of[c];
    // Lift the class pair (c, p) to adjacent vertex pairs in both halves.
    int w1, w2;
    if (p == (c + 1) % m) {
      w1 = (c + 1) % n;
      w2 = (c + m + 1) % n;
    } else {
      w1 = (c - 1 + n) % n;
      w2 = (c + m - 1) % n;
    }
    rep.pairs.emplace_back(c, w1);
    rep.pairs.emplace_back(c + m, w2);
  }
  std::sort(rep.unmatched.begin(), rep.unmatched.end());
  rep.disjoint = rep.unmatched.empty();
  return rep;
}

struct PentagonSurgery {
  DiskPoint f;      // foot of the perpendicular dropped onto line BC
  DiskPoint g;      // where that perpendicular meets line ED
  double delta;     // new interior angle at g, at most pi/2
};

// Straightens the C, D corner of a pentagon ABCDE with right angles at B
// and E: the perpendicular to line BC through the midpoint of side CD
// cuts the pentagon to ABFGE, which has a right angle at F and an angle
// of at most pi/2 at G.
inline PentagonSurgery pentagon_surgery(const DiskPoint& A, const DiskPoint& B,
                                        const DiskPoint& C, const DiskPoint& D,
                                        const DiskPoint& E) {
  double ang_b = angle_at(B, A, C);
  double ang_e = angle_at(E, D, A);
  require(std::abs(ang_b - kPi / 2) <= 1e-9, ErrorCode::precondition_violated,
          "pentagon_surgery: angle at B must be right");
  require(std::abs(ang_e - kPi / 2) <= 1e-9, ErrorCode::precondition_violated,
          "pentagon_surgery: angle at E must be right");
  double ang_c = angle_at(C, B, D);
  double ang_d = angle_at(D, C, E);
  require(ang_c <= kPi / 2 + 1e-9, ErrorCode::precondition_violated,
          "pentagon_surgery: angle at C must be acute");
  require(ang_c + ang_d <= kPi + 1e-9, ErrorCode::precondition_violated,
          "pentagon_surgery: angles at C and D must sum to at most pi");

  Geodesic bc = geodesic_through(B, C);
  DiskPoint p = midpoint(C, D);
  DiskPoint f = foot_of_perpendicular(bc, p);
  require(dist(f, p) > 1e-12, ErrorCode::no_intersection,
          "pentagon_surgery: midpoint of CD lies on line BC");
  Geodesic cut = geodesic_through(f, p);
  Geodesic ed = geodesic_through(E, D);
  auto g = intersect(cut, ed);
  if (!g)
    fail(ErrorCode::no_intersection,
         "pentagon_surgery: cut line misses line ED inside the disk");
  // g lies on line ED beyond D (the cut leaves the pentagon at the
  // midpoint of CD), so the ray from g toward D points toward E.  This
  // stays well defined when the angles at C and D sum to exactly pi,
  // where g coincides with D.
  double toward_d = std::arg(tangent_toward(g->z, E.z));
  double toward_f = std::arg(tangent_toward(g->z, f.z));
  double delta = std::abs(
      std::remainder(toward_d - toward_f, 2.0 * kPi));
  return PentagonSurgery{f, *g, delta};
}

// Replaces the shared side of each neutralizing pair by the perpendicular
// geodesic produced by pentagon surgery, yielding a polygon with no
// obtuse angles.  Requires every obtuse vertex to have a partner.
inline SymmetricPolygon reduce_to_acute(const SymmetricPolygon& P) {
  NeutralizingPairs np = neutralizing_pairs(P);
  if (np.obtuse.empty()) return P;
  if (!np.disjoint)
    fail(ErrorCode::dual_trick_required,
         "reduce_to_acute: an obtuse vertex has no free neutralizing partner");

  const int n = 2 * P.m;
  std::vector<std::pair<double, double>> frames(P.m);
  for (int i = 0; i < P.m; ++i)
    frames[i] = {P.apothems[i], P.foot_angles[i]};

  for (const auto& [u, w] : np.pairs) {
    int shared, other;
    if (w == (u + 1) % n) {
      shared = (u + 1) % n;
      other = (u + 2) % n;
    } else {
      shared = u;
      other = (u - 1 + n) % n;
    }
    if (shared >= P.m) continue;  // its antipodal copy is also in the list
    const DiskPoint& q = P.midpoints[shared];
    DiskPoint f = foot_of_perpendicular(P.side(other), q);
    require(dist(f, q) > 1e-12, ErrorCode::reconstruction_failed,
            "reduce_to_acute: shared-side midpoint lies on the far side");
    Geodesic repl = geodesic_through(f, q);
    DiskPoint foot = foot_of_perpendicular(repl, DiskPoint(Complex(0, 0)));
    frames[shared] = {dist(DiskPoint(Complex(0, 0)), foot), std::arg(foot.z)};
  }

  SymmetricPolygon out = build_from_sides(std::move(frames));
  for (double g : out.gamma)
    require(g <= kPi / 2 + 1e-9, ErrorCode::reconstruction_failed,
            "reduce_to_acute: an obtuse angle survived the surgery");
  auto weight = [](double x) { return 1.0 / (1.0 + std::exp(2.0 * x)); };
  double before = 0.0, after = 0.0;
  for (int i = 0; i < P.m; ++i) before += weight(P.midpoint_dist[i]);
  for (int i = 0; i < out.m; ++i) after += weight(out.apothems[i]);
  require(before <= after + 1e-12, ErrorCode::reconstruction_failed,
          "reduce_to_acute: half-length weight sum decreased");
  return out;
}

struct DualPolygon {
  int m = 0;
  std::vector<double> side_lengths;    // m, twice the primal midpoint dists
  std::vector<double> angles;          // m, angles[i] sits at vertex i+1
  std::vector<DiskPoint> vertices;     // m, vertices[0] at the origin
  std::vector<DiskPoint> side_mids;    // m, midpoint of each laid-out side
  DiskPoint basepoint{Complex(0, 0)};  // common image of the primal vertices
  double closure_residual = 0.0;
};

// Quotient polygon of a total-angle-4*pi symmetric polygon: folding the
// 2m-gon by its side pairings together with the central symmetry leaves
// an m-gon whose side i has length 2*midpoint_dist[i] and whose angles
// are the midpoint fan angles (they sum to pi; the primal center becomes
// a half-turn cone point, split among the dual vertices).  The primal
// edge midpoints land on the dual side midpoints and all 2m primal
// vertices land on one interior point, the basepoint.
inline DualPolygon dual(const SymmetricPolygon& P) {
  double total = 2.0 * P.angle_sum_half();
  require(std::abs(total - 4.0 * kPi) <= kCycleCheckTol,
          ErrorCode::precondition_angle_sum,
          "dual: total vertex angle must be 4*pi");
  const int m = P.m;
  DualPolygon D;
  D.m = m;
  D.side_lengths.resize(m);
  D.angles = P.midpoint_alpha;
  for (int i = 0; i < m; ++i) D.side_lengths[i] = 2.0 * P.midpoint_dist[i];

  // Turtle layout, counterclockwise: walk side i from vertex i to vertex
  // i+1, then turn left by pi minus the angle at the new vertex.
  Isometry M = identity_isometry();
  DiskPoint origin{Complex(0, 0)};
  D.vertices.push_back(origin);
  DiskPoint end_pos = origin;
  for (int i = 0; i < m; ++i) {
    Isometry half = compose(M, translation_x(P.midpoint_dist[i]));
    D.side_mids.push_back(apply(half, origin));
    M = compose(M, translation_x(D.side_lengths[i]));
    end_pos = apply(M, origin);
    if (i + 1 < m) D.vertices.push_back(end_pos);
    M = compose(M, rotation_about_origin(kPi - D.angles[i]));
  }
  D.closure_residual = dist(end_pos, origin);
  require(D.closure_residual <= kCycleCheckTol,
          ErrorCode::reconstruction_failed,
          "dual: side walk does not close up");

  // Basepoint transport.  The primal quad (origin, q_0, p_0, q_1) embeds
  // with its origin corner at dual vertex 1 and q_0 on dual side 0, so
  // p_0 is carried by the frame pair (q_0 with the ray toward the primal
  // origin) -> (side mid 0 with the ray toward dual vertex 1).  The two
  // developments have opposite handedness, hence the conjugation.
  Complex rel = to_origin(P.midpoints[0].z, P.vertices[0].z);
  rel *= std::polar(1.0, -std::arg(to_origin(P.midpoints[0].z, Complex(0, 0))));
  Isometry G = compose(rotation_about_origin(
                           -std::arg(to_origin(D.side_mids[0].z,
                                               D.vertices[1 % m].z))),
                       move_to_origin(D.side_mids[0]));
  D.basepoint = apply(inverse(G), DiskPoint(std::conj(rel)));
  return D;
}

struct Redistribution {
  DiskPoint basepoint{Complex(0, 0)};  // the new center, in dual coordinates
  std::vector<double> gaps;            // m direction gaps seen from it
  SymmetricPolygon polygon;            // rebuilt symmetric polygon
};

namespace detail {

// Directions from v to each dual side midpoint, as consecutive
// counterclockwise gaps.  Fails if the cyclic order degenerates or a gap
// reaches pi.
inline std::optional<std::vector<double>> midpoint_gaps(const DualPolygon& D,
                                                        const DiskPoint& v) {
  const int m = D.m;
  std::vector<double> theta(m);
  for (int i = 0; i < m; ++i) {
    Complex d = to_origin(v.z, D.side_mids[i].z);
    if (std::abs(d) < 1e-14) return std::nullopt;
    theta[i] = std::arg(d);
  }
  std::vector<double> gaps(m);
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    gaps[i] = wrap_two_pi(theta[(i + 1) % m] - theta[i]);
    if (gaps[i] <= 1e-9 || gaps[i] >= kPi - 1e-7) return std::nullopt;
    sum += gaps[i];
  }
  if (std::abs(sum - 2.0 * kPi) > 1e-9) return std::nullopt;  // wrong winding
  return gaps;
}

}  // namespace detail

// Rebuilds a symmetric polygon from a dual polygon around a new interior
// basepoint v: the dual is cut along the segments from v to the side
// midpoints into m corner quads, and the quads are fanned around the
// dual vertices' common cone point, which becomes the new center.  The
// result has the same pairing half-lengths as the dual prescribes and
// total vertex angle 4*pi, with interior angles equal to the direction
// gaps seen from v.  By default v is chosen on the segment joining two
// roughly opposite side midpoints so that at most two gaps are obtuse.
inline Redistribution redistribute_basepoint(
    const DualPolygon& D, std::optional<DiskPoint> override_v = std::nullopt) {
  const int m = D.m;
  require(m >= 3, ErrorCode::invalid_argument,
          "redistribute_basepoint: need at least three dual sides");

  DiskPoint v{Complex(0, 0)};
  std::optional<std::vector<double>> gaps;
  if (override_v) {
    v = *override_v;
    gaps = detail::midpoint_gaps(D, v);
    require(gaps.has_value(), ErrorCode::reconstruction_failed,
            "redistribute_basepoint: override point sees a degenerate "
            "midpoint fan");
  } else {
    const DiskPoint& s0 = D.side_mids[0];
    const DiskPoint& s1 = D.side_mids[m / 2];
    double d01 = dist(s0, s1);
    require(d01 > 1e-12, ErrorCode::reconstruction_failed,
            "redistribute_basepoint: opposite side midpoints coincide");
    double dir = std::arg(tangent_toward(s0.z, s1.z));
    int best_obtuse = 1 << 20;
    for (double t : {0.5, 0.4375, 0.5625, 0.375, 0.625, 0.3125, 0.6875, 0.25,
                     0.75, 0.1875, 0.8125, 0.125, 0.875, 0.0625, 0.9375}) {
      DiskPoint cand = flow(s0, dir, t * d01);
      auto g = detail::midpoint_gaps(D, cand);
      if (!g) continue;
      int obtuse = 0;
      for (double x : *g)
        if (x > kPi / 2 + 1e-12) ++obtuse;
      if (obtuse < best_obtuse) {
        best_obtuse = obtuse;
        v = cand;
        gaps = std::move(g);
      }
      if (best_obtuse <= 2) break;
    }
    require(gaps.has_value(), ErrorCode::reconstruction_failed,
            "redistribute_basepoint: no valid basepoint on the midpoint "
            "segment");
  }

  // Corner quad i has corners (vertex i+1, side mid i, v, side mid i+1).
  // Its frame maps vertex i+1 to the origin with side mid i on the
  // positive real ray; conjugation flips the development handedness so
  // side mid i+1 lands at the positive angle D.angles[i].
  std::vector<Complex> rel_v(m);
  for (int i = 0; i < m; ++i) {
    Complex w = D.vertices[(i + 1) % m].z;
    Complex md = to_origin(w, D.side_mids[i].z);
    double psi = std::arg(md);
    auto frame = [&](Complex z) {
      return std::conj(to_origin(w, z) * std::polar(1.0, -psi));
    };
    double got = std::arg(frame(D.side_mids[(i + 1) % m].z));
    require(std::abs(wrap_pi(got - D.angles[i])) <= 1e-7,
            ErrorCode::reconstruction_failed,
            "redistribute_basepoint: corner frame does not reproduce the "
            "dual angle");
    rel_v[i] = frame(v.z);
  }

  // Fan the quads around the cone point: quad i occupies the wedge
  // starting at cumulative angle theta_i, width D.angles[i]; the new
  // vertex i is the image of v in that wedge.
  std::vector<double> theta(m + 1, 0.0);
  for (int i = 0; i < m; ++i) theta[i + 1] = theta[i] + D.angles[i];
  require(std::abs(theta[m] - kPi) <= 1e-7, ErrorCode::reconstruction_failed,
          "redistribute_basepoint: dual angles do not sum to pi");

  std::vector<DiskPoint> ring(m);
  for (int i = 0; i < m; ++i)
    ring[i] = DiskPoint(rel_v[i] * std::polar(1.0, theta[i]));

  // Side i of the new polygon runs from vertex i-1 to vertex i (vertex
  // -1 is the antipode of vertex m-1) through the spoke at theta_i.
  std::vector<std::pair<double, double>> frames_out(m);
  for (int i = 0; i < m; ++i) {
    DiskPoint a = (i == 0) ? DiskPoint(-ring[m - 1].z) : ring[i - 1];
    DiskPoint b = ring[i];
    require(dist(a, b) > 1e-12, ErrorCode::reconstruction_failed,
            "redistribute_basepoint: consecutive vertices collide");
    Geodesic side = geodesic_through(a, b);
    DiskPoint foot = foot_of_perpendicular(side, DiskPoint(Complex(0, 0)));
    frames_out[i] = {dist(DiskPoint(Complex(0, 0)), foot), std::arg(foot.z)};
  }

  Redistribution R;
  R.basepoint = v;
  R.gaps = *gaps;
  R.polygon = build_from_sides(std::move(frames_out));

  // Gluing closure: the rebuilt polygon must reproduce the pairing
  // half-lengths the dual prescribes.
  require(R.polygon.m == m, ErrorCode::reconstruction_failed,
          "redistribute_basepoint: rebuilt polygon lost sides");
  std::vector<double> want(m), got(R.polygon.midpoint_dist);
  for (int i = 0; i < m; ++i) want[i] = 0.5 * D.side_lengths[i];
  std::sort(want.begin(), want.end());
  std::sort(got.begin(), got.end());
  for (int i = 0; i < m; ++i)
    require(std::abs(want[i] - got[i]) <= 1e-7,
            ErrorCode::reconstruction_failed,
            "redistribute_basepoint: pairing lengths drifted in rebuild");
  return R;
}

/// Random polygon with a prescribed cycle order: Dirichlet central angles
// and log-uniform apothem weights in [1/4, 4], retried until the scale
// solve lands.  Small angle-sum targets only admit shapes close to the
// regular one, so each failed try shrinks both spreads toward it; the
// first tries keep the full spread.
inline SymmetricPolygon sample_polygon(int m, int k, RngStream& rng,
                                       int max_tries = 64) {
  require(m >= 2, ErrorCode::invalid_argument, "sample_polygon: m too small");
  double tau = 1.0;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    PolygonSpec spec;
    spec.m = m;
    spec.target_k = k;
    spec.central_angles.resize(m);
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      spec.central_angles[i] = rng.next_exponential();
      s += spec.central_angles[i];
    }
    for (int i = 0; i < m; ++i)
      spec.central_angles[i] =
          (1.0 - tau) * (kPi / m) + tau * spec.central_angles[i] * kPi / s;
    spec.weights.resize(m);
    for (int i = 0; i < m; ++i)
      spec.weights[i] = std::exp(tau * rng.next_double(-std::log(4.0),
                                                       std::log(4.0)));
    tau *= 0.75;
    try {
      return build(spec);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::target_unreachable) throw;
      continue;
    }
  }
  fail(ErrorCode::degenerate_vertex,
       "sample_polygon: no valid polygon found in the given tries");
}

}  // namespace hypwalk
