#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <hypwalk/error.hpp>
#include <hypwalk/freewalk.hpp>
#include <hypwalk/hyperbolic.hpp>
#include <hypwalk/inequality.hpp>
#include <hypwalk/polygon.hpp>

namespace hypwalk {

// Centrally symmetric polygon whose interior angles are pi/k_i for integer
// orders k_i >= 2; the 2m side reflections then generate a discrete
// reflection group.  Central symmetry forces k_{i+m} = k_i, so the orders
// are stored once per class, like the angles.
struct CoxeterPolygon {
  SymmetricPolygon polygon;
  std::vector<int> k;  // m entries, gamma[i] = pi / k[i]
};

namespace detail {

inline void check_submultiple(const SymmetricPolygon& P,
                              const std::vector<int>& k) {
  require(static_cast<int>(k.size()) == P.m, ErrorCode::invalid_argument,
          "coxeter: expected one angle order per vertex class");
  for (int i = 0; i < P.m; ++i) {
    require(k[i] >= 2 && std::abs(P.gamma[i] - kPi / k[i]) < 1e-9,
            ErrorCode::angle_not_submultiple,
            "coxeter: interior angle " + std::to_string(i) +
                " is not pi over an integer");
  }
}

}  // namespace detail

// Recognizes the angle orders of an already-built polygon.
inline CoxeterPolygon coxeter_polygon(const SymmetricPolygon& P) {
  CoxeterPolygon c;
  c.polygon = P;
  c.k.resize(P.m);
  for (int i = 0; i < P.m; ++i) {
    double ratio = kPi / P.gamma[i];
    c.k[i] = static_cast<int>(std::lround(ratio));
    if (c.k[i] < 2) c.k[i] = 0;  // forces the check below to report it
  }
  detail::check_submultiple(c.polygon, c.k);
  return c;
}

// Builds a polygon with interior angles exactly pi/k_i: the apothems are
// solved by a damped Newton iteration on the vertex-angle system, started
// from the uniform-scale solution that matches the target angle sum.
inline CoxeterPolygon build_coxeter_polygon(int m, const std::vector<int>& orders,
                                            std::vector<double> central_angles = {}) {
  require(m >= 2, ErrorCode::invalid_argument,
          "build_coxeter_polygon: need at least two side classes");
  require(static_cast<int>(orders.size()) == m, ErrorCode::invalid_argument,
          "build_coxeter_polygon: expected one angle order per vertex class");
  for (int k : orders)
    require(k >= 2, ErrorCode::invalid_argument,
            "build_coxeter_polygon: angle orders must be at least 2");
  if (central_angles.empty()) central_angles.assign(m, kPi / m);
  require(static_cast<int>(central_angles.size()) == m,
          ErrorCode::invalid_argument,
          "build_coxeter_polygon: expected m central angles");
  double alpha_sum = 0.0;
  for (double a : central_angles) {
    require(a > 0.0, ErrorCode::invalid_argument,
            "build_coxeter_polygon: central angles must be positive");
    alpha_sum += a;
  }
  require(std::abs(alpha_sum - kPi) <= 1e-12, ErrorCode::invalid_argument,
          "build_coxeter_polygon: central angles must sum to pi");

  std::vector<double> target(m);
  for (int i = 0; i < m; ++i) {
    target[i] = kPi / orders[i];
    require(target[i] < kPi - central_angles[i] - 1e-9,
            ErrorCode::target_unreachable,
            "build_coxeter_polygon: angle target pi/" +
                std::to_string(orders[i]) + " at vertex " + std::to_string(i) +
                " exceeds its flat limit pi - alpha");
  }

  // starting point: solve each vertex in isolation as if locally regular
  // (equal flanking apothems), then give each side the average of the two
  // vertex solutions it touches
  auto angle_or_zero = [&](double ap, int i) {
    try {
      return vertex_angle(ap, ap, central_angles[i]);
    } catch (const Error&) {
      return 0.0;  // sides diverged, angle is past any positive target
    }
  };
  std::vector<double> b(m);
  for (int i = 0; i < m; ++i) {
    double lo = 1e-9, hi = 1.0;
    while (angle_or_zero(hi, i) > target[i]) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      double mid = 0.5 * (lo + hi);
      (angle_or_zero(mid, i) > target[i] ? lo : hi) = mid;
    }
    b[i] = 0.5 * (lo + hi);
  }
  std::vector<double> a(m);
  for (int i = 0; i < m; ++i) a[i] = 0.5 * (b[(i + m - 1) % m] + b[i]);

  // Totalized vertex angle: past the point where the sides stop meeting
  // (cos would exceed 1) the angle is continued linearly with the one-sided
  // slope at the cut, so Newton iterates can wander out of the feasible
  // region and still be pulled back instead of aborting.
  auto extended_angle = [&](double a1, double a2, int i) {
    double c = -std::cosh(a1) * std::cosh(a2) * std::cos(central_angles[i]) +
               std::sinh(a1) * std::sinh(a2);
    constexpr double cut = 1.0 - 1e-9;
    if (c >= cut)
      return std::acos(cut) - (c - cut) / std::sqrt(1.0 - cut * cut);
    if (c <= -1.0) return kPi;
    return std::acos(c);
  };
  auto residual = [&](const std::vector<double>& ap, std::vector<double>& F) {
    for (int i = 0; i < m; ++i) {
      if (!(ap[i] > 0.0)) return false;
    }
    for (int i = 0; i < m; ++i)
      F[i] = extended_angle(ap[i], ap[(i + 1) % m], i) - target[i];
    return true;
  };
  auto sup = [&](const std::vector<double>& F) {
    double s = 0.0;
    for (double f : F) s = std::max(s, std::abs(f));
    return s;
  };
  auto merit = [&](const std::vector<double>& F) {
    double s = 0.0;
    for (double f : F) s += f * f;
    return s;
  };

  std::vector<double> F(m), Ft(m), trial(m), step(m);
  auto newton_from = [&](std::vector<double> x) {
    if (!residual(x, F)) return false;
    for (int iter = 0; iter < 120 && sup(F) >= 1e-12; ++iter) {
    // numeric Jacobian; each angle depends on its two flanking apothems
    std::vector<double> J(m * m, 0.0);
    for (int j = 0; j < m; ++j) {
      double h = 1e-7 * std::max(1.0, x[j]);
      trial = x;
      trial[j] += h;
      if (!residual(trial, Ft)) return false;
      for (int i = 0; i < m; ++i) J[i * m + j] = (Ft[i] - F[i]) / h;
    }
    // dense Gaussian elimination with partial pivoting (m is tiny);
    // at fully symmetric points the cyclic system has an exact null
    // direction, so a vanishing pivot retries with a diagonal ridge
    auto eliminate = [&](double ridge) {
      std::vector<double> A(J), rhs(F);
      for (int i = 0; i < m; ++i)
        A[i * m + i] += A[i * m + i] >= 0.0 ? ridge : -ridge;
      for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
          if (std::abs(A[r * m + col]) > std::abs(A[piv * m + col])) piv = r;
        if (std::abs(A[piv * m + col]) <= 1e-14) return false;
        if (piv != col) {
          for (int c = 0; c < m; ++c) std::swap(A[piv * m + c], A[col * m + c]);
          std::swap(rhs[piv], rhs[col]);
        }
        for (int r = col + 1; r < m; ++r) {
          double f = A[r * m + col] / A[col * m + col];
          for (int c = col; c < m; ++c) A[r * m + c] -= f * A[col * m + c];
          rhs[r] -= f * rhs[col];
        }
      }
      for (int r = m - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int c = r + 1; c < m; ++c) s -= A[r * m + c] * step[c];
        step[r] = s / A[r * m + r];
      }
      return true;
    };
    bool solved = eliminate(0.0);
    for (double ridge = 1e-8; !solved && ridge <= 1e-2; ridge *= 100.0)
      solved = eliminate(ridge);
    if (!solved) return false;

    double lambda = 1.0, m0 = merit(F);
    bool moved = false;
    while (lambda >= 1.0 / 1024.0) {
      for (int i = 0; i < m; ++i) trial[i] = x[i] - lambda * step[i];
      if (residual(trial, Ft) && merit(Ft) < m0 * (1.0 - 1e-4 * lambda)) {
        x = trial;
        F = Ft;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) return false;
    }
    if (sup(F) >= 1e-12) return false;
    a = x;
    return true;
  };

  bool converged = false;
  if (m == 2) {
    // With alpha_1 = pi - alpha_0 the two vertex equations decouple into
    // sinh a_0 sinh a_1 = S and cosh a_0 cosh a_1 = C, solved exactly via
    // cosh(a_0 +- a_1).  The smaller apothem is reported first; the
    // swapped pair bounds the same quadrilateral reflected.
    double S = 0.5 * (std::cos(target[0]) + std::cos(target[1]));
    double c0 = std::cos(central_angles[0]);
    if (std::abs(c0) < 1e-12) {
      require(std::abs(std::cos(target[0]) - std::cos(target[1])) < 1e-12 &&
                  S > 0.0,
              ErrorCode::non_convergence,
              "build_coxeter_polygon: perpendicular feet force equal angle "
              "targets");
      a.assign(2, std::asinh(std::sqrt(S)));
    } else {
      double C = (S - std::cos(target[0])) / c0;
      require(C - S >= 1.0 - 1e-12 && C + S >= 1.0,
              ErrorCode::non_convergence,
              "build_coxeter_polygon: no quadrilateral with these angles "
              "closes up");
      double u = std::acosh(C + S);
      // acosh has a vertical tangent at 1, so equal-apothem solutions are
      // snapped rather than split by a sqrt of the rounding noise
      double v = C - S <= 1.0 + 4e-15 ? 0.0 : std::acosh(C - S);
      a = {0.5 * (u - v), 0.5 * (u + v)};
      require(a[0] > 0.0, ErrorCode::non_convergence,
              "build_coxeter_polygon: quadrilateral apothem degenerates");
    }
    converged = newton_from(a);
  } else {
    // The averaged ansatz with Newton polish covers the well-conditioned
    // cases.  When it fails, fall back to shooting: a_0 determines the rest
    // of the apothems one vertex equation at a time, and the last equation
    // becomes a closure residual whose sign changes are bisected in a_0.
    converged = newton_from(a);
  }
  if (!converged && m > 2) {
    // smallest apothem solving angle(prev, y) = target at vertex i, or a
    // negative value when no such apothem exists
    auto propagate = [&](double prev, int i) {
      double ca = std::cos(central_angles[i]);
      double at_zero = -std::cosh(prev) * ca;
      double head =
          at_zero >= 1.0 ? -1.0 : (at_zero <= -1.0 ? kPi : std::acos(at_zero));
      if (head <= target[i]) return -1.0;
      double hi = 1e-6;
      double limit = ca > 0.0 && std::tanh(prev) < ca
                         ? std::atanh(std::tanh(prev) / ca)
                         : 700.0;
      while (hi < limit && extended_angle(prev, hi, i) > target[i]) hi *= 2.0;
      hi = std::min(hi, limit);
      if (extended_angle(prev, hi, i) > target[i]) return -1.0;
      double lo = 0.0;
      for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        (extended_angle(prev, mid, i) > target[i] ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    };
    auto closure = [&](double x, std::vector<double>* out) {
      double cur = x;
      if (out) (*out)[0] = x;
      for (int i = 0; i + 1 < m; ++i) {
        cur = propagate(cur, i);
        if (cur <= 0.0) return std::numeric_limits<double>::quiet_NaN();
        if (out) (*out)[i + 1] = cur;
      }
      return extended_angle(cur, x, m - 1) - target[m - 1];
    };
    auto try_root = [&](double lo, double philo, double hi, double phihi) {
      if (converged || !std::isfinite(philo) || !std::isfinite(phihi)) return;
      bool lo_neg = philo <= 0.0;
      if ((phihi <= 0.0) == lo_neg) return;
      for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        double pm = closure(mid, nullptr);
        if (!std::isfinite(pm)) return;
        ((pm <= 0.0) == lo_neg ? lo : hi) = mid;
      }
      std::vector<double> candidate(m);
      if (std::isfinite(closure(0.5 * (lo + hi), &candidate)))
        converged = newton_from(candidate);
    };
    // log-spaced scan for sign changes; equal-sign local dips of |phi| are
    // sharpened by ternary search, since a pair of nearby roots can hide
    // between grid points
    const int grid = 160;
    std::vector<double> xs(grid + 1), phis(grid + 1);
    for (int g = 0; g <= grid; ++g) {
      xs[g] = 1e-5 * std::pow(32.0 / 1e-5, static_cast<double>(g) / grid);
      phis[g] = closure(xs[g], nullptr);
      if (g > 0) try_root(xs[g - 1], phis[g - 1], xs[g], phis[g]);
      if (!converged && g > 0 &&
          std::isfinite(phis[g]) != std::isfinite(phis[g - 1])) {
        // the domain of the propagation opens or closes inside this cell;
        // a root can sit between the boundary and the finite endpoint
        double px = xs[g - 1], pphi = phis[g - 1];
        for (int sub = 1; sub <= 32 && !converged; ++sub) {
          double x = xs[g - 1] + (xs[g] - xs[g - 1]) * sub / 32.0;
          double phi = sub == 32 ? phis[g] : closure(x, nullptr);
          try_root(px, pphi, x, phi);
          px = x;
          pphi = phi;
        }
      }
      if (converged) break;
      if (g >= 2 && std::isfinite(phis[g - 2]) && std::isfinite(phis[g - 1]) &&
          std::isfinite(phis[g]) &&
          std::abs(phis[g - 1]) < std::min(std::abs(phis[g - 2]),
                                           std::abs(phis[g])) &&
          (phis[g - 2] <= 0.0) == (phis[g] <= 0.0)) {
        double lo = xs[g - 2], hi = xs[g];
        for (int it = 0; it < 90; ++it) {
          double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
          double p1 = closure(m1, nullptr), p2 = closure(m2, nullptr);
          if (!std::isfinite(p1) || !std::isfinite(p2)) break;
          if (std::abs(p1) < std::abs(p2)) hi = m2; else lo = m1;
        }
        double xb = 0.5 * (lo + hi), pb = closure(xb, nullptr);
        if (std::isfinite(pb)) {
          try_root(xs[g - 2], phis[g - 2], xb, pb);
          try_root(xb, pb, xs[g], phis[g]);
          if (!converged && std::abs(pb) < 1e-6) {
            std::vector<double> candidate(m);
            if (std::isfinite(closure(xb, &candidate)))
              converged = newton_from(candidate);
          }
        }
      }
    }
  }
  require(converged, ErrorCode::non_convergence,
          "build_coxeter_polygon: no apothem vector reaches the angle "
          "targets; the prescribed central angles are likely incompatible "
          "with these orders");

  std::vector<std::pair<double, double>> frames(m);
  double foot = 0.0;
  for (int i = 0; i < m; ++i) {
    frames[i] = {a[i], foot};
    foot += central_angles[i];
  }
  CoxeterPolygon c;
  c.polygon = build_from_sides(std::move(frames));
  c.k = orders;
  detail::check_submultiple(c.polygon, c.k);
  return c;
}

struct ReflectionSet {
  std::vector<Isometry> r;  // 2m side reflections, r[i] fixes side i
};

inline ReflectionSet reflections(const CoxeterPolygon& c) {
  detail::check_submultiple(c.polygon, c.k);
  ReflectionSet rs;
  rs.r.reserve(2 * c.polygon.m);
  for (int i = 0; i < 2 * c.polygon.m; ++i)
    rs.r.push_back(reflection_in(c.polygon.side(i)));
  return rs;
}

// True iff the measure weighs each reflection and its opposite equally,
// the symmetry the reflection-group criterion requires.
inline bool geometric_symmetry_check(const StepDistribution& mu) {
  require(mu.kind == StepKind::involutive, ErrorCode::invalid_argument,
          "geometric_symmetry_check: reflection walks use the involutive kind");
  int m = mu.symbol_count() / 2;
  for (int i = 0; i < m; ++i)
    if (std::abs(mu.probabilities[i] - mu.probabilities[i + m]) > 1e-14)
      return false;
  return true;
}

// Reflection-group singularity criterion: sum over classes of
// 1/(1 + e^{l(r_i r_{i+m})/2}) < 1/2.  The half-lengths are computed from
// the actual reflection products and cross-checked against the closed form
// 2 a_i (the product translates along the apothem diameter by 4 a_i).
inline CriterionReport coxeter_criterion(const CoxeterPolygon& c,
                                         const StepDistribution& mu) {
  require(mu.symbol_count() == 2 * c.polygon.m, ErrorCode::symbol_mismatch,
          "coxeter_criterion: measure must cover the 2m reflections");
  require(geometric_symmetry_check(mu),
          ErrorCode::not_geometrically_symmetric,
          "coxeter_criterion: measure must weigh opposite reflections equally");

  ReflectionSet rs = reflections(c);
  const int m = c.polygon.m;
  std::vector<double> half_lengths(m);
  for (int i = 0; i < m; ++i) {
    // raw product: the entries grow like e^{2 a_i}, where the determinant
    // rescale of compose would contaminate the measured length
    double len = translation_length(detail::raw_compose(rs.r[i], rs.r[i + m]));
    require(std::abs(len - 4.0 * c.polygon.apothems[i]) < 1e-9,
            ErrorCode::reconstruction_failed,
            "coxeter_criterion: reflection product drifted off the apothem "
            "closed form");
    half_lengths[i] = 0.5 * len;
  }

  CriterionReport r;
  r.lengths = half_lengths;
  r.sigma = sigma_of_lengths(half_lengths);
  r.margin = 0.5 - r.sigma;
  r.verdict = r.sigma < 0.5 - 1e-12 ? Verdict::singular : Verdict::inconclusive;
  return r;
}

}  // namespace hypwalk
