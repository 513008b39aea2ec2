#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <hypwalk/error.hpp>
#include <hypwalk/hyperbolic.hpp>
#include <hypwalk/rng.hpp>

namespace hypwalk {

enum class Verdict { singular, inconclusive };

inline const char* verdict_name(Verdict v) {
  return v == Verdict::singular ? "singular" : "inconclusive";
}

// Outcome of the length criterion: sigma is the sum of 1/(1+e^length)
// over a symmetric generating set, and sigma < 1 certifies that the
// hitting measure of the nearest-neighbor walk is singular.
struct CriterionReport {
  double sigma = 0.0;
  double margin = 0.0;  // threshold minus sigma
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> lengths;
};

inline double sigma_of_lengths(const std::vector<double>& lengths) {
  double s = 0.0;
  for (double l : lengths) {
    require(l >= 0.0, ErrorCode::invalid_argument,
            "sigma_of_lengths: lengths must be nonnegative");
    s += 1.0 / (1.0 + std::exp(l));
  }
  return s;
}

inline CriterionReport criterion(const std::vector<double>& lengths) {
  CriterionReport r;
  r.lengths = lengths;
  r.sigma = sigma_of_lengths(lengths);
  r.margin = 1.0 - r.sigma;
  r.verdict =
      r.sigma < 1.0 - 1e-12 ? Verdict::singular : Verdict::inconclusive;
  return r;
}

// Shortcut: one sufficiently small apothem already implies the criterion,
// because the other pairing curves all cross it and cannot be short too.
inline bool collar_quick_test(const std::vector<double>& apothems, int m) {
  require(m >= 3, ErrorCode::invalid_argument,
          "collar_quick_test: m must be at least 3");
  double threshold = 2.0 * (m - 1) / (double(m) * (m - 2));
  return std::any_of(apothems.begin(), apothems.end(),
                     [&](double a) { return std::sinh(a) <= threshold; });
}

struct Violation {
  std::string what;
  std::vector<double> x;
  double lhs = 0.0;
  double rhs = 0.0;
};

// Sampling report for one of the optimization inequalities.  The bound
// holds on the sample iff violations is empty, which by construction is
// equivalent to minimum_found >= target - 1e-9.
struct OptReport {
  double minimum_found = 0.0;
  std::vector<double> argmin;
  long samples_used = 0;
  std::vector<Violation> violations;
  std::vector<std::string> equality_cases_checked;
};

namespace detail {

// Composition grid on the standard simplex sum(y) = 1: all y = j/G with
// nonnegative integer parts.  G grows until the next size would pass the
// budget, so corners are always present.
inline void simplex_grid(int m, long budget,
                         const std::function<void(const std::vector<double>&)>&
                             visit) {
  auto count = [&](long g) {
    double c = 1.0;
    for (int i = 1; i < m; ++i) c *= double(g + i) / i;
    return c;
  };
  long G = 1;
  while (count(G + 1) <= std::max<double>(budget, m + 1)) ++G;
  std::vector<long> parts(m, 0);
  std::vector<double> y(m);
  auto emit = [&]() {
    for (int i = 0; i < m; ++i) y[i] = double(parts[i]) / G;
    visit(y);
  };
  // iterate compositions of G into m parts
  std::function<void(int, long)> rec = [&](int i, long left) {
    if (i == m - 1) {
      parts[i] = left;
      emit();
      return;
    }
    for (long j = 0; j <= left; ++j) {
      parts[i] = j;
      rec(i + 1, left - j);
    }
  };
  rec(0, G);
}

// budget seeded Dirichlet(1) points, drawn from fixed per-partition
// streams so the sample set does not depend on how work is split.
inline void simplex_random(int m, long budget, unsigned long long seed,
                           const std::function<void(const std::vector<double>&)>&
                               visit) {
  const int partitions = 16;
  std::vector<double> y(m);
  for (int p = 0; p < partitions; ++p) {
    long n = budget / partitions + (p < budget % partitions ? 1 : 0);
    RngStream rng(seed, (unsigned)p);
    for (long t = 0; t < n; ++t) {
      double tot = 0.0;
      for (int i = 0; i < m; ++i) {
        y[i] = rng.next_exponential();
        tot += y[i];
      }
      for (int i = 0; i < m; ++i) y[i] /= tot;
      visit(y);
    }
  }
}

}  // namespace detail

// Checks sum arccos(x_i x_{i+1}) >= pi on the slice {0 <= x_i <= 1,
// sum x_i = m-1} (grid plus seeded Dirichlet points via x = 1 - y), and
// the equality cases x = (0,1,...,1) up to rotation.  minimum_found is
// the smallest arccos sum seen; target pi.
inline OptReport verify_arccos_bound(int m, long budget,
                                     unsigned long long seed) {
  require(m >= 3, ErrorCode::invalid_argument,
          "verify_arccos_bound: m must be at least 3");
  OptReport rep;
  rep.minimum_found = std::numeric_limits<double>::infinity();
  std::vector<double> x(m);
  auto value = [&](const std::vector<double>& xs, bool* arg_ok) {
    double s = 0.0;
    *arg_ok = true;
    for (int i = 0; i < m; ++i) {
      double a = xs[i] * xs[(i + 1) % m];
      if (a > 1.0 + 1e-12 || a < -1.0 - 1e-12) *arg_ok = false;
      s += std::acos(std::clamp(a, -1.0, 1.0));
    }
    return s;
  };
  auto check = [&](const std::vector<double>& y) {
    for (int i = 0; i < m; ++i) x[i] = 1.0 - y[i];
    bool arg_ok = true;
    double s = value(x, &arg_ok);
    ++rep.samples_used;
    if (!arg_ok)
      rep.violations.push_back(
          {"arccos argument outside [-1,1] beyond slack", x, 0.0, 0.0});
    if (s < rep.minimum_found) {
      rep.minimum_found = s;
      rep.argmin = x;
    }
    if (s < kPi - 1e-9)
      rep.violations.push_back({"arccos sum below pi", x, s, kPi});
  };
  detail::simplex_grid(m, budget, check);
  detail::simplex_random(m, budget, seed, check);
  for (int r = 0; r < m; ++r) {
    std::vector<double> eq(m, 1.0);
    eq[r] = 0.0;
    bool arg_ok = true;
    double s = value(eq, &arg_ok);
    rep.equality_cases_checked.push_back(
        "one zero coordinate, rotation " + std::to_string(r));
    if (std::abs(s - kPi) > 1e-12)
      rep.violations.push_back({"equality case not tight", eq, s, kPi});
  }
  return rep;
}

// Checks sum sqrt(Delta_i) >= sqrt(4 + 3 sum x_i x_{i+1}) with
// Delta_i = x_i + x_{i+1} - x_i x_{i+1} on the simplex sum x = 1,
// plus the pointwise bounds Delta_i >= max(x_i, x_{i+1}) and
// sqrt(Delta_i Delta_{i+2}) >= 2 x_{i+1} x_{i+2}.  minimum_found is the
// smallest lhs - rhs; target 0.
inline OptReport verify_sqrt_bound(int m, long budget,
                                   unsigned long long seed) {
  require(m >= 3, ErrorCode::invalid_argument,
          "verify_sqrt_bound: m must be at least 3");
  OptReport rep;
  rep.minimum_found = std::numeric_limits<double>::infinity();
  std::vector<double> delta(m);
  auto check = [&](const std::vector<double>& x) {
    ++rep.samples_used;
    double lhs = 0.0, sig = 0.0;
    for (int i = 0; i < m; ++i) {
      int j = (i + 1) % m;
      delta[i] = x[i] + x[j] - x[i] * x[j];
      lhs += std::sqrt(std::max(delta[i], 0.0));
      sig += x[i] * x[j];
      if (delta[i] < std::max(x[i], x[j]) - 1e-12)
        rep.violations.push_back(
            {"Delta_i below max(x_i, x_{i+1})", x, delta[i],
             std::max(x[i], x[j])});
    }
    for (int i = 0; i < m; ++i) {
      int j = (i + 1) % m, l = (i + 2) % m;
      double cs = std::sqrt(std::max(delta[i] * delta[l], 0.0));
      if (cs < 2.0 * x[j] * x[l] - 1e-12)
        rep.violations.push_back(
            {"Cauchy-Schwarz sub-bound failed", x, cs, 2.0 * x[j] * x[l]});
    }
    double rhs = std::sqrt(4.0 + 3.0 * sig);
    if (lhs - rhs < rep.minimum_found) {
      rep.minimum_found = lhs - rhs;
      rep.argmin = x;
    }
    if (lhs < rhs - 1e-9)
      rep.violations.push_back({"sqrt sum below bound", x, lhs, rhs});
  };
  detail::simplex_grid(m, budget, check);
  detail::simplex_random(m, budget, seed, check);
  for (int r = 0; r < m; ++r) {
    std::vector<double> eq(m, 0.0);
    eq[r] = 1.0;
    double lhs = 2.0, rhs = 2.0;  // Delta has two ones and zeros elsewhere
    double got = 0.0;
    for (int i = 0; i < m; ++i) {
      int j = (i + 1) % m;
      got += std::sqrt(std::max(eq[i] + eq[j] - eq[i] * eq[j], 0.0));
    }
    rep.equality_cases_checked.push_back("corner " + std::to_string(r));
    if (std::abs(got - lhs) > 1e-12 || std::abs(got - rhs) > 1e-12)
      rep.violations.push_back({"corner equality not tight", eq, got, rhs});
  }
  if (m == 3) {
    std::vector<double> eq(3, 1.0 / 3.0);
    double lhs = 3.0 * std::sqrt(5.0 / 9.0);
    double rhs = std::sqrt(5.0);
    rep.equality_cases_checked.push_back("uniform third");
    if (std::abs(lhs - rhs) > 1e-12)
      rep.violations.push_back({"uniform equality not tight", eq, lhs, rhs});
  }
  return rep;
}

// Checks the two scalar bounds on a uniform grid over [0,1]:
//   (1) (2/pi) arccos(1-x) >= (2/3) sqrt(x) + x/3, tight only at 0 and 1
//   (2) (2/3) sqrt(4+3x) + (2-x)/3 >= 2, tight only at 0
// minimum_found is the smallest lhs - rhs over both parts; target 0.
inline OptReport verify_scalar_bounds(long budget) {
  require(budget >= 2, ErrorCode::invalid_argument,
          "verify_scalar_bounds: need at least two grid points");
  OptReport rep;
  rep.minimum_found = std::numeric_limits<double>::infinity();
  auto part1 = [](double x) {
    return (2.0 / kPi) * std::acos(std::clamp(1.0 - x, -1.0, 1.0)) -
           (2.0 / 3.0) * std::sqrt(x) - x / 3.0;
  };
  auto part2 = [](double x) {
    return (2.0 / 3.0) * std::sqrt(4.0 + 3.0 * x) + (2.0 - x) / 3.0 - 2.0;
  };
  for (long j = 0; j < budget; ++j) {
    double x = double(j) / (budget - 1);
    ++rep.samples_used;
    bool edge1 = (j == 0 || j == budget - 1);
    double tol1 = edge1 ? 1e-12 : 1e-10;
    double d1 = part1(x);
    if (d1 < rep.minimum_found) {
      rep.minimum_found = d1;
      rep.argmin = {x};
    }
    if (d1 < -tol1)
      rep.violations.push_back({"arccos scalar bound failed", {x}, d1, 0.0});
    double tol2 = (j == 0) ? 1e-12 : 1e-10;
    double d2 = part2(x);
    if (d2 < rep.minimum_found) {
      rep.minimum_found = d2;
      rep.argmin = {x};
    }
    if (d2 < -tol2)
      rep.violations.push_back({"sqrt scalar bound failed", {x}, d2, 0.0});
  }
  rep.equality_cases_checked = {"part 1 at x=0", "part 1 at x=1",
                                "part 2 at x=0"};
  if (std::abs(part1(0.0)) > 1e-12)
    rep.violations.push_back({"part 1 not tight at 0", {0.0}, part1(0.0), 0.0});
  if (std::abs(part1(1.0)) > 1e-12)
    rep.violations.push_back({"part 1 not tight at 1", {1.0}, part1(1.0), 0.0});
  if (std::abs(part2(0.0)) > 1e-12)
    rep.violations.push_back({"part 2 not tight at 0", {0.0}, part2(0.0), 0.0});
  return rep;
}

}  // namespace hypwalk
