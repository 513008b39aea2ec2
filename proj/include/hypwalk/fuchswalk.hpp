#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <hypwalk/error.hpp>
#include <hypwalk/freewalk.hpp>
#include <hypwalk/hyperbolic.hpp>
#include <hypwalk/inequality.hpp>
#include <hypwalk/parallel.hpp>
#include <hypwalk/polygon.hpp>
#include <hypwalk/rng.hpp>

namespace hypwalk {

// One Monte Carlo batch of endpoints of the walk w_n = g_1 g_2 ... g_n.
struct WalkSample {
  std::uint64_t seed = 0;
  long steps = 0;
  std::vector<Isometry> terminal;       // per path, w_n
  std::vector<double> distance;         // per path, d(o, w_n o)
  std::vector<double> boundary_angle;   // per path, arg(w_n o) in [0, 2pi)

  long paths() const { return static_cast<long>(terminal.size()); }
};

namespace detail {

// Rescales the matrix to unit max magnitude, accumulating the log of the
// factor.  The determinant of a long product cannot be recovered in double
// precision (|a|^2 and |b|^2 agree to within rounding once the displacement
// is large), so the walk tracks the true scale separately and relies on the
// identity e^{d/2} = |a| + |b| of determinant-1 matrices.
inline void rescale(Isometry& f, double& log_scale) {
  double c = std::max(std::abs(f.a), std::abs(f.b));
  require(c > 0.0 && std::isfinite(c), ErrorCode::invalid_argument,
          "walk matrix degenerated during accumulation");
  f.a /= c;
  f.b /= c;
  log_scale += std::log(c);
}

// Sign convention of canonicalize without its determinant handling, which
// is meaningless for the reconstructed large-displacement matrices.
inline void canonical_sign(Isometry& f) {
  bool flip;
  if (f.a.real() != 0.0)
    flip = f.a.real() < 0.0;
  else if (f.a.imag() != 0.0)
    flip = f.a.imag() < 0.0;
  else if (f.b.real() != 0.0)
    flip = f.b.real() < 0.0;
  else
    flip = f.b.imag() < 0.0;
  if (flip) {
    f.a = -f.a;
    f.b = -f.b;
  }
}

// Expands a generator list into one matrix per symbol slot of mu.  The
// free kind accepts either m generators (inverses derived, slots [i+m])
// or the full 2m slot list; the involutive kind needs all 2m symbols.
inline std::vector<Isometry> slot_matrices(const std::vector<Isometry>& generators,
                                           const StepDistribution& mu) {
  const int n = mu.symbol_count();
  const int given = static_cast<int>(generators.size());
  if (given == n) return generators;
  if (mu.kind == StepKind::free_group && 2 * given == n) {
    std::vector<Isometry> mats(generators);
    mats.reserve(n);
    for (int i = 0; i < given; ++i) mats.push_back(inverse(generators[i]));
    return mats;
  }
  fail(ErrorCode::symbol_mismatch,
       "expected one matrix per symbol slot (or m free generators), got " +
           std::to_string(given) + " for " + std::to_string(n) + " slots");
}

}  // namespace detail

// Runs N independent length-n walks.  Each path draws from the stream
// (seed, path index) and owns its output slots, so the sample is identical
// for every worker count.  Matrices are renormalized every 32 steps.
inline WalkSample simulate(const std::vector<Isometry>& generators,
                           const StepDistribution& mu, long n, long N,
                           std::uint64_t seed, int workers = 1) {
  require(n >= 0 && N >= 0, ErrorCode::invalid_argument,
          "simulate: steps and paths must be nonnegative");
  std::vector<Isometry> mats = detail::slot_matrices(generators, mu);
  const int symbols = mu.symbol_count();

  std::vector<double> cdf(symbols);
  double acc = 0.0;
  for (int s = 0; s < symbols; ++s) {
    acc += mu.probabilities[s];
    cdf[s] = acc;
  }

  WalkSample sample;
  sample.seed = seed;
  sample.steps = n;
  sample.terminal.assign(N, identity_isometry());
  sample.distance.assign(N, 0.0);
  sample.boundary_angle.assign(N, 0.0);

  detail::parallel_for(N, workers, [&](long path) {
    RngStream rng(seed, static_cast<std::uint64_t>(path));
    Isometry w = identity_isometry();
    double log_scale = 0.0;
    for (long t = 1; t <= n; ++t) {
      int s = rng.next_index(cdf.data(), symbols);
      w = detail::raw_compose(w, mats[s]);
      if (t % 32 == 0) detail::rescale(w, log_scale);
    }
    detail::rescale(w, log_scale);
    double d = std::max(0.0, 2.0 * (log_scale + std::log(std::abs(w.a) + std::abs(w.b))));

    Isometry endpoint;
    endpoint.reverses = w.reverses;
    endpoint.a = w.a / std::abs(w.a) * std::cosh(0.5 * d);
    endpoint.b = std::abs(w.b) == 0.0
                     ? Complex(0.0, 0.0)
                     : w.b / std::abs(w.b) * std::sinh(0.5 * d);
    detail::canonical_sign(endpoint);

    sample.terminal[path] = endpoint;
    sample.distance[path] = d;
    sample.boundary_angle[path] =
        wrap_two_pi(std::arg(apply_complex(w, Complex(0.0, 0.0))));
  });
  return sample;
}

struct DriftEstimate {
  double drift = 0.0;          // mean of d(o, w_n o) / n
  double ci_half_width = 0.0;  // normal-approximation 95% interval
  long steps = 0;
  long paths = 0;
};

inline DriftEstimate estimate_drift(const WalkSample& sample) {
  require(sample.steps >= 1, ErrorCode::insufficient_sample,
          "estimate_drift: need at least one step");
  const long N = sample.paths();
  require(N >= 2, ErrorCode::insufficient_sample,
          "estimate_drift: need at least two paths");
  double mean = 0.0;
  for (double d : sample.distance) mean += d / sample.steps;
  mean /= static_cast<double>(N);
  double var = 0.0;
  for (double d : sample.distance) {
    double v = d / sample.steps - mean;
    var += v * v;
  }
  var /= static_cast<double>(N - 1);
  DriftEstimate e;
  e.drift = mean;
  e.ci_half_width = 1.96 * std::sqrt(var / static_cast<double>(N));
  e.steps = sample.steps;
  e.paths = N;
  return e;
}

namespace detail {

// Canonical matrix key identifying a group element: entries of the
// sign-canonicalized matrix rounded to 1e-9, plus the orientation flag.
// The surface-group relator has length 2m, so short products cannot land
// within rounding distance of each other except via exact cancellation.
struct ElementKey {
  std::int64_t are, aim, bre, bim;
  bool rev;

  bool operator<(const ElementKey& o) const {
    if (are != o.are) return are < o.are;
    if (aim != o.aim) return aim < o.aim;
    if (bre != o.bre) return bre < o.bre;
    if (bim != o.bim) return bim < o.bim;
    return rev < o.rev;
  }
};

inline ElementKey element_key(const Isometry& f) {
  Isometry c = canonicalize(f);
  auto grid = [](double x) { return std::llround(x * 1e9); };
  return ElementKey{grid(c.a.real()), grid(c.a.imag()), grid(c.b.real()),
                    grid(c.b.imag()), c.reverses};
}

}  // namespace detail

// Exact Shannon entropies of the convolution powers, H(mu^n)/n for
// n = 1..n_max, computed by enumerating products and merging group
// elements under the canonical matrix key.  The sequence is nonincreasing
// and converges to the walk entropy from above.
inline std::vector<double> entropy_upper_bounds(const StepDistribution& mu,
                                                const std::vector<Isometry>& generators,
                                                int n_max) {
  require(n_max >= 1, ErrorCode::invalid_argument,
          "entropy_upper_bounds: n_max must be at least 1");
  std::vector<Isometry> mats = detail::slot_matrices(generators, mu);
  const int symbols = mu.symbol_count();
  const long product_guard = 10000000;

  using Support = std::map<detail::ElementKey, std::pair<Isometry, double>>;
  Support current;
  for (int s = 0; s < symbols; ++s) {
    if (mu.probabilities[s] == 0.0) continue;
    auto key = detail::element_key(mats[s]);
    auto it = current.find(key);
    if (it == current.end())
      current.emplace(key, std::make_pair(canonicalize(mats[s]), mu.probabilities[s]));
    else
      it->second.second += mu.probabilities[s];
  }

  std::vector<double> bounds;
  bounds.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) {
      require(static_cast<long>(current.size()) * symbols <= product_guard,
              ErrorCode::support_too_large,
              "entropy_upper_bounds: convolution support exceeds the product guard");
      Support next;
      for (const auto& [key, entry] : current) {
        for (int s = 0; s < symbols; ++s) {
          if (mu.probabilities[s] == 0.0) continue;
          Isometry f = compose(entry.first, mats[s]);
          double p = entry.second * mu.probabilities[s];
          auto fkey = detail::element_key(f);
          auto it = next.find(fkey);
          if (it == next.end())
            next.emplace(fkey, std::make_pair(f, p));
          else
            it->second.second += p;
        }
      }
      current.swap(next);
    }
    double h = 0.0;
    for (const auto& [key, entry] : current) {
      double p = entry.second;
      if (p > 0.0) h -= p * std::log(p);
    }
    bounds.push_back(std::max(0.0, h) / n);
  }
  return bounds;
}

// Empirical boundary measure: bins [2*pi*k/K, 2*pi*(k+1)/K) over the
// endpoint angles.  quality_ok records whether at least 95% of the paths
// ended radially beyond 0.99, the gate for treating the angles as a proxy
// for the hitting measure.
struct MeasureHistogram {
  int bins = 0;
  std::vector<long> counts;
  std::vector<double> frequencies;
  long paths = 0;
  double far_fraction = 0.0;
  bool quality_ok = false;
};

inline MeasureHistogram boundary_histogram(const WalkSample& sample, int K) {
  require(K >= 1, ErrorCode::invalid_argument,
          "boundary_histogram: need at least one bin");
  MeasureHistogram h;
  h.bins = K;
  h.counts.assign(K, 0);
  h.frequencies.assign(K, 0.0);
  h.paths = sample.paths();
  const double radial_gate = 2.0 * std::atanh(0.99);
  long far = 0;
  for (long i = 0; i < h.paths; ++i) {
    int bin = static_cast<int>(sample.boundary_angle[i] * K / (2.0 * kPi));
    h.counts[std::min(bin, K - 1)] += 1;
    if (sample.distance[i] > radial_gate) ++far;
  }
  if (h.paths > 0) {
    for (int k = 0; k < K; ++k)
      h.frequencies[k] = static_cast<double>(h.counts[k]) / static_cast<double>(h.paths);
    h.far_fraction = static_cast<double>(far) / static_cast<double>(h.paths);
    h.quality_ok = h.far_fraction >= 0.95;
  }
  return h;
}

// Everything the dimension-of-the-hitting-measure story produces at desk
// scale: the drift estimate, the entropy upper bounds, their quotient
// (min_n H(mu^n)/n) / drift, the constant volume growth v = 1, and the
// length criterion verdict for cross-reference.
struct DimensionReport {
  DriftEstimate drift;
  std::vector<double> entropy_bounds;
  double dimension_bound = 0.0;
  double volume_growth = 1.0;
  CriterionReport criterion;
};

inline DimensionReport dimension_report(const SymmetricPolygon& P,
                                        const StepDistribution& mu, long n,
                                        long N, std::uint64_t seed, int n_max,
                                        int workers = 1) {
  require(mu.kind == StepKind::free_group, ErrorCode::symbol_mismatch,
          "dimension_report: the side-pairing walk uses the free kind");
  require(mu.symbol_count() == 2 * P.m, ErrorCode::symbol_mismatch,
          "dimension_report: measure must cover the 2m side pairings");
  std::vector<Isometry> generators = side_pairings(P);

  DimensionReport r;
  WalkSample sample = simulate(generators, mu, n, N, seed, workers);
  r.drift = estimate_drift(sample);
  r.entropy_bounds = entropy_upper_bounds(mu, generators, n_max);
  r.criterion = criterion(pairing_lengths(P));
  double h_min = *std::min_element(r.entropy_bounds.begin(), r.entropy_bounds.end());
  if (h_min <= 0.0) {
    r.dimension_bound = 0.0;
  } else {
    require(r.drift.drift > 0.0, ErrorCode::insufficient_sample,
            "dimension_report: drift estimate vanished, no dimension bound");
    r.dimension_bound = h_min / r.drift.drift;
  }
  return r;
}

}  // namespace hypwalk
