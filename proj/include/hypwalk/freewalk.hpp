#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <hypwalk/error.hpp>
#include <hypwalk/inequality.hpp>
#include <hypwalk/parallel.hpp>
#include <hypwalk/rng.hpp>

namespace hypwalk {

// Nearest-neighbor walks on two model groups: the free group F_m, whose 2m
// symbol slots are [i] = s_i and [i+m] = s_i^{-1} for i in [0, m), and the
// free product of 2m copies of Z/2Z, whose 2m slots are self-inverse.
enum class StepKind { free_group, involutive };

inline const char* step_kind_name(StepKind k) {
  return k == StepKind::free_group ? "free" : "involutive";
}

struct StepDistribution {
  StepKind kind = StepKind::free_group;
  std::vector<double> probabilities;  // one entry per symbol slot

  int symbol_count() const { return static_cast<int>(probabilities.size()); }

  int inverse_slot(int s) const {
    int n = symbol_count();
    return kind == StepKind::involutive ? s : (s + n / 2) % n;
  }
};

inline StepDistribution step_distribution(StepKind kind,
                                          std::vector<double> probabilities) {
  int n = static_cast<int>(probabilities.size());
  require(n >= 2 && n % 2 == 0, ErrorCode::invalid_argument,
          "step_distribution: expected 2m symbol probabilities");
  double sum = 0.0;
  for (double p : probabilities) {
    require(p >= 0.0, ErrorCode::invalid_argument,
            "step_distribution: probabilities must be nonnegative");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-14, ErrorCode::invalid_argument,
          "step_distribution: probabilities must sum to 1");
  StepDistribution mu;
  mu.kind = kind;
  mu.probabilities = std::move(probabilities);
  return mu;
}

inline StepDistribution uniform_step_distribution(StepKind kind, int symbols) {
  return step_distribution(kind,
                           std::vector<double>(symbols, 1.0 / symbols));
}

// First-passage probabilities x[s] = F_mu(e, symbol s), one per slot.
struct FirstPassage {
  StepKind kind = StepKind::free_group;
  std::vector<double> x;
  double residual = 0.0;
  long iterations = 0;
};

namespace detail {

// One sweep of the first-passage system.  Writing y for `from` composed
// with the inverse-slot involution, every slot obeys
// x_s = mu_s + x_s * sum_{t != s} mu_t y_t; the involutive kind is the
// same equation with y = from.  The map is monotone and sends [0,1]^2m
// into itself, so iterating from 0 walks up to the least fixed point.
inline void first_passage_step(const StepDistribution& mu,
                               const std::vector<double>& from,
                               std::vector<double>& to) {
  const int n = mu.symbol_count();
  const std::vector<double>& p = mu.probabilities;
  double all = 0.0;
  for (int t = 0; t < n; ++t) all += p[t] * from[mu.inverse_slot(t)];
  for (int s = 0; s < n; ++s) {
    double others = all - p[s] * from[mu.inverse_slot(s)];
    to[s] = std::min(1.0, p[s] + from[s] * others);
  }
}

}  // namespace detail

// Least fixed point of the tree first-passage system, reached by monotone
// Jacobi iteration from 0.  Iteration from 0 picks the probabilistic root
// when the system has several.
inline FirstPassage solve_first_passage(const StepDistribution& mu) {
  const int n = mu.symbol_count();
  std::vector<double> x(n, 0.0), next(n, 0.0);

  auto apply = [&](const std::vector<double>& from, std::vector<double>& to) {
    detail::first_passage_step(mu, from, to);
  };

  const long max_iterations = 1000000;
  long used = max_iterations;
  for (long it = 0; it < max_iterations; ++it) {
    apply(x, next);
    double change = 0.0;
    for (int s = 0; s < n; ++s)
      change = std::max(change, std::abs(next[s] - x[s]));
    x.swap(next);
    if (change < 1e-15) {
      used = it + 1;
      break;
    }
  }

  apply(x, next);
  double residual = 0.0;
  for (int s = 0; s < n; ++s)
    residual = std::max(residual, std::abs(next[s] - x[s]));
  if (used == max_iterations && residual >= 1e-12) {
    std::ostringstream msg;
    msg << "solve_first_passage: not settled after " << max_iterations
        << " iterations, residual " << std::scientific << residual;
    fail(ErrorCode::non_convergence, msg.str());
  }
  require(residual < 1e-12, ErrorCode::non_convergence,
          "solve_first_passage: fixed-point residual exceeds 1e-12");

  FirstPassage fp;
  fp.kind = mu.kind;
  fp.x = std::move(x);
  fp.residual = residual;
  fp.iterations = used;
  return fp;
}

// Boundary mass of the cylinder sets C(symbol s), one per slot.  The
// cylinders are disjoint and cover the boundary, so the values sum to 1
// whenever mu generates.
struct CylinderMeasures {
  StepKind kind = StepKind::free_group;
  std::vector<double> nu;

  double total() const { return std::accumulate(nu.begin(), nu.end(), 0.0); }
};

inline CylinderMeasures cylinder_measures(const FirstPassage& fp) {
  const int n = static_cast<int>(fp.x.size());
  CylinderMeasures cm;
  cm.kind = fp.kind;
  cm.nu.assign(n, 0.0);
  if (fp.kind == StepKind::involutive) {
    for (int s = 0; s < n; ++s) cm.nu[s] = fp.x[s] / (1.0 + fp.x[s]);
    return cm;
  }
  const int m = n / 2;
  for (int i = 0; i < m; ++i) {
    double fwd = fp.x[i];
    double bwd = fp.x[i + m];
    require(fwd * bwd < 1.0 - 1e-14, ErrorCode::degenerate_denominator,
            "cylinder_measures: x * xcheck reaches 1 for a generator pair");
    double denom = 1.0 - fwd * bwd;
    cm.nu[i] = fwd * (1.0 - bwd) / denom;
    cm.nu[i + m] = bwd * (1.0 - fwd) / denom;
  }
  return cm;
}

// Green distance -log F_mu(e, s) from the identity to a symbol.
inline double green_distance(const FirstPassage& fp, int symbol) {
  require(symbol >= 0 && symbol < static_cast<int>(fp.x.size()),
          ErrorCode::invalid_argument, "green_distance: symbol out of range");
  double x = fp.x[symbol];
  require(x > 0.0, ErrorCode::infinite_distance,
          "green_distance: first-passage probability is zero");
  return x >= 1.0 ? 0.0 : -std::log(x);
}

// Gambler's-ruin closed form for the nearest-neighbor walk on the integer
// line: the chance of ever moving one step up is min(1, p_up / p_down).
inline double integer_line_first_passage(double p_up, double p_down) {
  require(p_up >= 0.0 && p_down >= 0.0, ErrorCode::invalid_argument,
          "integer_line_first_passage: probabilities must be nonnegative");
  require(std::abs(p_up + p_down - 1.0) <= 1e-14, ErrorCode::invalid_argument,
          "integer_line_first_passage: probabilities must sum to 1");
  if (p_down == 0.0) return 1.0;
  return std::min(1.0, p_up / p_down);
}

// Witness search for the singularity criterion.  A slot s witnesses the
// criterion when its pairing length beats both the cylinder threshold
// (2 - x - xcheck) / (x + xcheck - 2 x xcheck) and the Green distance
// min(-log x, -log xcheck); at least one witness exists whenever
// sigma = sum 1/(1 + e^length) is below 1.
struct WitnessReport {
  int witness_index = -1;          // smallest witnessing slot
  double e_pow_length = 0.0;       // e^length at the witness
  double threshold = 0.0;          // cylinder threshold at the witness
  double sigma = 0.0;
  std::vector<int> witnesses;      // every witnessing slot
  std::vector<double> thresholds;  // cylinder threshold per slot
};

inline WitnessReport criterion_witness(const std::vector<double>& lengths,
                                       const StepDistribution& mu) {
  require(mu.kind == StepKind::free_group, ErrorCode::invalid_argument,
          "criterion_witness: comparison walk must live on the free group");
  require(static_cast<int>(lengths.size()) == mu.symbol_count(),
          ErrorCode::invalid_argument,
          "criterion_witness: expected one length per symbol slot");

  const double inf = std::numeric_limits<double>::infinity();
  WitnessReport w;
  w.sigma = sigma_of_lengths(lengths);
  FirstPassage fp = solve_first_passage(mu);
  const int n = mu.symbol_count();
  w.thresholds.assign(n, inf);
  for (int s = 0; s < n; ++s) {
    double fwd = fp.x[s];
    double bwd = fp.x[mu.inverse_slot(s)];
    double denom = fwd + bwd - 2.0 * fwd * bwd;
    double threshold = denom > 0.0 ? (2.0 - fwd - bwd) / denom : inf;
    w.thresholds[s] = threshold;
    double green_min = std::min(fwd > 0.0 ? -std::log(fwd) : inf,
                                bwd > 0.0 ? -std::log(bwd) : inf);
    if (std::exp(lengths[s]) > threshold && lengths[s] > green_min)
      w.witnesses.push_back(s);
  }

  if (w.sigma >= 1.0 - 1e-12) {
    std::ostringstream msg;
    msg << "criterion_witness: sigma = " << w.sigma
        << " is not below 1, so no witness is guaranteed (search found "
        << w.witnesses.size() << " candidate slots)";
    fail(ErrorCode::no_witness_guarantee, msg.str());
  }
  require(!w.witnesses.empty(), ErrorCode::no_witness_guarantee,
          "criterion_witness: no slot satisfies the witness inequalities");
  w.witness_index = w.witnesses.front();
  w.e_pow_length = std::exp(lengths[w.witness_index]);
  w.threshold = w.thresholds[w.witness_index];
  return w;
}

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  long hits = 0;
  long paths = 0;
  long horizon = 0;  // paths that never hit by the horizon bias the estimate down
};

// Monte Carlo estimate of the first-passage probability to a reduced target
// word on the tree.  Each path owns the stream (seed, path index), so the
// estimate does not depend on how paths are distributed over workers.
inline McEstimate mc_first_passage(const StepDistribution& mu,
                                   const std::vector<int>& target, long paths,
                                   long horizon, std::uint64_t seed,
                                   int workers = 1) {
  const int n = mu.symbol_count();
  require(paths >= 1, ErrorCode::invalid_argument,
          "mc_first_passage: need at least one path");
  require(horizon >= 1, ErrorCode::invalid_argument,
          "mc_first_passage: horizon must be at least 1");
  require(!target.empty(), ErrorCode::invalid_argument,
          "mc_first_passage: target word is empty");
  for (std::size_t i = 0; i < target.size(); ++i) {
    require(target[i] >= 0 && target[i] < n, ErrorCode::invalid_argument,
            "mc_first_passage: target symbol out of range");
    if (i > 0)
      require(target[i] != mu.inverse_slot(target[i - 1]),
              ErrorCode::invalid_argument,
              "mc_first_passage: target word is not reduced");
  }

  std::vector<double> cdf(n);
  double acc = 0.0;
  for (int s = 0; s < n; ++s) {
    acc += mu.probabilities[s];
    cdf[s] = acc;
  }

  const long span = static_cast<long>(target.size());
  std::vector<char> hit(paths, 0);
  detail::parallel_for(paths, workers, [&](long path) {
    RngStream rng(seed, static_cast<std::uint64_t>(path));
    std::vector<int> word;
    word.reserve(64);
    for (long t = 0; t < horizon; ++t) {
      int s = rng.next_index(cdf.data(), n);
      if (!word.empty() && word.back() == mu.inverse_slot(s))
        word.pop_back();
      else
        word.push_back(s);
      if (static_cast<long>(word.size()) == span && word == target) {
        hit[path] = 1;
        break;
      }
      // each step changes the word length by one, so a word this much
      // longer than the target cannot reach it before the horizon
      if (static_cast<long>(word.size()) - span > horizon - 1 - t) break;
    }
  });

  McEstimate r;
  r.paths = paths;
  r.horizon = horizon;
  for (char h : hit) r.hits += h;
  r.estimate = static_cast<double>(r.hits) / static_cast<double>(paths);
  r.standard_error =
      std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(paths));
  return r;
}

inline McEstimate mc_first_passage(const StepDistribution& mu, int symbol,
                                   long paths, long horizon,
                                   std::uint64_t seed, int workers = 1) {
  return mc_first_passage(mu, std::vector<int>{symbol}, paths, horizon, seed,
                          workers);
}

}  // namespace hypwalk
