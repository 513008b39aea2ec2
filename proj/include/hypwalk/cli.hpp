#pragma once

// Command line driver.  Exit codes: 0 on success, 1 on a domain error
// (reported to stderr as a one-line JSON envelope), 2 on a usage error.
// Randomized commands always take an explicit --seed; worker counts come
// from --threads or HYPWALK_THREADS and never change results.

#include <cstdint>
#include <iostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "hypwalk/coxeter.hpp"
#include "hypwalk/error.hpp"
#include "hypwalk/freewalk.hpp"
#include "hypwalk/fuchswalk.hpp"
#include "hypwalk/inequality.hpp"
#include "hypwalk/io.hpp"
#include "hypwalk/parallel.hpp"
#include "hypwalk/polygon.hpp"

namespace hypwalk::cli {

namespace detail {

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos])))
      ++pos;
    require(!item.empty() && pos == item.size(), ErrorCode::invalid_argument,
            "cannot parse \"" + item + "\" as a number");
    out.push_back(v);
  }
  require(!out.empty(), ErrorCode::invalid_argument, "empty number list");
  return out;
}

inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_list(text)) {
    int i = static_cast<int>(std::lround(v));
    require(std::abs(v - i) < 1e-9, ErrorCode::invalid_argument,
            "expected an integer list");
    out.push_back(i);
  }
  return out;
}

inline std::vector<double> angle_vector(const std::string& text, int m) {
  if (text == "uniform") return std::vector<double>(m, kPi / m);
  std::vector<double> v = parse_list(text);
  require(static_cast<int>(v.size()) == m, ErrorCode::invalid_argument,
          "--alpha needs m comma-separated radians or 'uniform'");
  return v;
}

inline std::vector<double> weight_vector(const std::string& text, int m) {
  if (text == "uniform") return std::vector<double>(m, 1.0);
  std::vector<double> v = parse_list(text);
  require(static_cast<int>(v.size()) == m, ErrorCode::invalid_argument,
          "--weights needs m comma-separated values or 'uniform'");
  return v;
}

inline StepKind parse_kind(const std::string& name) {
  if (name == "free") return StepKind::free_group;
  if (name == "involutive") return StepKind::involutive;
  fail(ErrorCode::invalid_argument,
       "--kind must be \"free\" or \"involutive\"");
}

inline std::string error_envelope(const std::string& code,
                                  const std::string& message) {
  return "{\"error\": \"" + code + "\", \"message\": \"" +
         io::detail::escape(message) + "\"}\n";
}

}  // namespace detail

inline int run(int argc, const char* const* argv) {
  CLI::App app{
      "hypwalk: centrally symmetric hyperbolic polygons, their side-pairing "
      "and reflection groups, singularity criteria for hitting measures, "
      "and reproducible random walk experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hypwalk 1.0.0");

  struct Args {
    int m = 3;
    std::string alpha = "uniform";
    std::string weights = "uniform";
    int k = 0;
    double angle_sum = 0.0;
    std::string input;
    std::string output;
    std::string plot;
    std::string measure_file;
    std::string kind = "free";
    std::string probs;
    int uniform_symbols = 0;
    std::string mu = "uniform";
    std::string lengths;
    long budget = 100000;
    std::uint64_t seed = 0;
    long steps = 100;
    long paths = 1000;
    int bins = 16;
    int n_max = 2;
    int threads = 0;
  };
  Args a;

  auto workers = [&a]() { return a.threads > 0 ? a.threads : default_workers(); };

  auto emit = [&a](const std::string& content) {
    if (a.output.empty())
      std::cout << content;
    else
      io::write_file(a.output, content);
  };

  auto load_document = [&a]() {
    return io::parse_polygon(io::read_file(a.input));
  };

  // Measure of the side-pairing walk: the 2m slots are g_1..g_m followed
  // by their inverses.
  auto walk_measure = [&a](int m) {
    if (!a.measure_file.empty())
      return io::parse_measure(io::read_file(a.measure_file));
    if (a.mu == "uniform")
      return uniform_step_distribution(StepKind::free_group, 2 * m);
    return step_distribution(StepKind::free_group, detail::parse_list(a.mu));
  };

  auto add_threads = [&a](CLI::App* sub) {
    sub->add_option("--threads", a.threads,
                    "worker threads (default: machine parallelism)")
        ->envname("HYPWALK_THREADS");
  };

  auto add_output = [&a](CLI::App* sub) {
    sub->add_option("-o,--output", a.output,
                    "write the result here instead of stdout");
  };

  // ------------------------------------------------------------------
  // polygon build | check | dual | reduce

  auto* polygon_cmd =
      app.add_subcommand("polygon", "build and transform symmetric polygons");
  polygon_cmd->require_subcommand(1);

  auto* pbuild = polygon_cmd->add_subcommand(
      "build", "solve a polygon from central angles, apothem weights, and an "
               "optional angle-sum target");
  pbuild->add_option("--m", a.m, "number of side classes (2m sides)")
      ->required();
  pbuild->add_option("--alpha", a.alpha,
                     "m central angles in radians, comma separated, or "
                     "'uniform'");
  pbuild->add_option("--weights", a.weights,
                     "m relative apothem weights, or 'uniform'");
  auto* pbuild_k = pbuild->add_option(
      "--k", a.k, "angle-cycle order: scale apothems until the interior "
                  "angles of one symmetry class sum to 2*pi/k");
  auto* pbuild_sum = pbuild->add_option(
      "--angle-sum", a.angle_sum,
      "explicit target for the same angle sum, in radians");
  pbuild_k->excludes(pbuild_sum);
  add_output(pbuild);
  pbuild->callback([&a, pbuild_k, pbuild_sum, emit] {
    PolygonSpec spec;
    spec.m = a.m;
    spec.central_angles = detail::angle_vector(a.alpha, a.m);
    spec.weights = detail::weight_vector(a.weights, a.m);
    if (pbuild_k->count()) spec.target_k = a.k;
    if (pbuild_sum->count()) spec.target_angle_sum = a.angle_sum;
    emit(io::polygon_json(io::document_of(build(spec))));
  });

  auto* pcheck = polygon_cmd->add_subcommand(
      "check", "validate a polygon document against a rebuild from its "
               "apothems and angles");
  pcheck->add_option("file", a.input, "polygon document")->required();
  add_output(pcheck);
  pcheck->callback([&a, load_document, emit] {
    io::PolygonDocument d = load_document();
    SymmetricPolygon P = io::to_polygon(d);
    double dev = 0.0;
    for (int i = 0; i < P.m; ++i)
      dev = std::max(dev, std::abs(d.gamma[i] - P.gamma[i]));
    for (int i = 0; i < 2 * P.m; ++i) {
      dev = std::max(dev, std::abs(d.vertices[i][0] - P.vertices[i].re()));
      dev = std::max(dev, std::abs(d.vertices[i][1] - P.vertices[i].im()));
      dev = std::max(dev, std::abs(d.midpoints[i][0] - P.midpoints[i].re()));
      dev = std::max(dev, std::abs(d.midpoints[i][1] - P.midpoints[i].im()));
    }
    require(dev <= 1e-8, ErrorCode::reconstruction_failed,
            "stored fields disagree with the rebuilt polygon by " +
                io::format_number(dev));
    std::optional<int> cycle;
    try {
      cycle = check_cycle(P);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_integer_cycle) throw;
    }
    require(!d.k || (cycle && *cycle == *d.k), ErrorCode::no_integer_cycle,
            "stored k does not match the measured angle sum");
    std::string out = "{\n  \"m\": " + std::to_string(P.m);
    out += ",\n  \"k\": " + (cycle ? std::to_string(*cycle) : std::string("null"));
    out += ",\n  \"angle_sum\": " + io::format_number(P.angle_sum_half());
    out += ",\n  \"max_deviation\": " + io::format_number(dev);
    out += ",\n  \"valid\": true\n}\n";
    emit(out);
  });

  auto* pdual = polygon_cmd->add_subcommand(
      "dual", "quotient an angle-sum-4*pi polygon to its dual m-gon");
  pdual->add_option("file", a.input, "polygon document")->required();
  add_output(pdual);
  pdual->callback([&a, load_document, emit] {
    emit(io::dual_json(dual(io::to_polygon(load_document()))));
  });

  auto* preduce = polygon_cmd->add_subcommand(
      "reduce", "surgery away obtuse vertex angles, keeping the half-length "
                "weight sum monotone");
  preduce->add_option("file", a.input, "polygon document")->required();
  add_output(preduce);
  preduce->callback([&a, load_document, emit] {
    emit(io::polygon_json(
        io::document_of(reduce_to_acute(io::to_polygon(load_document())))));
  });

  // ------------------------------------------------------------------
  // criterion (translation side pairings)

  auto* crit = app.add_subcommand(
      "criterion", "singularity criterion for the side-pairing translations "
                   "of a polygon document");
  crit->add_option("file", a.input, "polygon document")->required();
  add_output(crit);
  crit->callback([&a, load_document, emit] {
    SymmetricPolygon P = io::to_polygon(load_document());
    CriterionReport rep = criterion(pairing_lengths(P));
    io::ReportDocument r;
    r.sigma = rep.sigma;
    r.margin = rep.margin;
    r.verdict = verdict_name(rep.verdict);
    r.lengths = rep.lengths;
    emit(io::report_json(r));
  });

  // ------------------------------------------------------------------
  // coxeter criterion (side reflections)

  auto* coxeter_cmd =
      app.add_subcommand("coxeter", "reflection-group variant");
  coxeter_cmd->require_subcommand(1);
  auto* ccrit = coxeter_cmd->add_subcommand(
      "criterion", "singularity criterion for the side reflections of a "
                   "polygon with angles pi/k_i");
  ccrit->add_option("file", a.input, "polygon document")->required();
  ccrit->add_option("--mu", a.mu,
                    "step probabilities for the 2m reflections, comma "
                    "separated, or 'uniform'");
  ccrit->add_option("--mu-file", a.measure_file, "measure document");
  add_output(ccrit);
  ccrit->callback([&a, load_document, emit] {
    io::PolygonDocument d = load_document();
    CoxeterPolygon C = coxeter_polygon(io::to_polygon(d));
    require(!d.k_values || *d.k_values == C.k,
            ErrorCode::angle_not_submultiple,
            "stored k_values disagree with the recognized reflection orders");
    StepDistribution mu =
        !a.measure_file.empty()
            ? io::parse_measure(io::read_file(a.measure_file))
            : (a.mu == "uniform"
                   ? uniform_step_distribution(StepKind::involutive,
                                               2 * C.polygon.m)
                   : step_distribution(StepKind::involutive,
                                       detail::parse_list(a.mu)));
    CriterionReport rep = coxeter_criterion(C, mu);
    io::ReportDocument r;
    r.sigma = rep.sigma;
    r.margin = rep.margin;
    r.verdict = verdict_name(rep.verdict);
    r.lengths = rep.lengths;
    emit(io::report_json(r));
  });

  // ------------------------------------------------------------------
  // free solve | cylinders | witness

  auto* free_cmd = app.add_subcommand(
      "free", "nearest-neighbor walks on free groups and free products of "
              "order-two factors");
  free_cmd->require_subcommand(1);

  auto add_measure_source = [&a](CLI::App* sub) {
    auto* grp = sub->add_option_group("measure", "step distribution source");
    grp->add_option("--measure", a.measure_file, "measure document");
    grp->add_option("--p", a.probs,
                    "slot probabilities, comma separated (free kind: the m "
                    "generators followed by the m inverses)");
    grp->add_option("--uniform", a.uniform_symbols,
                    "uniform distribution on this many slots");
    grp->require_option(1);
    sub->add_option("--kind", a.kind,
                    "symbol structure for --p/--uniform: 'free' or "
                    "'involutive'");
  };

  auto resolve_measure = [&a]() -> StepDistribution {
    if (!a.measure_file.empty())
      return io::parse_measure(io::read_file(a.measure_file));
    StepKind kind = detail::parse_kind(a.kind);
    if (a.uniform_symbols > 0)
      return uniform_step_distribution(kind, a.uniform_symbols);
    return step_distribution(kind, detail::parse_list(a.probs));
  };

  auto* fsolve = free_cmd->add_subcommand(
      "solve", "first-passage probabilities (least fixed point)");
  add_measure_source(fsolve);
  add_output(fsolve);
  fsolve->callback([resolve_measure, emit] {
    emit(io::first_passage_json(solve_first_passage(resolve_measure())));
  });

  auto* fcyl = free_cmd->add_subcommand(
      "cylinders", "hitting measure of the one-symbol cylinders");
  add_measure_source(fcyl);
  add_output(fcyl);
  fcyl->callback([resolve_measure, emit] {
    emit(io::cylinders_json(
        cylinder_measures(solve_first_passage(resolve_measure()))));
  });

  auto* fwit = free_cmd->add_subcommand(
      "witness", "index whose translation length beats the cylinder "
                 "threshold of the comparison walk");
  fwit->add_option("--lengths", a.lengths,
                   "translation lengths, one per slot, comma separated")
      ->required();
  add_measure_source(fwit);
  add_output(fwit);
  fwit->callback([&a, resolve_measure, emit] {
    std::vector<double> lengths = detail::parse_list(a.lengths);
    StepDistribution mu = resolve_measure();
    WitnessReport w = criterion_witness(lengths, mu);
    CriterionReport rep = criterion(lengths);
    io::ReportDocument r;
    r.sigma = rep.sigma;
    r.margin = rep.margin;
    r.verdict = verdict_name(rep.verdict);
    r.lengths = rep.lengths;
    r.witness = w;
    emit(io::report_json(r));
  });

  // ------------------------------------------------------------------
  // verify arccos | sqrt | scalar

  auto* verify_cmd = app.add_subcommand(
      "verify", "sampled verification of the optimization inequalities");
  verify_cmd->require_subcommand(1);

  auto* varccos = verify_cmd->add_subcommand(
      "arccos", "cyclic arccos sum over the shifted simplex stays >= pi");
  varccos->add_option("--m", a.m, "number of variables")->required();
  varccos->add_option("--budget", a.budget, "random sample count");
  varccos->add_option("--seed", a.seed, "random seed")->required();
  add_output(varccos);
  varccos->callback([&a, emit] {
    emit(io::opt_report_json(verify_arccos_bound(a.m, a.budget, a.seed)));
  });

  auto* vsqrt = verify_cmd->add_subcommand(
      "sqrt", "sqrt-Delta sum dominates sqrt(4 + 3 sum x_i x_{i+1}) on the "
              "simplex");
  vsqrt->add_option("--m", a.m, "number of variables")->required();
  vsqrt->add_option("--budget", a.budget, "random sample count");
  vsqrt->add_option("--seed", a.seed, "random seed")->required();
  add_output(vsqrt);
  vsqrt->callback([&a, emit] {
    emit(io::opt_report_json(verify_sqrt_bound(a.m, a.budget, a.seed)));
  });

  auto* vscalar = verify_cmd->add_subcommand(
      "scalar", "the two one-variable bounds on a [0,1] grid");
  vscalar->add_option("--budget", a.budget, "grid size");
  add_output(vscalar);
  vscalar->callback([&a, emit] {
    emit(io::opt_report_json(verify_scalar_bounds(a.budget)));
  });

  // ------------------------------------------------------------------
  // walk simulate | drift | entropy | histogram | report

  auto* walk_cmd = app.add_subcommand(
      "walk", "random walks on the side-pairing group of a polygon");
  walk_cmd->require_subcommand(1);

  auto add_walk_measure = [&a](CLI::App* sub) {
    sub->add_option("--mu", a.mu,
                    "step probabilities for the 2m side pairings, comma "
                    "separated, or 'uniform'");
    sub->add_option("--mu-file", a.measure_file, "measure document");
  };

  auto load_walk = [&a, load_document, walk_measure]() {
    SymmetricPolygon P = io::to_polygon(load_document());
    StepDistribution mu = walk_measure(P.m);
    return std::make_tuple(std::move(P), mu);
  };

  auto* wsim = walk_cmd->add_subcommand(
      "simulate", "per-path terminal distance and boundary angle, as CSV");
  wsim->add_option("file", a.input, "polygon document")->required();
  wsim->add_option("--n", a.steps, "steps per path")->required();
  wsim->add_option("--paths", a.paths, "number of paths")->required();
  wsim->add_option("--seed", a.seed, "random seed")->required();
  add_walk_measure(wsim);
  add_threads(wsim);
  add_output(wsim);
  wsim->callback([&a, load_walk, workers, emit] {
    auto [P, mu] = load_walk();
    emit(io::sample_csv(
        simulate(side_pairings(P), mu, a.steps, a.paths, a.seed, workers())));
  });

  auto* wdrift = walk_cmd->add_subcommand(
      "drift", "rate of escape with a normal-approximation interval");
  wdrift->add_option("file", a.input, "polygon document")->required();
  wdrift->add_option("--n", a.steps, "steps per path")->required();
  wdrift->add_option("--paths", a.paths, "number of paths")->required();
  wdrift->add_option("--seed", a.seed, "random seed")->required();
  add_walk_measure(wdrift);
  add_threads(wdrift);
  add_output(wdrift);
  wdrift->callback([&a, load_walk, workers, emit] {
    auto [P, mu] = load_walk();
    emit(io::drift_json(estimate_drift(
        simulate(side_pairings(P), mu, a.steps, a.paths, a.seed, workers()))));
  });

  auto* wentropy = walk_cmd->add_subcommand(
      "entropy", "entropy upper bounds H(mu^n)/n from exact convolution "
                 "powers");
  wentropy->add_option("file", a.input, "polygon document")->required();
  wentropy->add_option("--n-max", a.n_max, "largest convolution power");
  add_walk_measure(wentropy);
  wentropy->add_option("--plot-data", a.plot,
                       "also write an (n, bound) series to this file");
  add_output(wentropy);
  wentropy->callback([&a, load_walk, emit] {
    auto [P, mu] = load_walk();
    std::vector<double> bounds =
        entropy_upper_bounds(mu, side_pairings(P), a.n_max);
    emit(io::entropy_json(bounds));
    if (!a.plot.empty()) {
      std::vector<std::pair<double, double>> xy;
      for (std::size_t i = 0; i < bounds.size(); ++i)
        xy.emplace_back(double(i + 1), bounds[i]);
      io::write_file(a.plot, io::plot_series(xy));
    }
  });

  auto* whist = walk_cmd->add_subcommand(
      "histogram", "empirical boundary-angle histogram, as CSV");
  whist->add_option("file", a.input, "polygon document")->required();
  whist->add_option("--bins", a.bins, "number of angle bins");
  whist->add_option("--n", a.steps, "steps per path")->required();
  whist->add_option("--paths", a.paths, "number of paths")->required();
  whist->add_option("--seed", a.seed, "random seed")->required();
  add_walk_measure(whist);
  add_threads(whist);
  whist->add_option("--plot-data", a.plot,
                    "also write a (bin center, frequency) series to this "
                    "file");
  add_output(whist);
  whist->callback([&a, load_walk, workers, emit] {
    auto [P, mu] = load_walk();
    MeasureHistogram h = boundary_histogram(
        simulate(side_pairings(P), mu, a.steps, a.paths, a.seed, workers()),
        a.bins);
    emit(io::histogram_csv(h));
    if (!a.plot.empty()) {
      std::vector<std::pair<double, double>> xy;
      for (int i = 0; i < h.bins; ++i)
        xy.emplace_back(2.0 * kPi * (i + 0.5) / h.bins, h.frequencies[i]);
      io::write_file(a.plot, io::plot_series(xy));
    }
  });

  auto* wreport = walk_cmd->add_subcommand(
      "report", "drift, entropy bounds, dimension bound, and the criterion "
                "verdict in one document");
  wreport->add_option("file", a.input, "polygon document")->required();
  wreport->add_option("--n", a.steps, "steps per path")->required();
  wreport->add_option("--paths", a.paths, "number of paths")->required();
  wreport->add_option("--seed", a.seed, "random seed")->required();
  wreport->add_option("--n-max", a.n_max, "largest convolution power");
  add_walk_measure(wreport);
  add_threads(wreport);
  add_output(wreport);
  wreport->callback([&a, load_walk, workers, emit] {
    auto [P, mu] = load_walk();
    DimensionReport rep =
        dimension_report(P, mu, a.steps, a.paths, a.seed, a.n_max, workers());
    io::ReportDocument r;
    r.sigma = rep.criterion.sigma;
    r.margin = rep.criterion.margin;
    r.verdict = verdict_name(rep.criterion.verdict);
    r.lengths = rep.criterion.lengths;
    r.drift = rep.drift.drift;
    r.entropy_bounds = rep.entropy_bounds;
    r.dimension_bound = rep.dimension_bound;
    emit(io::report_json(r));
  });

  // ------------------------------------------------------------------

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::string code = error_code_name(e.code());
    std::string message = e.what();
    if (message.rfind(code + ": ", 0) == 0) message = message.substr(code.size() + 2);
    std::cerr << detail::error_envelope(code, message);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << detail::error_envelope("Internal", e.what());
    return 1;
  }
  return 0;
}

}  // namespace hypwalk::cli
