#pragma once

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "hypwalk/hyperbolic.hpp"
#include "hypwalk/rng.hpp"

namespace testsupport {

using hypwalk::Complex;
using hypwalk::DiskPoint;
using hypwalk::RngStream;

// Random probability vector with strictly positive entries.  The largest
// entry absorbs the rounding drift so the sum is exactly representable as 1.
inline std::vector<double> random_probabilities(RngStream& rng, int n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    p[i] = rng.next_exponential() + 1e-3;
    total += p[i];
  }
  for (int i = 0; i < n; ++i) p[i] /= total;
  int top = 0;
  for (int i = 1; i < n; ++i)
    if (p[i] > p[top]) top = i;
  double sum = std::accumulate(p.begin(), p.end(), 0.0);
  p[top] += 1.0 - sum;
  return p;
}

// A pentagon A,B,C,D,E listed counterclockwise with right angles at B and E,
// an acute angle at C, and angle(C) + angle(D) <= pi.  B sits at the origin,
// C on the positive real axis, A on the positive imaginary axis (so the
// angle at B is right by construction), D hangs off C at the sampled angle,
// and E is the foot of the perpendicular from D onto the line through A
// (so the angle at E is right by construction).
struct Pentagon {
  DiskPoint a, b, c, d, e;
};

inline std::optional<Pentagon> try_sample_pentagon(RngStream& rng) {
  using namespace hypwalk;
  const double u = rng.next_double(0.4, 1.6);
  const double w = rng.next_double(0.4, 1.6);
  const double angle_c = rng.next_double(0.35, kPi / 2 - 0.05);
  const double theta_a = rng.next_double(-0.45, 0.35);
  const double s = rng.next_double(0.5, 1.8);

  DiskPoint b(0.0, 0.0);
  DiskPoint c = flow(b, 0.0, u);
  DiskPoint a = flow(b, kPi / 2, w);
  DiskPoint d = flow(c, kPi - angle_c, s);
  Geodesic side_ea = geodesic_from_direction(a, theta_a);
  DiskPoint e = foot_of_perpendicular(side_ea, d);

  if (dist(e, d) < 5e-2 || dist(e, a) < 5e-2) return std::nullopt;
  // E must lie ahead of A along the sampled direction, not behind it.
  Complex toward_e = tangent_toward(a.z, e.z);
  if (std::cos(std::arg(toward_e) - theta_a) < 0.9) return std::nullopt;

  const double ang_d = angle_at(d, c, e);
  const double ang_a = angle_at(a, e, b);
  if (angle_c + ang_d > kPi - 1e-6) return std::nullopt;
  if (ang_d < 0.05 || ang_a < 0.05 || ang_a > kPi - 0.05) return std::nullopt;

  // Counterclockwise convex winding in the chart keeps the pentagon simple.
  std::array<Complex, 5> ring{a.z, b.z, c.z, d.z, e.z};
  for (int i = 0; i < 5; ++i) {
    Complex p = ring[i];
    Complex q = ring[(i + 1) % 5];
    Complex r = ring[(i + 2) % 5];
    double cross = (q.real() - p.real()) * (r.imag() - q.imag()) -
                   (q.imag() - p.imag()) * (r.real() - q.real());
    if (cross < 1e-10) return std::nullopt;
  }
  return Pentagon{a, b, c, d, e};
}

inline Pentagon sample_pentagon(RngStream& rng) {
  for (int tries = 0; tries < 10000; ++tries) {
    if (auto p = try_sample_pentagon(rng)) return *p;
  }
  throw std::runtime_error("pentagon sampler starved");
}

// --- subprocess harness for the command-line binary ---

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string cli_binary() {
  const char* env = std::getenv("HYPWALK_BIN");
  return env ? std::string(env) : std::string("./hypwalk");
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string base = "cli_capture_" + std::to_string(counter++);
  const std::string out_path = base + ".out";
  const std::string err_path = base + ".err";
  const std::string cmd =
      cli_binary() + " " + args + " >" + out_path + " 2>" + err_path;
  int rc = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return result;
}

}  // namespace testsupport
