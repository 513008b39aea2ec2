#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <utility>

#include "hypwalk/error.hpp"

// Poincare disk model. Points are complex numbers with |z| < 1; isometries are
// 2x2 complex matrices [[a, b], [conj(b), conj(a)]] with |a|^2 - |b|^2 = 1,
// acting by z -> (a z + b) / (conj(b) z + conj(a)), together with a flag for
// orientation-reversing maps (which conjugate z before applying the matrix).
// The matrix representation degrades under long composition chains, so every
// composition renormalizes the determinant and fixes the +- sign ambiguity.

namespace hypwalk {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kGeometryTol = 1e-9;

inline double wrap_two_pi(double t) {
  double w = std::fmod(t, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w;
}

// signed wrap to (-pi, pi]
inline double wrap_pi(double t) {
  double w = std::fmod(t, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  if (w > kPi) w -= 2.0 * kPi;
  return w;
}

struct DiskPoint {
  Complex z{0.0, 0.0};

  DiskPoint() = default;
  explicit DiskPoint(Complex v) : z(v) {
    require(std::norm(v) < 1.0, ErrorCode::point_outside_disk, "point must satisfy |z| < 1");
  }
  DiskPoint(double re, double im) : DiskPoint(Complex(re, im)) {}

  double re() const { return z.real(); }
  double im() const { return z.imag(); }
};

// ideal endpoints at angles theta1 (backward) and theta2 (forward)
struct Geodesic {
  double theta1;
  double theta2;

  Geodesic(double t1, double t2) : theta1(wrap_two_pi(t1)), theta2(wrap_two_pi(t2)) {
    double gap = wrap_two_pi(theta2 - theta1);
    require(gap > 1e-12 && gap < 2.0 * kPi - 1e-12, ErrorCode::degenerate_geodesic,
            "ideal endpoints must be distinct");
  }

  Complex endpoint1() const { return std::polar(1.0, theta1); }
  Complex endpoint2() const { return std::polar(1.0, theta2); }

  Geodesic reversed() const { return Geodesic(theta2, theta1); }
  // image under z -> -z (the antipodal geodesic)
  Geodesic negated() const { return Geodesic(theta1 + kPi, theta2 + kPi); }
};

struct Isometry {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};
  bool reverses = false;
};

// Divide out the determinant and pick the canonical representative of the
// +-(a,b) pair: Re(a) > 0, ties broken by Im(a) > 0, then Re(b) > 0, then
// Im(b) >= 0. Skips the rescale when the determinant is already 1 to within
// a few ulps, so canonicalizing twice is bit-stable.
inline Isometry canonicalize(Isometry f) {
  double det = std::norm(f.a) - std::norm(f.b);
  require(det > 0.0 && std::isfinite(det), ErrorCode::invalid_argument,
          "matrix does not represent a disk isometry");
  if (std::abs(det - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) {
    double s = 1.0 / std::sqrt(det);
    f.a *= s;
    f.b *= s;
  }
  bool flip;
  if (f.a.real() != 0.0) {
    flip = f.a.real() < 0.0;
  } else if (f.a.imag() != 0.0) {
    flip = f.a.imag() < 0.0;
  } else if (f.b.real() != 0.0) {
    flip = f.b.real() < 0.0;
  } else {
    flip = f.b.imag() < 0.0;
  }
  if (flip) {
    f.a = -f.a;
    f.b = -f.b;
  }
  return f;
}

inline Isometry identity_isometry() { return Isometry{}; }

namespace detail {

// Multiplication without the canonicalization of compose.  Callers that
// multiply matrices with large entries use this and manage the scale
// themselves: measuring det = |a|^2 - |b|^2 loses all precision once the
// entries are large, so the rescale inside canonicalize would inject noise
// of order eps * |a|^2 instead of cleaning the product up.
inline Isometry raw_compose(const Isometry& f, const Isometry& g) {
  Complex ga = g.a, gb = g.b;
  if (f.reverses) {
    ga = std::conj(ga);
    gb = std::conj(gb);
  }
  Isometry r;
  r.a = f.a * ga + f.b * std::conj(gb);
  r.b = f.a * gb + f.b * std::conj(ga);
  r.reverses = f.reverses != g.reverses;
  return r;
}

}  // namespace detail

// f after g (i.e. z -> f(g(z))); when f reverses, g's matrix is conjugated
// entrywise before the multiply
inline Isometry compose(const Isometry& f, const Isometry& g) {
  return canonicalize(detail::raw_compose(f, g));
}

inline Isometry inverse(const Isometry& f) {
  Isometry r;
  r.a = std::conj(f.a);
  r.b = -f.b;
  r.reverses = f.reverses;
  if (f.reverses) {
    r.a = std::conj(r.a);
    r.b = std::conj(r.b);
  }
  return canonicalize(r);
}

inline Complex apply_complex(const Isometry& f, Complex z) {
  if (f.reverses) z = std::conj(z);
  return (f.a * z + f.b) / (std::conj(f.b) * z + std::conj(f.a));
}

inline DiskPoint apply(const Isometry& f, const DiskPoint& p) {
  Complex w = apply_complex(f, p.z);
  double n = std::abs(w);
  if (n >= 1.0) w *= (1.0 - 1e-16) / n;  // clamp representational round-off at the boundary
  return DiskPoint(w);
}

inline bool approx_equal(const Isometry& f, const Isometry& g, double tol = kGeometryTol) {
  return f.reverses == g.reverses && std::abs(f.a - g.a) <= tol && std::abs(f.b - g.b) <= tol;
}

// Mobius map sending p to the origin
inline Complex to_origin(Complex p, Complex z) { return (z - p) / (1.0 - std::conj(p) * z); }
inline Complex from_origin(Complex p, Complex w) { return (w + p) / (1.0 + std::conj(p) * w); }

inline double dist(const DiskPoint& p, const DiskPoint& q) {
  double r = std::abs(to_origin(p.z, q.z));
  return 2.0 * std::atanh(r);
}

// d(0, f(0)) straight from the matrix; exact even when the image point would
// round onto the unit circle (cosh d = 1 + 2|b|^2 for unit determinant)
inline double origin_displacement(const Isometry& f) { return 2.0 * std::asinh(std::abs(f.b)); }

inline DiskPoint midpoint(const DiskPoint& p, const DiskPoint& q) {
  Complex w = to_origin(p.z, q.z);
  double r = std::abs(w);
  if (r < 1e-300) return p;
  double half = std::tanh(0.5 * std::atanh(r));
  return DiskPoint(from_origin(p.z, w * (half / r)));
}

// interior angle at b between the geodesic segments b->a and b->c, in [0, pi]
inline double angle_at(const DiskPoint& b, const DiskPoint& a, const DiskPoint& c) {
  Complex u = to_origin(b.z, a.z);
  Complex v = to_origin(b.z, c.z);
  require(std::abs(u) > 1e-14 && std::abs(v) > 1e-14, ErrorCode::invalid_argument,
          "angle undefined for coincident points");
  return std::abs(wrap_pi(std::arg(u) - std::arg(v)));
}

// unit tangent at z pointing along the geodesic from z toward the ideal point v
inline Complex tangent_toward(Complex z, Complex v) {
  Complex t = (v - z) / (1.0 - std::conj(z) * v);
  return t / std::abs(t);
}

inline Complex tangent_at(const Geodesic& g, const DiskPoint& z) {
  return tangent_toward(z.z, g.endpoint2());
}

// reflection across g; smooth in the endpoints, no diameter special case
inline Isometry reflection_in(const Geodesic& g) {
  double gap = wrap_two_pi(g.theta2 - g.theta1);
  double phi = g.theta1 + 0.5 * gap;
  double sd = std::sin(0.5 * gap);
  double cd = std::cos(0.5 * gap);
  Isometry r;
  r.a = Complex(0.0, -1.0) * std::polar(1.0, phi) / sd;
  r.b = Complex(0.0, cd / sd);
  r.reverses = true;
  return canonicalize(r);
}

inline Isometry move_to_origin(const DiskPoint& p) {
  double s = 1.0 / std::sqrt(1.0 - std::norm(p.z));
  Isometry r;
  r.a = Complex(s, 0.0);
  r.b = -p.z * s;
  return canonicalize(r);
}

inline Isometry rotation_about_origin(double theta) {
  Isometry r;
  r.a = std::polar(1.0, 0.5 * theta);
  r.b = Complex(0.0, 0.0);
  return canonicalize(r);
}

inline Isometry translation_x(double len) {
  Isometry r;
  r.a = Complex(std::cosh(0.5 * len), 0.0);
  r.b = Complex(std::sinh(0.5 * len), 0.0);
  return r;
}

inline Isometry rotation_pi(const DiskPoint& c) {
  double n = std::norm(c.z);
  Isometry r;
  r.a = Complex(0.0, (1.0 + n) / (1.0 - n));
  r.b = Complex(0.0, -2.0 / (1.0 - n)) * c.z;
  r.reverses = false;
  return canonicalize(r);
}

// fixed point of an elliptic orientation-preserving isometry
inline DiskPoint elliptic_center(const Isometry& f) {
  require(!f.reverses, ErrorCode::orientation_reversing, "elliptic center needs rotation");
  require(std::abs(f.a.real()) < 1.0, ErrorCode::invalid_argument, "isometry is not elliptic");
  if (std::abs(f.b) < 1e-300) return DiskPoint();
  double s = std::sqrt(1.0 - f.a.real() * f.a.real());
  double ia = f.a.imag();
  Complex num(0.0, ia >= 0.0 ? ia - s : ia + s);
  return DiskPoint(num / std::conj(f.b));
}

// axis of a hyperbolic orientation-preserving isometry, oriented so theta2 is
// the attracting endpoint
inline Geodesic axis_of(const Isometry& f) {
  require(!f.reverses, ErrorCode::orientation_reversing, "axis needs a translation");
  require(std::abs(f.a.real()) > 1.0, ErrorCode::invalid_argument, "isometry is not hyperbolic");
  double s = std::sqrt(f.a.real() * f.a.real() - 1.0);
  Complex z1 = Complex(s, f.a.imag()) / std::conj(f.b);
  Complex z2 = Complex(-s, f.a.imag()) / std::conj(f.b);
  // attracting fixed point has |f'(z)| < 1, i.e. |conj(b) z + conj(a)| > 1
  bool first_attracts = std::abs(std::conj(f.b) * z1 + std::conj(f.a)) > 1.0;
  Complex att = first_attracts ? z1 : z2;
  Complex rep = first_attracts ? z2 : z1;
  return Geodesic(std::arg(rep), std::arg(att));
}

inline std::optional<DiskPoint> intersect(const Geodesic& g1, const Geodesic& g2) {
  Isometry f = compose(reflection_in(g1), reflection_in(g2));
  if (std::abs(f.a.real()) >= 1.0 - kAlgebraTol) return std::nullopt;  // disjoint or tangent
  return elliptic_center(f);
}

// crossing point and the angle in (0, pi) between the oriented tangents
inline std::optional<std::pair<DiskPoint, double>> intersect_angle(const Geodesic& g1,
                                                                   const Geodesic& g2) {
  auto p = intersect(g1, g2);
  if (!p) return std::nullopt;
  Complex t1 = tangent_at(g1, *p);
  Complex t2 = tangent_at(g2, *p);
  double c = t1.real() * t2.real() + t1.imag() * t2.imag();
  return std::make_pair(*p, std::acos(std::clamp(c, -1.0, 1.0)));
}

inline DiskPoint foot_of_perpendicular(const Geodesic& g, const DiskPoint& p) {
  DiskPoint mirror = apply(reflection_in(g), p);
  return midpoint(p, mirror);
}

inline double dist_to_geodesic(const Geodesic& g, const DiskPoint& p) {
  return dist(p, foot_of_perpendicular(g, p));
}

// geodesic through p with initial direction angle dir, oriented forward
inline Geodesic geodesic_from_direction(const DiskPoint& p, double dir) {
  Complex e = std::polar(1.0, dir);
  Complex fwd = from_origin(p.z, e);
  Complex bwd = from_origin(p.z, -e);
  return Geodesic(std::arg(bwd), std::arg(fwd));
}

inline Geodesic geodesic_through(const DiskPoint& p, const DiskPoint& q) {
  Complex w = to_origin(p.z, q.z);
  require(std::abs(w) > 1e-14, ErrorCode::degenerate_geodesic,
          "no unique geodesic through coincident points");
  return geodesic_from_direction(p, std::arg(w));
}

inline Geodesic perpendicular_at(const Geodesic& g, const DiskPoint& x) {
  Complex t = tangent_at(g, x);
  return geodesic_from_direction(x, std::arg(t) + 0.5 * kPi);
}

// walk hyperbolic distance s from p in direction angle dir
inline DiskPoint flow(const DiskPoint& p, double dir, double s) {
  Complex e = std::polar(1.0, dir);
  return DiskPoint(from_origin(p.z, std::tanh(0.5 * s) * e));
}

// hyperbolic translation of length len along g (toward theta2 for len > 0),
// realized as a product of two half-turns with centers on the axis
inline Isometry translation_along(const Geodesic& g, double len) {
  DiskPoint x1 = foot_of_perpendicular(g, DiskPoint());
  Complex t = tangent_at(g, x1);
  DiskPoint x2 = flow(x1, std::arg(t), 0.5 * len);
  return compose(rotation_pi(x2), rotation_pi(x1));
}

// translation length from the trace: 2 acosh(|Re a|) for hyperbolic elements,
// 0 for elliptic and parabolic ones
inline double translation_length(const Isometry& f) {
  require(!f.reverses, ErrorCode::orientation_reversing,
          "translation length is defined for orientation-preserving isometries");
  double t = std::abs(f.a.real());
  if (t <= 1.0) return 0.0;
  return 2.0 * std::acosh(t);
}

}  // namespace hypwalk
