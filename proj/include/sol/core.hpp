#pragma once

// Group algebra and metric of the 3-dimensional solvable Lie group Sol.
//
// Sol is R^3 with the multiplication
//     (x,y,z) * (a,b,c) = (e^z a + x, e^{-z} b + y, c + z)
// and the left-invariant metric  e^{-2z} dx^2 + e^{2z} dy^2 + dz^2.
//
// Tangent vectors at the identity (the Lie algebra) and group elements are
// both coordinate triples, but they live in different spaces; they get
// distinct types so the two cannot be mixed up by accident.

#include <cmath>

#include "sol/error.hpp"

namespace sol {

/// Element of the Lie algebra of Sol, carried at the identity. The Euclidean
/// norm of the coordinates is the metric norm there.
struct TangentVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Element of the group Sol in global coordinates.
struct SolPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline TangentVector operator+(TangentVector a, TangentVector b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline TangentVector operator-(TangentVector a, TangentVector b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline TangentVector operator*(double s, TangentVector v) {
  return {s * v.x, s * v.y, s * v.z};
}
inline double norm(TangentVector v) {
  return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
}
inline double norm(SolPoint p) {
  return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
}

constexpr SolPoint identity() { return {0.0, 0.0, 0.0}; }

/// Largest |z| for which e^z is evaluated; beyond this the group operations
/// report a RangeError instead of returning inf.
constexpr double kMaxLogScale = 700.0;

namespace detail {
inline double checked_exp(double z, const char* who) {
  if (std::abs(z) > kMaxLogScale)
    throw RangeError(std::string(who) + ": |z| = " + std::to_string(std::abs(z)) +
                     " exceeds representable exp range");
  return std::exp(z);
}
}  // namespace detail

/// Group law of Sol.
inline SolPoint multiply(SolPoint p, SolPoint q) {
  const double ez = detail::checked_exp(p.z, "multiply");
  return {ez * q.x + p.x, q.y / ez + p.y, q.z + p.z};
}

/// Group inverse: (x,y,z)^{-1} = (-e^{-z} x, -e^z y, -z).
inline SolPoint inverse(SolPoint p) {
  const double ez = detail::checked_exp(p.z, "inverse");
  return {-p.x / ez, -ez * p.y, -p.z};
}

/// Conjugation g^{-1} * h * g of a horizontal element h (h.z = 0):
/// result is (e^{-g.z} h.x, e^{g.z} h.y, 0). Preserves the product h.x * h.y.
SolPoint conjugate_horizontal(SolPoint g, SolPoint h);

/// Diagonal metric coefficients of Sol at p: (e^{-2z}, e^{2z}, 1).
struct MetricCoefficients {
  double gxx;
  double gyy;
  double gzz;
};
inline MetricCoefficients metric_coefficients(SolPoint p) {
  const double ez = detail::checked_exp(p.z, "metric_coefficients");
  return {1.0 / (ez * ez), ez * ez, 1.0};
}

/// Length of the coordinate velocity v measured in the metric at p.
inline double metric_norm(SolPoint p, TangentVector v) {
  const MetricCoefficients g = metric_coefficients(p);
  return std::sqrt(g.gxx * v.x * v.x + g.gyy * v.y * v.y + g.gzz * v.z * v.z);
}

/// One of the four open sectors cut out by the planes x=0 and y=0,
/// identified by the signs of x and y. Doubles as the Klein-4 reflection
/// mapping the positive sector onto it.
struct Sector {
  int sign_x = 1;
  int sign_y = 1;
};

/// The isometries of Sol used for sector bookkeeping: the Klein-4
/// reflections (x,y,z) -> (sx*x, sy*y, z) optionally composed with the
/// swap (x,y,z) -> (y,x,-z). The same linear maps act on the Lie algebra.
struct Symmetry {
  int sign_x = 1;
  int sign_y = 1;
  bool swapped = false;  // apply (x,y,z) -> (y,x,-z) first

  static Symmetry reflection(Sector s) { return {s.sign_x, s.sign_y, false}; }
  static Symmetry swap() { return {1, 1, true}; }
};

inline TangentVector apply_symmetry(Symmetry s, TangentVector v) {
  if (s.swapped) v = {v.y, v.x, -v.z};
  return {s.sign_x * v.x, s.sign_y * v.y, v.z};
}
inline SolPoint apply_symmetry(Symmetry s, SolPoint p) {
  if (s.swapped) p = {p.y, p.x, -p.z};
  return {s.sign_x * p.x, s.sign_y * p.y, p.z};
}

/// Sector of v, with signs +1 on the coordinate planes.
inline Sector sector_of(TangentVector v) {
  return {v.x < 0.0 ? -1 : 1, v.y < 0.0 ? -1 : 1};
}
inline Sector sector_of(SolPoint p) {
  return {p.x < 0.0 ? -1 : 1, p.y < 0.0 ? -1 : 1};
}

}  // namespace sol
