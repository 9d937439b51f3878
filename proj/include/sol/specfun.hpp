#pragma once

// Scalar special functions: the arithmetic-geometric mean, the minimality
// functional mu, the complete elliptic integrals K and E, and the period /
// holonomy functions of the loop level sets of the structure field.

#include "sol/core.hpp"

namespace sol {

/// Arithmetic-geometric mean of alpha0 and beta0 (order-insensitive).
/// Iterates (a,b) -> (sqrt(ab), (a+b)/2) until the gap is below
/// 1e-15 * max(beta0, 1). Rejects negative input.
double agm(double alpha0, double beta0);

/// mu(V) = AGM( sqrt|xy|, (1/2) sqrt((|x|+|y|)^2 + z^2) ).
/// Vanishes iff x*y = 0; homogeneous of degree 1; invariant under the
/// coordinate sign changes and the swap x <-> y.
double mu(TangentVector v);

/// Complete elliptic integral of the first kind,
/// K(m) = (pi/2) / AGM(sqrt(1-m), 1), for 0 <= m < 1.
double elliptic_K(double m);

/// Complete elliptic integral of the second kind, 0 <= m <= 1,
/// by the AGM descent (running sum of scaled squared half-gaps).
double elliptic_E(double m);

/// A closed orbit of the structure field on the unit sphere of the Lie
/// algebra, identified by its diagonal parameter a: the orbit through
/// U_a = (a, a, sqrt(1-2a^2)), 0 < a < sqrt(2)/2.
struct LoopLevelSet {
  double a;  ///< diagonal parameter, in (0, sqrt(2)/2)
  double L;  ///< period, in (pi*sqrt(2), inf)
  double m;  ///< elliptic parameter (1-2a^2)/(1+2a^2), in (0,1)
  double H;  ///< holonomy invariant, in (pi, inf)
};

inline constexpr double kPi = 3.14159265358979323846;
/// Minimal loop period = injectivity radius of Sol.
inline const double kMinPeriod = kPi * std::sqrt(2.0);

/// Period of the loop level set through U_a:
/// L_a = pi / AGM(a, (1/2) sqrt(1+2a^2)). Strictly decreasing in a.
double period_from_a(double a);

/// Same period evaluated by adaptive quadrature of the integral
/// L_a = int_0^{t_a} 4 dt / sqrt(1 - 2 a^2 cosh 2t),
/// t_a = (1/2) arccosh(1/(2a^2)), with the endpoint singularity removed
/// by the substitution t = t_a sin^2(s). Agrees with period_from_a to 1e-8.
double period_integral(double a);

/// Upper integration limit t_a = (1/2) arccosh(1/(2a^2)); also the largest
/// |z| reached on the Grayson cylinder of level a.
double level_time_bound(double a);

/// Elliptic parameter of level a: m = (1-2a^2)/(1+2a^2).
double elliptic_m_from_a(double a);

/// Full level-set record for a given diagonal parameter a.
LoopLevelSet level_from_a(double a);

/// Inverts period_from_a by bisection: the unique a in (0, sqrt(2)/2) with
/// period L, resolved to |dL| <= 1e-12 * L. Requires L > pi*sqrt(2).
LoopLevelSet level_set_from_period(double L);

/// Holonomy invariant H_L for L >= pi*sqrt(2): solves
/// L = sqrt(8+8m) K(m) for m in [0,1), then
/// H_L = 4 E(m)/sqrt(1-m) - sqrt(4-4m) K(m).
/// Strictly increasing and proper in L; H(pi*sqrt(2)) = pi.
double holonomy_from_period(double L);

/// Inverts holonomy_from_period: the L >= pi*sqrt(2) with H_L = h, h >= pi.
double period_from_holonomy(double h);

/// Exact point of the level-a orbit: (a e^tau, a e^{-tau}, zsign*sqrt(1 -
/// 2a^2 cosh 2tau)) for |tau| <= t_a. tau = 0 is the apex U_a (zsign=+1);
/// tau = +-t_a are the two z=0 points.
TangentVector level_orbit_point(double a, double tau, int zsign);

/// The z=0 point of the level-a orbit with x > y (start point of the
/// wavefront parametrization): (x0, y0, 0) with x0 y0 = a^2, x0^2+y0^2 = 1.
TangentVector level_zero_point(double a);

namespace detail {
/// log(H_L), valid far beyond the range where H_L itself overflows.
/// Returns a large sentinel (> 700) once H exceeds the double range.
double log_holonomy_from_period(double L);
}  // namespace detail

}  // namespace sol
