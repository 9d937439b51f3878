#pragma once

// Minimality classification, cut time, the polar curves bounding the cut
// locus in the plane z=0, the wavefront of symmetric small vectors, point
// membership against the cut locus, the inverse exponential map, and the
// geodesic distance solver.

#include <optional>
#include <vector>

#include "sol/core.hpp"
#include "sol/flow.hpp"
#include "sol/specfun.hpp"

namespace sol {

enum class GeodesicClassTag { Small, Perfect, Large };

struct GeodesicClass {
  GeodesicClassTag tag;
  double mu;      ///< value of the minimality functional
  double margin;  ///< mu - pi
};

/// Classifies V by mu(V) against pi. The geodesic segment t -> E(tV),
/// t in [0,1], is a distance minimizer iff the class is Small or Perfect.
/// tol_perfect is the half-width of the Perfect band.
GeodesicClass classify(TangentVector v, double tol_perfect = 1e-9);

inline bool is_minimizer(const GeodesicClass& c) {
  return c.tag != GeodesicClassTag::Large;
}

/// Cut time of the unit direction u: pi / mu(u), or +infinity when
/// mu(u) = 0 (i.e. u.x * u.y = 0). gamma_{t u} minimizes iff t <= cut_time.
double cut_time(TangentVector u);

/// The partner map (x,y,z) -> (x,y,-z). An involution preserving mu.
/// Perfect partners share the same exponential image.
inline TangentVector partner(TangentVector v) { return {v.x, v.y, -v.z}; }

/// Polar radii at angle theta in (0, pi/2):
///   f(theta) = pi / AGM(sin theta, cos theta)      (spine preimage in Pi')
///   g(theta) = sqrt(2/sin 2theta) * H(f(theta))    (spine in Pi)
struct PolarRadii {
  double f;
  double g;
};
PolarRadii cut_locus_polar(double theta);

/// Sampled branch of the cut-locus spine in one sector, as a polar graph.
struct CutLocusCurve {
  Sector sector;
  std::vector<std::pair<double, double>> samples;  ///< (theta, r) with r = g(theta)
};
CutLocusCurve sample_cut_locus(Sector sector, int n_samples);

/// State of the wavefront ODE at parameter t: the backward flow point
/// (x,y,z) on the loop level set and the image Lambda_L(t) = (a,b,0),
/// together with the velocities a' = 2x+za, b' = 2y-zb.
struct WavefrontSample {
  double t;
  double a, b;
  double da, db;
  TangentVector flow;  ///< backward flow point p_t
};

struct Wavefront {
  LoopLevelSet level;
  double ell;  ///< L/2
  std::vector<WavefrontSample> samples;
};

/// Integrates the five-dimensional wavefront system
///   a' = 2x + za, b' = 2y - zb, x' = -xz, y' = yz, z' = x^2 - y^2
/// from the level set's z=0, x>y point with a(0)=b(0)=0, sampling
/// Lambda_L(t) at n_samples uniform parameters on (0, L/2].
Wavefront wavefront(double L, int n_samples, double dt = 1e-3);

enum class Membership { InN, OnBoundary, OnSpine };

/// Classifies p against the cut locus. Points off the plane z=0 lie in N.
/// In-plane points are tested per sector against the spine's polar graph:
/// beyond it lies the cut region (OnBoundary), on it the spine itself.
/// The degenerate axes x*y = 0 lie in N.
Membership boundary_membership(SolPoint p, double tol_spine = 1e-9);

struct SolveOptions {
  double dt_coarse = 2e-3;   ///< integrator step during search iterations
  double dt_fine = 1e-3;     ///< integrator step for the final polish
  double tol = 1e-9;         ///< residual target, left-invariant gauge
  int max_iterations = 200;  ///< total Newton iteration budget
};

/// Inverse exponential map on N plus its boundary.
struct LogResult {
  TangentVector v;                        ///< exp_map(v) = p, class not Large
  std::optional<TangentVector> v_second;  ///< partner solution on the cut locus
  bool on_cut_locus = false;
  double residual = 0.0;
  int iterations = 0;
};
LogResult log_map(SolPoint p, const SolveOptions& opts = {});

/// Geodesic distance d(p, q) = |log_map(p^{-1} q)|.
double distance(SolPoint p, SolPoint q, const SolveOptions& opts = {});

}  // namespace sol
