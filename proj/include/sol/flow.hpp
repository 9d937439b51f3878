#pragma once

// The Arnold-Grayson picture of the geodesic flow on Sol: the structure
// field Sigma on the unit sphere of the Lie algebra, flowline integration
// with conserved quantities, the Riemannian exponential map via the coupled
// frame/position system, and the concatenation-product form of the
// exponential used as a slow independent cross-check.

#include <vector>

#include "sol/core.hpp"
#include "sol/specfun.hpp"

namespace sol {

/// Unit tangent vector evolving on the sphere S' under the structure field.
using FlowState = TangentVector;

/// Position plus left-invariant frame tangent of a unit-speed geodesic.
struct GeodesicState {
  SolPoint p;       ///< current position gamma(t)
  TangentVector u;  ///< frame components of gamma'(t), unit norm
};

struct FlowSample {
  double t;
  TangentVector u;
};

/// A flowline of the structure field, sampled at uniform steps.
/// samples.front().t == 0 and samples.back().t == duration.
struct Flowline {
  std::vector<FlowSample> samples;
  double duration = 0.0;
};

/// The structure field Sigma(x,y,z) = (xz, -yz, -x^2 + y^2). Its flowlines
/// on the unit sphere are the geodesics of Sol seen in a left-invariant
/// frame. F(x,y,z) = xy is conserved along the flow.
inline TangentVector sigma(TangentVector v) {
  return {v.x * v.z, -v.y * v.z, -v.x * v.x + v.y * v.y};
}

/// Integrates u' = Sigma(u) from a unit vector u0 for time T with fixed
/// RK4 steps of size <= dt, renormalizing to the unit sphere after every
/// step. Conserves |u| and u.x*u.y per the FlowState invariants.
Flowline flow_exact_invariants(TangentVector u0, double T, double dt);

/// Backward variant (integrates u' = -Sigma(u)); used to locate the start
/// points of symmetric flowlines.
Flowline flow_backward(TangentVector u0, double T, double dt);

/// Riemannian exponential map. Integrates the coupled system
///   u' = Sigma(u),   p' = (e^{p.z} u.x, e^{-p.z} u.y, u.z)
/// from p = identity, u = V/|V|, for time |V|, with fixed step dt.
SolPoint exp_map_fixed(TangentVector V, double dt);

/// exp_map_fixed with automatic step refinement: halves dt until another
/// halving changes the result by less than 1e-9 componentwise.
SolPoint exp_map(TangentVector V, double dt = 1e-3);

struct GeodesicSample {
  double t;
  GeodesicState state;
};

/// Unit-speed geodesic from the identity with initial frame direction u0
/// (unit), sampled at every integration step.
std::vector<GeodesicSample> geodesic_trajectory(TangentVector u0, double T, double dt);

/// Concatenation-product form of the exponential map: the ordered product
/// (eps*g_0) * ... * (eps*g_n), eps = T/(n+1), with g_i sampled along the
/// flowline by Euler steps of size T/n. Converges to exp_map(V) at rate
/// O(1/n); kept as an independent oracle, not a production path.
SolPoint exp_map_product_oracle(TangentVector V, long n);

/// Quadrature of the z-component of the frame tangent along a flowline;
/// equals the z-coordinate of the concatenated endpoint.
double z_displacement(const Flowline& g);

/// The symmetric flowline of duration 2t on the given loop level set: flows
/// backward from the z=0, x>y point p0 for time t to find the start p_t,
/// then forward 2t. Endpoints are partner points (x,y,+z), (x,y,-z).
/// Requires 0 < t <= L/2.
Flowline symmetric_flowline(const LoopLevelSet& level, double t, double dt = 1e-3);

/// Conserved-cylinder residual for the geodesic launched from the identity
/// in direction U_a: (w - w0)^2 + cosh(2z) - 1/(2a^2) evaluated at state.p,
/// where w = (x-y)/sqrt(2) and w0 = sqrt(1-2a^2)/(sqrt(2) a) centers the
/// cylinder on the geodesic. Stays at 0 along the exact geodesic.
double grayson_cylinder_residual(double a, const GeodesicState& state);

/// First-return time of U_a = (a, a, sqrt(1-2a^2)) under the structure
/// field, measured by event detection on the section x=y, z>0: a sign
/// change of x-y plus a Newton-refined crossing on cubic dense output.
/// Equals period_from_a(a) up to integrator error.
double first_return_time(double a, double dt = 1e-3);

}  // namespace sol
