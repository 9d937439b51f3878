#include "sol/flow.hpp"

#include <cmath>
#include <string>

#include "sol/error.hpp"

namespace sol {

namespace {

constexpr long kMaxSteps = 50'000'000;

void check_step_budget(double T, double dt, const char* who) {
  if (!(dt > 0.0)) throw InputError(std::string(who) + ": dt must be positive");
  if (T / dt > static_cast<double>(kMaxSteps))
    throw ConvergenceError(std::string(who) + ": step count over budget (T/dt = " +
                               std::to_string(T / dt) + ")",
                           0.0);
}

inline TangentVector normalized(TangentVector v) {
  const double n = norm(v);
  return (n > 0.0) ? (1.0 / n) * v : v;
}

// One classical RK4 step of u' = s * Sigma(u), then projection back to the
// unit sphere (Sigma is tangent to the sphere only in exact arithmetic).
inline TangentVector flow_step(TangentVector u, double h, double s) {
  const TangentVector k1 = s * sigma(u);
  const TangentVector k2 = s * sigma(u + (0.5 * h) * k1);
  const TangentVector k3 = s * sigma(u + (0.5 * h) * k2);
  const TangentVector k4 = s * sigma(u + h * k3);
  TangentVector r = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return normalized(r);
}

Flowline integrate_flow(TangentVector u0, double T, double dt, double direction,
                        const char* who) {
  if (std::abs(norm(u0) - 1.0) > 1e-9)
    throw InputError(std::string(who) + ": u0 must be a unit vector");
  if (T < 0.0) throw InputError(std::string(who) + ": negative duration");
  check_step_budget(T, dt, who);

  Flowline line;
  line.duration = T;
  const long n = (T == 0.0) ? 0 : static_cast<long>(std::ceil(T / dt));
  const double h = (n > 0) ? T / static_cast<double>(n) : 0.0;
  line.samples.reserve(static_cast<size_t>(n) + 1);
  TangentVector u = normalized(u0);
  line.samples.push_back({0.0, u});
  for (long i = 0; i < n; ++i) {
    u = flow_step(u, h, direction);
    line.samples.push_back({static_cast<double>(i + 1) * h, u});
  }
  if (!line.samples.empty()) line.samples.back().t = T;
  return line;
}

struct PoseState {
  SolPoint p;
  TangentVector u;
};

inline PoseState pose_deriv(const PoseState& s) {
  const double ez = detail::checked_exp(s.p.z, "exp_map");
  PoseState d;
  d.p = {ez * s.u.x, s.u.y / ez, s.u.z};
  d.u = sigma(s.u);
  return d;
}

inline PoseState pose_axpy(const PoseState& s, double h, const PoseState& d) {
  PoseState r;
  r.p = {s.p.x + h * d.p.x, s.p.y + h * d.p.y, s.p.z + h * d.p.z};
  r.u = s.u + h * d.u;
  return r;
}

inline PoseState pose_step(const PoseState& s, double h) {
  const PoseState k1 = pose_deriv(s);
  const PoseState k2 = pose_deriv(pose_axpy(s, 0.5 * h, k1));
  const PoseState k3 = pose_deriv(pose_axpy(s, 0.5 * h, k2));
  const PoseState k4 = pose_deriv(pose_axpy(s, h, k3));
  PoseState r = s;
  const double w = h / 6.0;
  r.p.x += w * (k1.p.x + 2.0 * k2.p.x + 2.0 * k3.p.x + k4.p.x);
  r.p.y += w * (k1.p.y + 2.0 * k2.p.y + 2.0 * k3.p.y + k4.p.y);
  r.p.z += w * (k1.p.z + 2.0 * k2.p.z + 2.0 * k3.p.z + k4.p.z);
  r.u = r.u + w * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
  r.u = normalized(r.u);
  return r;
}

}  // namespace

Flowline flow_exact_invariants(TangentVector u0, double T, double dt) {
  return integrate_flow(u0, T, dt, +1.0, "flow_exact_invariants");
}

Flowline flow_backward(TangentVector u0, double T, double dt) {
  return integrate_flow(u0, T, dt, -1.0, "flow_backward");
}

SolPoint exp_map_fixed(TangentVector V, double dt) {
  const double T = norm(V);
  if (T == 0.0) return identity();
  check_step_budget(T, dt, "exp_map");
  const long n = static_cast<long>(std::ceil(T / dt));
  const double h = T / static_cast<double>(n);
  PoseState s{identity(), (1.0 / T) * V};
  for (long i = 0; i < n; ++i) s = pose_step(s, h);
  return s.p;
}

SolPoint exp_map(TangentVector V, double dt) {
  SolPoint prev = exp_map_fixed(V, dt);
  for (int k = 0; k < 10; ++k) {
    dt *= 0.5;
    const SolPoint cur = exp_map_fixed(V, dt);
    const double gap = std::max({std::abs(cur.x - prev.x), std::abs(cur.y - prev.y),
                                 std::abs(cur.z - prev.z)});
    if (gap < 1e-9) return cur;
    prev = cur;
  }
  throw ConvergenceError("exp_map: step refinement did not settle below 1e-9", 0.0);
}

std::vector<GeodesicSample> geodesic_trajectory(TangentVector u0, double T, double dt) {
  if (std::abs(norm(u0) - 1.0) > 1e-9)
    throw InputError("geodesic_trajectory: u0 must be a unit vector");
  check_step_budget(T, dt, "geodesic_trajectory");
  const long n = (T == 0.0) ? 0 : static_cast<long>(std::ceil(T / dt));
  const double h = (n > 0) ? T / static_cast<double>(n) : 0.0;
  std::vector<GeodesicSample> out;
  out.reserve(static_cast<size_t>(n) + 1);
  PoseState s{identity(), normalized(u0)};
  out.push_back({0.0, {s.p, s.u}});
  for (long i = 0; i < n; ++i) {
    s = pose_step(s, h);
    out.push_back({static_cast<double>(i + 1) * h, {s.p, s.u}});
  }
  if (!out.empty()) out.back().t = T;
  return out;
}

SolPoint exp_map_product_oracle(TangentVector V, long n) {
  if (n < 1) throw InputError("exp_map_product_oracle: n must be >= 1");
  const double T = norm(V);
  if (T == 0.0) return identity();
  const double h = T / static_cast<double>(n);        // Euler sample spacing
  const double eps = T / static_cast<double>(n + 1);  // product weight
  TangentVector u = (1.0 / T) * V;
  SolPoint prod = identity();
  for (long i = 0; i <= n; ++i) {
    prod = multiply(prod, SolPoint{eps * u.x, eps * u.y, eps * u.z});
    if (i < n) u = normalized(u + h * sigma(u));
  }
  return prod;
}

double z_displacement(const Flowline& g) {
  const auto& s = g.samples;
  const size_t n = s.size();
  if (n < 2) return 0.0;
  const double h = s[1].t - s[0].t;
  // composite Simpson over the uniform grid; 3/8 rule absorbs a leftover
  // odd interval at the end
  const size_t intervals = n - 1;
  auto f = [&](size_t i) { return s[i].u.z; };
  double total = 0.0;
  size_t simpson_end = intervals;  // index of last interval boundary used by 1/3 rule
  if (intervals % 2 != 0) {
    if (intervals < 3) {  // single interval: trapezoid
      return 0.5 * h * (f(0) + f(1));
    }
    simpson_end = intervals - 3;
    const size_t b = simpson_end;
    total += 3.0 * h / 8.0 * (f(b) + 3.0 * f(b + 1) + 3.0 * f(b + 2) + f(b + 3));
  }
  for (size_t i = 0; i + 2 <= simpson_end; i += 2)
    total += h / 3.0 * (f(i) + 4.0 * f(i + 1) + f(i + 2));
  return total;
}

Flowline symmetric_flowline(const LoopLevelSet& level, double t, double dt) {
  const double ell = 0.5 * level.L;
  if (!(t > 0.0 && t <= ell * (1.0 + 1e-9)))
    throw InputError("symmetric_flowline: t must lie in (0, L/2]");
  const TangentVector p0 = level_zero_point(level.a);
  const Flowline back = flow_backward(p0, t, dt);
  return flow_exact_invariants(back.samples.back().u, 2.0 * t, dt);
}

double grayson_cylinder_residual(double a, const GeodesicState& state) {
  if (!(a > 0.0 && a <= std::sqrt(0.5) * (1.0 + 1e-12)))
    throw InputError("grayson_cylinder_residual: a must lie in (0, sqrt(2)/2]");
  const double c = std::sqrt(std::max(0.0, 1.0 - 2.0 * a * a));
  const double w0 = c / (std::sqrt(2.0) * a);
  const double w = (state.p.x - state.p.y) / std::sqrt(2.0);
  return (w - w0) * (w - w0) + std::cosh(2.0 * state.p.z) - 1.0 / (2.0 * a * a);
}

double first_return_time(double a, double dt) {
  const double L_guess = period_from_a(a);  // budget only; the value is measured
  const TangentVector u0 = level_orbit_point(a, 0.0, +1);
  check_step_budget(2.0 * L_guess, dt, "first_return_time");
  const long n = static_cast<long>(std::ceil(2.0 * L_guess / dt));
  const double h = 2.0 * L_guess / static_cast<double>(n);

  auto section = [](TangentVector u) { return u.x - u.y; };
  auto dsection = [](TangentVector u) {
    const TangentVector d = sigma(u);
    return d.x - d.y;
  };

  TangentVector u = u0;
  double e_prev = section(u);
  double de_prev = dsection(u);
  for (long i = 0; i < n; ++i) {
    const TangentVector unext = flow_step(u, h, +1.0);
    const double e = section(unext);
    const double de = dsection(unext);
    const double t0 = static_cast<double>(i) * h;
    if (i > 0 && e_prev < 0.0 && e >= 0.0) {
      // Cubic Hermite dense output for the section function on [t0, t0+h],
      // then Newton for the crossing.
      const double d0 = de_prev * h;
      const double d1 = de * h;
      auto hermite = [&](double s) {
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * e_prev + (s3 - 2 * s2 + s) * d0 +
               (-2 * s3 + 3 * s2) * e + (s3 - s2) * d1;
      };
      auto dhermite = [&](double s) {
        const double s2 = s * s;
        return (6 * s2 - 6 * s) * e_prev + (3 * s2 - 4 * s + 1) * d0 +
               (-6 * s2 + 6 * s) * e + (3 * s2 - 2 * s) * d1;
      };
      double s = e_prev / (e_prev - e);  // secant start
      for (int it = 0; it < 8; ++it) {
        const double v = hermite(s);
        const double dv = dhermite(s);
        if (dv == 0.0) break;
        s -= v / dv;
        s = std::min(1.0, std::max(0.0, s));
      }
      return t0 + s * h;
    }
    e_prev = e;
    de_prev = de;
    u = unext;
  }
  throw ConvergenceError("first_return_time: no return detected within two nominal periods",
                         0.0);
}

}  // namespace sol
