#include "sol/cutlocus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <string>

#include "sol/error.hpp"

namespace sol {

namespace {

constexpr double kPlaneTol = 1e-9;  // |z| below this counts as "in the plane"

void require(bool ok, const char* msg) {
  if (!ok) throw InputError(msg);
}

// ---------------------------------------------------------------------------
// Spine table: monotone (Steffen) cubic interpolation of log H(f(theta)) on
// a uniform theta grid over [kTableMin, pi/4]. Built once, immutable after.
// Queries that land close to the spine re-evaluate exactly; the table only
// accelerates the bulk of membership tests.

constexpr int kTableSize = 2048;
constexpr double kTableMin = 5e-4;

double exact_log_spine(double theta) {
  const double L = kPi / agm(std::sin(theta), std::cos(theta));
  return detail::log_holonomy_from_period(std::max(L, kMinPeriod));
}

struct SpineTable {
  double lo, hi, h;
  std::array<double, kTableSize> value;
  std::array<double, kTableSize> slope;

  SpineTable() {
    lo = kTableMin;
    hi = 0.25 * kPi;
    h = (hi - lo) / (kTableSize - 1);
    for (int i = 0; i < kTableSize; ++i) value[i] = exact_log_spine(lo + i * h);
    // Steffen slopes: monotonicity-preserving, C^1
    std::array<double, kTableSize - 1> sec;
    for (int i = 0; i + 1 < kTableSize; ++i) sec[i] = (value[i + 1] - value[i]) / h;
    slope[0] = sec[0];
    slope[kTableSize - 1] = sec[kTableSize - 2];
    for (int i = 1; i + 1 < kTableSize; ++i) {
      const double sl = sec[i - 1], sr = sec[i];
      if (sl * sr <= 0.0) {
        slope[i] = 0.0;
      } else {
        const double p = 0.5 * (sl + sr);
        const double m = std::min({std::abs(sl), std::abs(sr), 0.5 * std::abs(p)});
        slope[i] = (sl > 0.0 ? 2.0 : -2.0) * m;
      }
    }
  }

  double eval(double theta) const {
    const double x = std::clamp(theta, lo, hi);
    int i = static_cast<int>((x - lo) / h);
    i = std::clamp(i, 0, kTableSize - 2);
    const double s = (x - lo - i * h) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * value[i] + (s3 - 2 * s2 + s) * h * slope[i] +
           (-2 * s3 + 3 * s2) * value[i + 1] + (s3 - s2) * h * slope[i + 1];
  }
};

const SpineTable& spine_table() {
  static const SpineTable table;
  return table;
}

// log H(f(theta)) for theta folded into (0, pi/4], table-accelerated.
double log_spine(double theta_folded) {
  if (theta_folded < kTableMin) return exact_log_spine(theta_folded);
  return spine_table().eval(theta_folded);
}

// ---------------------------------------------------------------------------
// Shooting machinery for the inverse exponential.

struct Vec3 {
  double v[3];
};

// Residual of exp_map(V) against the target q, measured in the
// left-invariant gauge at q: coordinates of q^{-1} * E(V).
Vec3 shoot_residual(const SolPoint& q, const TangentVector& V, double dt) {
  const SolPoint d = multiply(inverse(q), exp_map_fixed(V, dt));
  return {{d.x, d.y, d.z}};
}

double vec_norm(const Vec3& r) {
  return std::max({std::abs(r.v[0]), std::abs(r.v[1]), std::abs(r.v[2])});
}

// Solves the 3x3 system J x = -f by Gaussian elimination with partial
// pivoting. Returns false on (near-)singularity.
bool solve3(double J[3][3], const Vec3& f, double x[3]) {
  double A[3][4];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) A[i][j] = J[i][j];
    A[i][3] = -f.v[i];
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    if (std::abs(A[piv][c]) < 1e-300) return false;
    if (piv != c)
      for (int j = 0; j < 4; ++j) std::swap(A[c][j], A[piv][j]);
    for (int r = c + 1; r < 3; ++r) {
      const double m = A[r][c] / A[c][c];
      for (int j = c; j < 4; ++j) A[r][j] -= m * A[c][j];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = A[r][3];
    for (int j = r + 1; j < 3; ++j) s -= A[r][j] * x[j];
    x[r] = s / A[r][r];
  }
  return true;
}

double safe_residual(const SolPoint& q, const TangentVector& V, double dt, Vec3* out) {
  try {
    const Vec3 r = shoot_residual(q, V, dt);
    if (out) *out = r;
    const double n = vec_norm(r);
    return std::isfinite(n) ? n : std::numeric_limits<double>::infinity();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Damped finite-difference Newton iteration on V -> exp_map(V) - q.
// Returns true once the residual drops below tol. `budget` counts Newton
// iterations across the whole log_map call.
bool newton_shoot(const SolPoint& q, TangentVector& V, double dt, double tol, int& budget,
                  double* residual_out) {
  Vec3 f{};
  double fn = safe_residual(q, V, dt, &f);
  while (budget > 0) {
    if (fn <= tol) {
      if (residual_out) *residual_out = fn;
      return true;
    }
    --budget;
    // forward-difference Jacobian
    double J[3][3];
    const double hx = 1e-6 * std::max(1.0, std::abs(V.x));
    const double hy = 1e-6 * std::max(1.0, std::abs(V.y));
    const double hz = 1e-6 * std::max(1.0, std::abs(V.z));
    const double hs[3] = {hx, hy, hz};
    for (int j = 0; j < 3; ++j) {
      TangentVector Vj = V;
      (j == 0 ? Vj.x : j == 1 ? Vj.y : Vj.z) += hs[j];
      Vec3 fj{};
      if (!std::isfinite(safe_residual(q, Vj, dt, &fj))) {
        if (residual_out) *residual_out = fn;
        return false;
      }
      for (int i = 0; i < 3; ++i) J[i][j] = (fj.v[i] - f.v[i]) / hs[j];
    }
    double step[3];
    if (!solve3(J, f, step)) {
      if (residual_out) *residual_out = fn;
      return false;
    }
    double s = 1.0;
    bool accepted = false;
    for (int half = 0; half < 10; ++half) {
      const TangentVector Vt{V.x + s * step[0], V.y + s * step[1], V.z + s * step[2]};
      Vec3 ft{};
      const double fnt = safe_residual(q, Vt, dt, &ft);
      if (fnt < fn * (1.0 - 0.25 * s)) {
        V = Vt;
        f = ft;
        fn = fnt;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) {
      if (residual_out) *residual_out = fn;
      return false;
    }
  }
  if (residual_out) *residual_out = fn;
  return fn <= tol;
}

SolPoint scale_point(const SolPoint& q, double tau) { return {tau * q.x, tau * q.y, tau * q.z}; }

// Newton shooting with continuation along the segment tau*q, tau in (0,1].
// The segment stays inside N because N is star-shaped about the origin.
bool shoot_with_continuation(const SolPoint& q, TangentVector& V_out, const SolveOptions& opts,
                             int& budget, double* residual_out) {
  const double r0 = std::max({std::abs(q.x), std::abs(q.y), std::abs(q.z)});
  double tau = std::min(1.0, 1.0 / r0);
  TangentVector V{tau * q.x, tau * q.y, tau * q.z};
  double advance = 1.8;
  const double stage_tol = std::max(1e-8, opts.tol);
  while (true) {
    TangentVector V_try = V;
    const bool ok = newton_shoot(scale_point(q, tau), V_try, opts.dt_coarse, stage_tol, budget,
                                 residual_out);
    if (ok) {
      V = V_try;
      if (tau >= 1.0) break;
      const double next = std::min(1.0, tau * advance);
      V = (next / tau) * V;
      tau = next;
    } else {
      if (budget <= 0) return false;
      advance = 1.0 + 0.5 * (advance - 1.0);
      if (advance < 1.02) return false;
      // retreat half a stage and retry with the smaller advance
      const double back = std::max(std::min(1.0, 1.0 / r0), tau / advance);
      V = (back / tau) * V;
      tau = back;
    }
  }
  // final polish at the fine step
  if (!newton_shoot(q, V, opts.dt_fine, opts.tol, budget, residual_out)) {
    // accept a slightly degraded residual if the coarse solve already landed
    if (*residual_out > 100.0 * opts.tol) return false;
  }
  V_out = V;
  return true;
}

// ---------------------------------------------------------------------------
// Closed-form inverse exponential in the geodesically embedded hyperbolic
// planes y=0 and x=0 (upper-half-plane model via eta = e^{+-z}).

TangentVector log_hyperbolic_xz(double X, double Z) {
  if (X == 0.0) return {0.0, 0.0, Z};
  if (std::abs(Z) > kMaxLogScale) throw RangeError("log_map: |z| exceeds representable range");
  const double eta = std::exp(Z);
  const double dx = X;
  const double d = std::acosh(1.0 + (dx * dx + (eta - 1.0) * (eta - 1.0)) / (2.0 * eta));
  const double xc = (X * X + eta * eta - 1.0) / (2.0 * X);
  const double r = std::sqrt(1.0 + xc * xc);
  return {d / r, 0.0, d * xc / r};
}

TangentVector log_hyperbolic_yz(double Y, double Z) {
  const TangentVector m = log_hyperbolic_xz(Y, -Z);
  return {0.0, m.x, -m.z};
}

// ---------------------------------------------------------------------------
// Level-set route for targets on the cut locus: q = (X,Y,0) with X,Y > 0 and
// sqrt(XY) >= pi. The two perfect preimages come from the loop level set
// whose holonomy is sqrt(XY), at the orbit point with the right ratio.

LogResult solve_on_cut(const SolPoint& q, bool on_spine, const SolveOptions& opts) {
  const double X = q.x, Y = q.y;
  const double h = std::exp(0.5 * (std::log(X) + std::log(Y)));
  const double L = period_from_holonomy(std::max(h, kPi));
  const LoopLevelSet lvl = level_set_from_period(std::max(L, kMinPeriod * (1.0 + 1e-11)));
  const double ta = level_time_bound(lvl.a);
  double tau = 0.5 * std::log(Y / X);
  if (std::abs(tau) >= ta * (1.0 - 1e-12)) on_spine = true;
  tau = std::clamp(tau, -ta, ta);

  LogResult res;
  res.on_cut_locus = true;
  if (on_spine) {
    // the fold collapses at the spine: the unique preimage is the z=0 orbit point
    const TangentVector u = level_orbit_point(lvl.a, tau, +1);
    const TangentVector flat{u.x, u.y, 0.0};
    res.v = (lvl.L / norm(flat)) * flat;
    res.residual = safe_residual(q, res.v, opts.dt_fine, nullptr);
    return res;
  }
  const TangentVector up = level_orbit_point(lvl.a, tau, +1);
  res.v = lvl.L * up;
  res.v_second = lvl.L * partner(up);
  res.residual = safe_residual(q, res.v, opts.dt_fine, nullptr);
  return res;
}

// ---------------------------------------------------------------------------
// Nested-bisection fallback for in-plane targets (X, Y, 0), X > Y > 0,
// inside N: locate (level L, parameter t) with Lambda_L(t) = (X, Y).

struct WavefrontHit {
  bool reached = false;  // a(t) reaches X before t = ell
  double b_at = 0.0;     // b at the parameter where a = X
  double t_at = 0.0;
  TangentVector flow{};  // backward-flow point there
  double a_end = 0.0;    // a(ell), for diagnostics
};

WavefrontHit wavefront_hit(double L, double X, double dt) {
  WavefrontHit hit;
  const LoopLevelSet lvl = level_set_from_period(L);
  const double ell = 0.5 * L;
  const TangentVector p0 = level_zero_point(lvl.a);
  double s[5] = {p0.x, p0.y, p0.z, 0.0, 0.0};  // x, y, z, a, b
  auto rhs = [](const double st[5], double d[5]) {
    d[0] = -st[0] * st[2];
    d[1] = st[1] * st[2];
    d[2] = st[0] * st[0] - st[1] * st[1];
    d[3] = 2.0 * st[0] + st[2] * st[3];
    d[4] = 2.0 * st[1] - st[2] * st[4];
  };
  const long n = static_cast<long>(std::ceil(ell / dt));
  const double hstep = ell / static_cast<double>(n);
  double prev[5];
  for (long i = 0; i < n; ++i) {
    std::copy(s, s + 5, prev);
    double k1[5], k2[5], k3[5], k4[5], tmp[5];
    rhs(s, k1);
    for (int j = 0; j < 5; ++j) tmp[j] = s[j] + 0.5 * hstep * k1[j];
    rhs(tmp, k2);
    for (int j = 0; j < 5; ++j) tmp[j] = s[j] + 0.5 * hstep * k2[j];
    rhs(tmp, k3);
    for (int j = 0; j < 5; ++j) tmp[j] = s[j] + hstep * k3[j];
    rhs(tmp, k4);
    for (int j = 0; j < 5; ++j)
      s[j] += hstep / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    const double nn = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
    for (int j = 0; j < 3; ++j) s[j] /= nn;

    if (s[3] >= X) {  // a is strictly increasing: bracketed on this step
      const double a0 = prev[3], a1 = s[3];
      const double w = (X - a0) / (a1 - a0);
      hit.reached = true;
      hit.t_at = (static_cast<double>(i) + w) * hstep;
      hit.b_at = prev[4] + w * (s[4] - prev[4]);
      TangentVector f{prev[0] + w * (s[0] - prev[0]), prev[1] + w * (s[1] - prev[1]),
                      prev[2] + w * (s[2] - prev[2])};
      const double fn = norm(f);
      hit.flow = (1.0 / fn) * f;
      return hit;
    }
  }
  hit.a_end = s[3];
  return hit;
}

bool solve_plane_bisection(const SolPoint& q, TangentVector& V_out, const SolveOptions& opts,
                           int& budget, double* residual_out) {
  const double X = q.x, Y = q.y;  // X > Y > 0, inside N
  // Outer search over the level period L. miss(L) = b(t*) - Y at a(t*) = X;
  // undefined when the wavefront ends before a reaches X, which only happens
  // at low L (the endpoint a(ell) grows with L).
  auto miss = [&](double L, bool& ok) -> double {
    const WavefrontHit hit = wavefront_hit(L, X, opts.dt_coarse);
    ok = hit.reached;
    return ok ? hit.b_at - Y : 0.0;
  };
  double lo = 0.0, hi = 0.0, mlo = 0.0;
  bool have_lo = false;
  double L_scan = kMinPeriod * (1.0 + 1e-6);
  for (int i = 0; i < 48 && hi == 0.0; ++i) {
    bool ok = false;
    const double m = miss(L_scan, ok);
    if (ok) {
      if (!have_lo || (m < 0.0) == (mlo < 0.0)) {
        lo = L_scan;
        mlo = m;
        have_lo = true;
      } else {
        hi = L_scan;
        break;
      }
    }
    L_scan *= 1.3;
    if (L_scan > 200.0) return false;
  }
  if (hi == 0.0 || !have_lo) return false;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    bool ok = false;
    const double m = miss(mid, ok);
    if (ok && (m < 0.0) != (mlo < 0.0))
      hi = mid;
    else
      lo = mid;
  }
  const WavefrontHit hit = wavefront_hit(0.5 * (lo + hi), X, opts.dt_coarse);
  if (!hit.reached) return false;
  TangentVector V = (2.0 * hit.t_at) * hit.flow;
  if (!newton_shoot(q, V, opts.dt_fine, opts.tol, budget, residual_out)) return false;
  V_out = V;
  return true;
}

LogResult log_positive(const SolPoint& q, const SolveOptions& opts) {
  const double X = q.x, Y = q.y, Z = q.z;
  LogResult res;

  if (X == 0.0 && Y == 0.0) {
    res.v = {0.0, 0.0, Z};
    return res;
  }
  if (Y == 0.0) {
    res.v = log_hyperbolic_xz(X, Z);
    return res;
  }
  if (X == 0.0) {
    res.v = log_hyperbolic_yz(Y, Z);
    return res;
  }

  const Membership mem = boundary_membership(q);
  if (mem != Membership::InN) return solve_on_cut(q, mem == Membership::OnSpine, opts);

  if (Z == 0.0 && X == Y) {  // diagonal line geodesic; InN implies X < pi
    res.v = {X, Y, 0.0};
    return res;
  }

  int budget = opts.max_iterations;
  double residual = std::numeric_limits<double>::infinity();
  TangentVector V;
  if (shoot_with_continuation(q, V, opts, budget, &residual)) {
    if (classify(V).tag != GeodesicClassTag::Large) {
      res.v = V;
      res.residual = residual;
      res.iterations = opts.max_iterations - budget;
      return res;
    }
  }

  if (std::abs(Z) <= kPlaneTol) {
    // swap-reduce so the wavefront parametrization (which covers a > b) applies
    const bool swapped = Y > X;
    const SolPoint qq = swapped ? SolPoint{Y, X, -Z} : q;
    TangentVector Vp;
    if (solve_plane_bisection(qq, Vp, opts, budget, &residual)) {
      res.v = swapped ? apply_symmetry(Symmetry::swap(), Vp) : Vp;
      res.residual = residual;
      res.iterations = opts.max_iterations - budget;
      return res;
    }
  }
  throw ConvergenceError("log_map: shooting did not converge (best residual " +
                             std::to_string(residual) + ")",
                         residual);
}

}  // namespace

GeodesicClass classify(TangentVector v, double tol_perfect) {
  const double m = mu(v);
  const double margin = m - kPi;
  GeodesicClassTag tag;
  if (std::abs(margin) <= tol_perfect)
    tag = GeodesicClassTag::Perfect;
  else if (margin < 0.0)
    tag = GeodesicClassTag::Small;
  else
    tag = GeodesicClassTag::Large;
  return {tag, m, margin};
}

double cut_time(TangentVector u) {
  if (std::abs(norm(u) - 1.0) > 1e-9) throw InputError("cut_time: u must be a unit vector");
  const double m = mu(u);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return kPi / m;
}

PolarRadii cut_locus_polar(double theta) {
  require(theta > 0.0 && theta < 0.5 * kPi, "cut_locus_polar: theta must lie in (0, pi/2)");
  const double f = kPi / agm(std::sin(theta), std::cos(theta));
  const double H = holonomy_from_period(std::max(f, kMinPeriod));
  const double g = std::sqrt(2.0 / std::sin(2.0 * theta)) * H;
  return {f, g};
}

CutLocusCurve sample_cut_locus(Sector sector, int n_samples) {
  require(n_samples >= 2, "sample_cut_locus: need at least 2 samples");
  CutLocusCurve curve;
  curve.sector = sector;
  curve.samples.reserve(n_samples);
  // uniform in theta over the central 98% of the quadrant; the curve is
  // proper (r -> inf at the axes)
  const double lo = 0.01 * 0.5 * kPi, hi = 0.99 * 0.5 * kPi;
  for (int i = 0; i < n_samples; ++i) {
    const double theta = lo + (hi - lo) * i / (n_samples - 1);
    curve.samples.emplace_back(theta, cut_locus_polar(theta).g);
  }
  return curve;
}

Wavefront wavefront(double L, int n_samples, double dt) {
  require(L > kMinPeriod * (1.0 + 1e-12), "wavefront: L must exceed pi*sqrt(2)");
  require(n_samples >= 2, "wavefront: need at least 2 samples");
  Wavefront wf;
  wf.level = level_set_from_period(L);
  wf.ell = 0.5 * L;
  const TangentVector p0 = level_zero_point(wf.level.a);
  double s[5] = {p0.x, p0.y, p0.z, 0.0, 0.0};
  auto rhs = [](const double st[5], double d[5]) {
    d[0] = -st[0] * st[2];
    d[1] = st[1] * st[2];
    d[2] = st[0] * st[0] - st[1] * st[1];
    d[3] = 2.0 * st[0] + st[2] * st[3];
    d[4] = 2.0 * st[1] - st[2] * st[4];
  };
  const double seg = wf.ell / n_samples;
  const long m = std::max<long>(1, static_cast<long>(std::ceil(seg / dt)));
  const double h = seg / static_cast<double>(m);
  wf.samples.reserve(n_samples);
  for (int k = 1; k <= n_samples; ++k) {
    for (long i = 0; i < m; ++i) {
      double k1[5], k2[5], k3[5], k4[5], tmp[5];
      rhs(s, k1);
      for (int j = 0; j < 5; ++j) tmp[j] = s[j] + 0.5 * h * k1[j];
      rhs(tmp, k2);
      for (int j = 0; j < 5; ++j) tmp[j] = s[j] + 0.5 * h * k2[j];
      rhs(tmp, k3);
      for (int j = 0; j < 5; ++j) tmp[j] = s[j] + h * k3[j];
      rhs(tmp, k4);
      for (int j = 0; j < 5; ++j) s[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      const double nn = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
      for (int j = 0; j < 3; ++j) s[j] /= nn;
    }
    WavefrontSample smp;
    smp.t = k * seg;
    smp.a = s[3];
    smp.b = s[4];
    smp.da = 2.0 * s[0] + s[2] * s[3];
    smp.db = 2.0 * s[1] - s[2] * s[4];
    smp.flow = {s[0], s[1], s[2]};
    wf.samples.push_back(smp);
  }
  return wf;
}

Membership boundary_membership(SolPoint p, double tol_spine) {
  if (std::abs(p.z) > kPlaneTol) return Membership::InN;
  const double X = std::abs(p.x), Y = std::abs(p.y);
  if (X == 0.0 || Y == 0.0) return Membership::InN;
  const double theta = std::atan2(std::min(X, Y), std::max(X, Y));  // folded to (0, pi/4]
  const double ln_s = 0.5 * (std::log(X) + std::log(Y));
  double ln_h = log_spine(theta);
  double ratio = std::exp(ln_s - ln_h);
  if (std::abs(ratio - 1.0) <= 1e-5) {
    ln_h = exact_log_spine(theta);  // near the spine: drop the table, go exact
    ratio = std::exp(ln_s - ln_h);
  }
  if (std::abs(ratio - 1.0) <= tol_spine) return Membership::OnSpine;
  return ratio > 1.0 ? Membership::OnBoundary : Membership::InN;
}

LogResult log_map(SolPoint p, const SolveOptions& opts) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
    throw InputError("log_map: non-finite target");
  if (p.x == 0.0 && p.y == 0.0 && p.z == 0.0) return {};
  const Symmetry sym = Symmetry::reflection(sector_of(p));
  const SolPoint q = apply_symmetry(sym, p);
  LogResult res = log_positive(q, opts);
  res.v = apply_symmetry(sym, res.v);
  if (res.v_second) res.v_second = apply_symmetry(sym, *res.v_second);
  return res;
}

double distance(SolPoint p, SolPoint q, const SolveOptions& opts) {
  const SolPoint d = multiply(inverse(p), q);
  return norm(log_map(d, opts).v);
}

}  // namespace sol
