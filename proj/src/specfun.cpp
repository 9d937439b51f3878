#include "sol/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "sol/error.hpp"

namespace sol {

namespace {

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod 7-15 quadrature. Nodes never touch the interval
// endpoints, which keeps removable 0/0 endpoints out of harm's way.

constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

// Weights of the embedded 7-point Gauss rule (its nodes are the
// odd-indexed Kronrod nodes plus the midpoint).
constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct GkEstimate {
  double integral;
  double error;
};

template <typename F>
GkEstimate gk15(const F& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = h * kKronrodNodes[i];
    const double fsum = (i == 7) ? f(c) : f(c - dx) + f(c + dx);
    kron += kKronrodWeights[i] * fsum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fsum;
  }
  return {kron * h, std::abs(kron - gauss) * h};
}

template <typename F>
double adaptive_gk(const F& f, double lo, double hi, double abs_tol, const char* who) {
  struct Cell {
    double lo, hi, tol;
    int depth;
  };
  std::vector<Cell> stack{{lo, hi, abs_tol, 0}};
  double total = 0.0;
  int cells = 0;
  while (!stack.empty()) {
    const Cell cell = stack.back();
    stack.pop_back();
    if (++cells > 100000)
      throw ConvergenceError(std::string(who) + ": adaptive quadrature cell budget exhausted",
                             0.0);
    const GkEstimate est = gk15(f, cell.lo, cell.hi);
    if (est.error <= cell.tol || cell.depth >= 48) {
      total += est.integral;
      continue;
    }
    const double mid = 0.5 * (cell.lo + cell.hi);
    stack.push_back({cell.lo, mid, 0.5 * cell.tol, cell.depth + 1});
    stack.push_back({mid, cell.hi, 0.5 * cell.tol, cell.depth + 1});
  }
  return total;
}

void require(bool ok, const char* msg) {
  if (!ok) throw InputError(msg);
}

const double kHalfSqrt2 = std::sqrt(0.5);

}  // namespace

double agm(double alpha0, double beta0) {
  require(alpha0 >= 0.0 && beta0 >= 0.0, "agm: negative input");
  double a = std::min(alpha0, beta0);
  double b = std::max(alpha0, beta0);
  if (a == 0.0) return 0.0;  // geometric mean pins the limit at zero
  const double stop = 1e-15 * std::max(b, 1.0);
  for (int i = 0; i < 200 && (b - a) > stop; ++i) {
    const double g = std::sqrt(a * b);
    const double m = 0.5 * (a + b);
    a = g;
    b = m;
  }
  return 0.5 * (a + b);
}

double mu(TangentVector v) {
  const double ax = std::abs(v.x);
  const double ay = std::abs(v.y);
  const double geo = std::sqrt(ax * ay);
  const double s = ax + ay;
  const double big = 0.5 * std::sqrt(s * s + v.z * v.z);
  return agm(geo, big);
}

double elliptic_K(double m) {
  require(m >= 0.0 && m < 1.0, "elliptic_K: m must lie in [0, 1)");
  return 0.5 * kPi / agm(std::sqrt(1.0 - m), 1.0);
}

double elliptic_E(double m) {
  require(m >= 0.0 && m <= 1.0, "elliptic_E: m must lie in [0, 1]");
  if (m == 1.0) return 1.0;
  // AGM descent: E = K * (1 - sum 2^{n-1} c_n^2), c_0^2 = m.
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  double sum = 0.5 * m;
  double pow2 = 0.5;
  for (int i = 0; i < 200 && (a - b) > 1e-17 * a; ++i) {
    const double c = 0.5 * (a - b);
    const double g = std::sqrt(a * b);
    const double mean = 0.5 * (a + b);
    a = mean;
    b = g;
    pow2 *= 2.0;
    sum += pow2 * c * c;
  }
  const double K = 0.5 * kPi / a;
  return K * (1.0 - sum);
}

double level_time_bound(double a) {
  require(a > 0.0 && a <= kHalfSqrt2, "level_time_bound: a must lie in (0, sqrt(2)/2]");
  return 0.5 * std::acosh(1.0 / (2.0 * a * a));
}

double elliptic_m_from_a(double a) {
  const double a2 = 2.0 * a * a;
  return (1.0 - a2) / (1.0 + a2);
}

namespace {

double period_unchecked(double a) {
  return kPi / agm(a, 0.5 * std::sqrt(1.0 + 2.0 * a * a));
}

// L as a function of the complementary modulus k1 = sqrt(1-m):
// L = sqrt(16 - 8 k1^2) * (pi/2) / AGM(k1, 1). Strictly decreasing in k1.
double period_from_k1(double k1) {
  return std::sqrt(16.0 - 8.0 * k1 * k1) * 0.5 * kPi / agm(k1, 1.0);
}

// Solves period_from_k1(k1) = L by bisection in log(k1). Assumes L >= pi*sqrt(2).
// Returns log(k1).
double log_k1_from_period(double L) {
  if (L <= kMinPeriod) return 0.0;
  double ulo = 0.0;  // log k1; k1 = 1 gives the minimal period
  double uhi = -0.25 * L - 3.0;
  while (period_from_k1(std::exp(uhi)) < L) {
    uhi *= 2.0;
    if (uhi < -740.0) throw RangeError("holonomy_from_period: period too large");
  }
  // invariant: period(exp(ulo)) <= L <= period(exp(uhi))
  for (int i = 0; i < 96; ++i) {
    const double um = 0.5 * (ulo + uhi);
    if (period_from_k1(std::exp(um)) < L)
      ulo = um;
    else
      uhi = um;
  }
  return 0.5 * (ulo + uhi);
}

double holonomy_from_k1(double k1) {
  const double m = (1.0 - k1) * (1.0 + k1);
  const double K = 0.5 * kPi / agm(k1, 1.0);
  return 4.0 * elliptic_E(m) / k1 - 2.0 * k1 * K;
}

}  // namespace

double period_from_a(double a) {
  require(a > 0.0 && a < kHalfSqrt2, "period_from_a: a must lie in (0, sqrt(2)/2)");
  return period_unchecked(a);
}

double period_integral(double a) {
  require(a > 0.0 && a < kHalfSqrt2, "period_integral: a must lie in (0, sqrt(2)/2)");
  const double ta = level_time_bound(a);
  // After t = t_a sin^2(s) the integrand is analytic on [0, pi/2]. The
  // radicand is evaluated in product form,
  //   1 - 2a^2 cosh 2t = 4a^2 sinh(t_a+t) sinh(t_a-t),
  // which is free of cancellation near the endpoint.
  const auto f = [a, ta](double s) {
    const double sn = std::sin(s);
    const double cs = std::cos(s);
    const double t = ta * sn * sn;
    const double rad = 4.0 * a * a * std::sinh(ta + t) * std::sinh(ta * cs * cs);
    return 8.0 * ta * sn * cs / std::sqrt(rad);
  };
  return adaptive_gk(f, 0.0, 0.5 * kPi, 1e-12, "period_integral");
}

LoopLevelSet level_from_a(double a) {
  require(a > 0.0 && a < kHalfSqrt2, "level_from_a: a must lie in (0, sqrt(2)/2)");
  const double L = period_unchecked(a);
  return {a, L, elliptic_m_from_a(a), holonomy_from_period(L)};
}

LoopLevelSet level_set_from_period(double L) {
  require(L > kMinPeriod * (1.0 + 1e-12),
          "level_set_from_period: L must exceed pi*sqrt(2)");
  double hi = kHalfSqrt2;        // period(hi) = pi*sqrt(2) < L
  double lo = 0.25;              // expanded until period(lo) > L
  while (period_unchecked(lo) <= L) {
    lo *= 0.25;
    if (lo < 1e-300) throw RangeError("level_set_from_period: period too large");
  }
  // bisect on a; period is strictly decreasing in a
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double Lm = period_unchecked(mid);
    if (std::abs(Lm - L) <= 1e-12 * L && i >= 40) {
      lo = hi = mid;
      break;
    }
    if (Lm > L)
      lo = mid;
    else
      hi = mid;
    if ((hi - lo) <= 1e-17 * hi) break;
  }
  const double a = 0.5 * (lo + hi);
  return {a, L, elliptic_m_from_a(a), holonomy_from_period(L)};
}

double holonomy_from_period(double L) {
  require(L >= kMinPeriod * (1.0 - 1e-12), "holonomy_from_period: L must be >= pi*sqrt(2)");
  if (L <= kMinPeriod) return kPi;
  return holonomy_from_k1(std::exp(log_k1_from_period(L)));
}

namespace detail {

double log_holonomy_from_period(double L) {
  if (L <= kMinPeriod) return std::log(kPi);
  if (L > 2800.0) return 1e9;  // H is far beyond double range; a sentinel suffices
  const double u = log_k1_from_period(L);
  const double k1 = std::exp(u);
  // For tiny k1, m = 1 - k1^2 rounds to 1 and H = 4 E(m)/k1 to full precision.
  if (k1 > 1e-8) return std::log(holonomy_from_k1(k1));
  return std::log(4.0) - u;
}

}  // namespace detail

double period_from_holonomy(double h) {
  require(h >= kPi * (1.0 - 1e-12), "period_from_holonomy: h must be >= pi");
  if (h <= kPi) return kMinPeriod;
  // H is strictly increasing in L; bracket and bisect.
  double lo = kMinPeriod;
  double hi = std::max(2.0 * kMinPeriod, 4.0 * std::log(h) + 8.0);
  while (holonomy_from_period(hi) < h) {
    hi *= 2.0;
    if (hi > 1e5) throw RangeError("period_from_holonomy: holonomy too large");
  }
  for (int i = 0; i < 110; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (holonomy_from_period(mid) < h)
      lo = mid;
    else
      hi = mid;
    if ((hi - lo) <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

TangentVector level_orbit_point(double a, double tau, int zsign) {
  require(a > 0.0 && a <= kHalfSqrt2, "level_orbit_point: a must lie in (0, sqrt(2)/2]");
  const double ta = level_time_bound(a);
  require(std::abs(tau) <= ta * (1.0 + 1e-12), "level_orbit_point: |tau| exceeds t_a");
  const double z2 = 4.0 * a * a * std::sinh(ta + tau) * std::sinh(std::max(0.0, ta - tau));
  const double z = (zsign >= 0 ? 1.0 : -1.0) * std::sqrt(std::max(0.0, z2));
  return {a * std::exp(tau), a * std::exp(-tau), z};
}

TangentVector level_zero_point(double a) {
  require(a > 0.0 && a <= kHalfSqrt2, "level_zero_point: a must lie in (0, sqrt(2)/2]");
  const double disc = std::sqrt(std::max(0.0, (1.0 - 2.0 * a * a) * (1.0 + 2.0 * a * a)));
  const double x0 = std::sqrt(0.5 * (1.0 + disc));
  return {x0, a * a / x0, 0.0};
}

}  // namespace sol
