#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "jamming/error.hpp"

namespace jam {

// Times are measured in units of 1/J, so the Bessel argument is 4t.
inline double bessel_argument(double t) { return 4.0 * t; }

struct BesselWeights {
  double t = 0.0;
  long order_cutoff = 0;   // N
  std::vector<double> values;  // J_n(4t) for n in [-N, N]
  double tail_bound = 0.0;     // truncation bound plus round-off (observed, floored)
  double deficit = 0.0;        // |sum_{|n|<=N} J_n^2 - 1| as measured

  long N() const { return order_cutoff; }
  double operator()(long n) const {
    if (n < -order_cutoff || n > order_cutoff) return 0.0;
    return values[static_cast<size_t>(n + order_cutoff)];
  }
  double sum_squares() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s;
  }
};

inline long default_cutoff(double t) {
  const double x = bessel_argument(t);
  return static_cast<long>(std::ceil(x + 10.0 * std::cbrt(x) + 20.0));
}

namespace detail {

// J_0..J_N(x) by Miller's backward recurrence started at M > N,
// normalised with J_0 + 2 sum_k J_{2k} = 1.
inline std::vector<double> miller(double x, long N) {
  long M = N + 30 + static_cast<long>(std::sqrt(40.0 * static_cast<double>(N)));
  if (M % 2) ++M;
  std::vector<double> J(static_cast<size_t>(N + 1), 0.0);
  double jp1 = 0.0, jk = 1e-300, norm = 0.0;
  for (long k = M; k >= 1; --k) {
    double jm1 = (2.0 * static_cast<double>(k) / x) * jk - jp1;
    jp1 = jk;
    jk = jm1;  // now J_{k-1}
    long km1 = k - 1;
    if (km1 <= N) J[static_cast<size_t>(km1)] = jk;
    if (km1 > 0 && km1 % 2 == 0) norm += 2.0 * jk;
    if (std::abs(jk) > 1e250) {
      const double s = 1e-250;
      jk *= s;
      jp1 *= s;
      norm *= s;
      for (long i = km1; i <= N; ++i) J[static_cast<size_t>(i)] *= s;
    }
  }
  norm += jk;
  for (double& v : J) v /= norm;
  return J;
}

// Kapteyn: |J_n(n z)| <= exp(-n (acosh(1/z) - sqrt(1 - z^2))) for 0 < z <= 1.
inline double kapteyn_log(double x, double n) {
  const double z = x / n;
  if (z >= 1.0) return 0.0;
  return -n * (std::acosh(1.0 / z) - std::sqrt(1.0 - z * z));
}

// Bound on sum_{|n|>N} J_n(x)^2. log K(n) is concave and decreasing for n > x,
// so the ratio K(N+2)/K(N+1) bounds every later ratio.
inline double analytic_tail(double x, long N) {
  const double n1 = static_cast<double>(N + 1);
  if (n1 <= x) return std::numeric_limits<double>::infinity();
  const double l1 = kapteyn_log(x, n1), l2 = kapteyn_log(x, n1 + 1.0);
  const double r2 = std::exp(2.0 * (l2 - l1));
  if (r2 >= 1.0) return std::numeric_limits<double>::infinity();
  return 2.0 * std::exp(2.0 * l1) / (1.0 - r2);
}

}  // namespace detail

inline BesselWeights bessel_weights(double t, double tol = 1e-12) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(Errc::ConfigInvalid, "time must be finite and >= 0");
  if (!(tol > 0.0) || tol > 1e-8) throw Error(Errc::ConfigInvalid, "tolerance must lie in (0, 1e-8]");
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (tol < 64.0 * eps) throw Error(Errc::ToleranceUnreachable, "tolerance below double round-off");
  BesselWeights bw;
  bw.t = t;
  if (t == 0.0) {
    bw.order_cutoff = 0;
    bw.values = {1.0};
    return bw;
  }
  const double x = bessel_argument(t);
  for (long N = default_cutoff(t); N <= 4 * default_cutoff(t); N += 16) {
    std::vector<double> pos = detail::miller(x, N);
    bw.order_cutoff = N;
    bw.values.assign(static_cast<size_t>(2 * N + 1), 0.0);
    for (long n = 0; n <= N; ++n) {
      bw.values[static_cast<size_t>(N + n)] = pos[static_cast<size_t>(n)];
      bw.values[static_cast<size_t>(N - n)] = (n % 2 ? -1.0 : 1.0) * pos[static_cast<size_t>(n)];
    }
    bw.deficit = std::abs(bw.sum_squares() - 1.0);
    const double trunc = detail::analytic_tail(x, N);
    bw.tail_bound = trunc + std::max(bw.deficit, std::sqrt(static_cast<double>(2 * N + 1)) * eps);
    if (bw.deficit < tol && trunc < tol) return bw;
  }
  throw Error(Errc::ToleranceUnreachable, "normalization deficit stays above tolerance");
}

// sum_{n < x} J_n(4t)^2
inline double f_exact(double x, const BesselWeights& bw) {
  double s = 0.0;
  const long N = bw.N();
  for (long n = -N; n <= N && static_cast<double>(n) < x; ++n) s += bw(n) * bw(n);
  return s;
}

inline double f_exact(double x, double t) { return f_exact(x, bessel_weights(t)); }

// 1/2 + arcsin(x/4t)/pi, clamped to [0, 1] outside the light cone
inline double f_asym(double x, double t) {
  const double r = bessel_argument(t);
  if (x <= -r) return 0.0;
  if (x >= r) return 1.0;
  return 0.5 + std::asin(x / r) / std::numbers::pi;
}

// (2/pi) arcsin(x/4t), clamped to +-1
inline double arcsin_ray(double x, double t) {
  const double r = bessel_argument(t);
  if (x <= -r) return -1.0;
  if (x >= r) return 1.0;
  return 2.0 / std::numbers::pi * std::asin(x / r);
}

// arccos(x/4t)/pi, clamped
inline double arccos_ray(double x, double t) {
  const double r = bessel_argument(t);
  if (x <= -r) return 1.0;
  if (x >= r) return 0.0;
  return std::acos(x / r) / std::numbers::pi;
}

}  // namespace jam
