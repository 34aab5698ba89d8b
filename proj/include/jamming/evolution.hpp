#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "jamming/lattice.hpp"
#include "jamming/specfun.hpp"

namespace jam {

using cplx = std::complex<double>;

// Amplitudes a_n of the evolved state sum_n a_n |n; b> over a contiguous range
// of impurity labels. Labels outside the range carry zero amplitude.
struct Evolution {
  double t = 0.0;
  long nmin = 0;
  std::vector<cplx> a;
  std::vector<double> w;    // |a_n|^2
  std::vector<double> cum;  // cum[k] = sum_{m < nmin+k} w_m, size a.size()+1

  long nmax() const { return nmin + static_cast<long>(a.size()) - 1; }
  bool in(long n) const { return n >= nmin && n <= nmax(); }
  cplx amp(long n) const { return in(n) ? a[static_cast<size_t>(n - nmin)] : cplx(0.0); }
  double weight(long n) const { return in(n) ? w[static_cast<size_t>(n - nmin)] : 0.0; }
  // sum_{m < n} w_m
  double weight_below(long n) const {
    if (n <= nmin) return 0.0;
    if (n > nmax()) return cum.back();
    return cum[static_cast<size_t>(n - nmin)];
  }
  double weight_range(long lo, long hi) const {
    if (hi < lo) return 0.0;
    return weight_below(hi + 1) - weight_below(lo);
  }

  void finish() {
    w.resize(a.size());
    cum.assign(a.size() + 1, 0.0);
    for (size_t k = 0; k < a.size(); ++k) {
      w[k] = std::norm(a[k]);
      cum[k + 1] = cum[k] + w[k];
    }
  }
};

// (-i)^n
inline cplx minus_i_pow(long n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

// Infinite chain: a_n = (-i)^n J_n(4t).
inline Evolution evolve_line(const BesselWeights& bw) {
  Evolution ev;
  ev.t = bw.t;
  ev.nmin = -bw.N();
  ev.a.resize(static_cast<size_t>(2 * bw.N() + 1));
  for (long n = -bw.N(); n <= bw.N(); ++n) ev.a[static_cast<size_t>(n + bw.N())] = minus_i_pow(n) * bw(n);
  ev.finish();
  return ev;
}

inline Evolution evolve_line(double t, double tol = 1e-12) { return evolve_line(bessel_weights(t, tol)); }

// Finite open chain: the impurity hops with amplitude 2 on the path
// nlo..nhi, starting from n = 0. Uses the sine eigenmodes of the path graph.
inline Evolution evolve_open(long nlo, long nhi, double t) {
  if (nlo > 0 || nhi < 0) throw Error(Errc::IndexOutOfRange, "open chain must contain n = 0");
  const long L = nhi - nlo + 1;
  const double pi = std::numbers::pi;
  const double norm = 2.0 / static_cast<double>(L + 1);
  const long s0 = -nlo + 1;  // 1-based position of n = 0
  Evolution ev;
  ev.t = t;
  ev.nmin = nlo;
  ev.a.assign(static_cast<size_t>(L), cplx(0.0));
  for (long k = 1; k <= L; ++k) {
    const double th = pi * static_cast<double>(k) / static_cast<double>(L + 1);
    const double e = 4.0 * std::cos(th);
    const cplx ph = std::exp(cplx(0.0, -e * t)) * std::sin(th * static_cast<double>(s0)) * norm;
    for (long s = 1; s <= L; ++s) ev.a[static_cast<size_t>(s - 1)] += ph * std::sin(th * static_cast<double>(s));
  }
  ev.finish();
  return ev;
}

// Open-chain evolution over every impurity label a closed background allows.
inline Evolution evolve_open(const Background& bg, double t) {
  if (!bg.closed()) throw Error(Errc::ConfigInvalid, "open-chain evolution needs a closed background");
  return evolve_open(bg.n_lo(), bg.n_hi(), t);
}

}  // namespace jam
