#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "jamming/evolution.hpp"
#include "jamming/lattice.hpp"

namespace jam {

// Evaluator sees the rendered spins on [lo, hi] of one basis state.
struct DiagonalObservable {
  long lo = 0, hi = 0;
  std::function<double(const SpinWindow&)> eval;
};

inline DiagonalObservable identity_observable(long site) {
  return {site, site, [](const SpinWindow&) { return 1.0; }};
}

inline DiagonalObservable sigma_z_observable(long site) {
  return {site, site, [site](const SpinWindow& w) { return static_cast<double>(w.at(site)); }};
}

inline DiagonalObservable p_down_observable(long site) {
  return {site, site, [site](const SpinWindow& w) { return w.at(site) == kDown ? 1.0 : 0.0; }};
}

struct PauliFactor {
  long site;
  char axis;  // 'x', 'y' or 'z'
};

struct PauliString {
  cplx coeff{1.0, 0.0};
  std::vector<PauliFactor> factors;
};

using PauliSum = std::vector<PauliString>;

inline PauliString pauli(std::initializer_list<PauliFactor> f, cplx coeff = 1.0) {
  PauliString p;
  p.coeff = coeff;
  p.factors = f;
  std::set<long> seen;
  for (const auto& x : p.factors) {
    if (x.axis != 'x' && x.axis != 'y' && x.axis != 'z')
      throw Error(Errc::ConfigInvalid, std::string("bad Pauli axis '") + x.axis + "'");
    if (!seen.insert(x.site).second) throw Error(Errc::ConfigInvalid, "repeated site in Pauli string");
  }
  return p;
}

// D_{l,m} = sx_l sy_m - sy_l sx_m
inline PauliSum current_d(long l, long m) {
  return {pauli({{l, 'x'}, {m, 'y'}}, 1.0), pauli({{l, 'y'}, {m, 'x'}}, -1.0)};
}

// spin current from l to l+2 across l+1: 2J D_{l,l+2} (1 - sz_{l+1})/2 with J = 1,
// so that d<sz_l>/dt = j(l-2) - j(l)
inline PauliSum current_operator(long l) {
  return {pauli({{l, 'x'}, {l + 2, 'y'}}), pauli({{l, 'y'}, {l + 2, 'x'}}, -1.0),
          pauli({{l, 'x'}, {l + 1, 'z'}, {l + 2, 'y'}}, -1.0), pauli({{l, 'y'}, {l + 1, 'z'}, {l + 2, 'x'}})};
}

struct Profile {
  std::string observable;
  std::string index_kind = "site";  // or "macrosite"
  std::string mode = "exact";       // or "asymptotic"
  double t = 0.0;
  long lo = 0;
  std::vector<double> values;

  long hi() const { return lo + static_cast<long>(values.size()) - 1; }
  double at(long i) const { return values.at(static_cast<size_t>(i - lo)); }
};

// The evolution must stay inside the labels the background can render.
inline void check_guard(const Background& bg, const Evolution& ev) {
  if (bg.closed()) {
    if (ev.nmin < bg.n_lo() || ev.nmax() > bg.n_hi())
      throw Error(Errc::WindowOutsideGuard, "impurity labels exceed the closed chain");
    return;
  }
  const long N = std::max(-ev.nmin, ev.nmax());
  bg.require_cutoff(N);
}

// particle occupying site l in |n; b>, or kNone
inline long particle_at(const Background& bg, long n, long l) {
  long ja = bg.particle_at_base(l);
  if (ja != Background::kNone && ja <= n) return ja;
  long jb = bg.particle_at_base(l - 2);
  if (jb != Background::kNone && jb > n) return jb;
  return Background::kNone;
}

namespace detail {

// Sorted labels where the rendering of [lo, hi] can change: it is constant on
// [B_k, B_{k+1} - 1] and on the two unbounded ends.
inline std::vector<long> breakpoints(const Background& bg, long lo, long hi) {
  std::vector<long> B;
  for (long l = lo; l <= hi; ++l) {
    long ja = bg.particle_at_base(l), jb = bg.particle_at_base(l - 2);
    if (ja != Background::kNone) B.push_back(ja);
    if (jb != Background::kNone) B.push_back(jb);
  }
  std::sort(B.begin(), B.end());
  B.erase(std::unique(B.begin(), B.end()), B.end());
  return B;
}

// Calls fn(n_first, n_last) for each constant segment clipped to [nlo, nhi].
template <class F>
void for_segments(const Background& bg, long lo, long hi, long nlo, long nhi, F&& fn) {
  auto B = breakpoints(bg, lo, hi);
  long start = nlo;
  for (long b : B) {
    if (b <= start) continue;
    if (b > nhi) break;
    fn(start, b - 1);
    start = b;
  }
  if (start <= nhi) fn(start, nhi);
}

}  // namespace detail

inline double expect_diagonal(const DiagonalObservable& D, const Evolution& ev, const Background& bg) {
  check_guard(bg, ev);
  bg.require_sites(D.lo, D.hi);
  double s = 0.0;
  detail::for_segments(bg, D.lo, D.hi, ev.nmin, ev.nmax(), [&](long a, long b) {
    double w = ev.weight_range(a, b);
    if (w == 0.0) return;
    s += w * D.eval(render(bg, a, D.lo, D.hi));
  });
  return s;
}

// <n|D|n> for every n in [nlo, nhi]
inline std::vector<double> diagonal_values(const DiagonalObservable& D, const Background& bg, long nlo, long nhi) {
  bg.require_sites(D.lo, D.hi);
  std::vector<double> v(static_cast<size_t>(nhi - nlo + 1), 0.0);
  detail::for_segments(bg, D.lo, D.hi, nlo, nhi, [&](long a, long b) {
    double d = D.eval(render(bg, a, D.lo, D.hi));
    for (long n = a; n <= b; ++n) v[static_cast<size_t>(n - nlo)] = d;
  });
  return v;
}

// <n|sz_l|n> from the rules for the right (l > 0) and left (l < -1) side of
// the flip, with the pattern read off |0; b>.
inline int sigma_z_element_rule(long n, long l, const Background& bg) {
  if (l == 0 || l == -1) throw Error(Errc::RuleDomainError, "rules are stated for l > 0 and l < -1 only");
  auto s = [&](long site) { return bg.spin(0, site); };
  auto pat = [&](long a, long b, long c) {
    return std::array<bool, 3>{s(a) == kUp, s(b) == kUp, s(c) == kUp};
  };
  if (l > 0) {
    auto p = pat(l, l + 1, l + 2);
    long jR = particle_at(bg, 0, p[0] ? l : l + 1);
    if (jR == Background::kNone) throw Error(Errc::RuleDomainError, "no particle for j_R");
    if (p[0] && p[1] && p[2]) return 1 - 2 * (n == jR) - 2 * (n == jR + 1);
    if (p[0] && !p[1] && p[2]) return 1 - 2 * (n == jR);
    if (p[0] && p[1] && !p[2]) return 1 - 2 * (n >= jR);
    if (!p[0] && p[1] && p[2]) return 1 - 2 * (n <= jR);
    if (!p[0] && p[1] && !p[2]) return -1;
    throw Error(Errc::RuleDomainError, "pattern at site " + std::to_string(l) + " is not jammed");
  }
  auto p = pat(l - 2, l - 1, l);
  long jL = particle_at(bg, 0, p[2] ? l : l - 1);
  if (jL == Background::kNone) throw Error(Errc::RuleDomainError, "no particle for j_L");
  if (p[0] && p[1] && p[2]) return 1 - 2 * (n == jL - 1) - 2 * (n == jL - 2);
  if (p[0] && !p[1] && p[2]) return 1 - 2 * (n == jL - 1);
  if (p[0] && p[1] && !p[2]) return 1 - 2 * (n >= jL - 1);
  if (!p[0] && p[1] && p[2]) return 1 - 2 * (n < jL);
  if (!p[0] && p[1] && !p[2]) return -1;
  throw Error(Errc::RuleDomainError, "pattern at site " + std::to_string(l) + " is not jammed");
}

// <sz_l> with P(up) = W(n >= j_a) + W(n < j_b); j_b < j_a so the events are disjoint.
inline double sigma_z_fast(long l, const Evolution& ev, const Background& bg) {
  long ja = bg.particle_at_base(l), jb = bg.particle_at_base(l - 2);
  double up = 0.0;
  if (ja != Background::kNone) up += ev.cum.back() - ev.weight_below(ja);
  if (jb != Background::kNone) up += ev.weight_below(jb);
  return 2.0 * up - ev.cum.back();
}

inline Profile magnetisation_profile(const Evolution& ev, const Background& bg, long lo, long hi) {
  check_guard(bg, ev);
  bg.require_sites(lo, hi);
  Profile p;
  p.observable = "sz";
  p.t = ev.t;
  p.lo = lo;
  p.values.assign(static_cast<size_t>(hi - lo + 1), 0.0);
#pragma omp parallel for schedule(static)
  for (long l = lo; l <= hi; ++l) p.values[static_cast<size_t>(l - lo)] = sigma_z_fast(l, ev, bg);
  return p;
}

namespace detail {

// <n1| P |n2> for renderings r1, r2 of the support window
inline cplx string_element(const PauliString& P, const SpinWindow& r1, const SpinWindow& r2) {
  cplx amp = P.coeff;
  std::vector<int> out = r2.spins;
  for (const auto& f : P.factors) {
    size_t k = static_cast<size_t>(f.site - r2.first_site);
    int s = out[k];
    if (f.axis == 'z') {
      amp *= static_cast<double>(s);
    } else {
      if (f.axis == 'y') amp *= (s == kUp ? cplx(0.0, 1.0) : cplx(0.0, -1.0));
      out[k] = -s;
    }
  }
  return out == r1.spins ? amp : cplx(0.0);
}

}  // namespace detail

inline cplx expect_pauli_string(const PauliString& P, const Evolution& ev, const Background& bg) {
  check_guard(bg, ev);
  if (P.factors.empty()) return P.coeff * ev.cum.back();
  long smin = P.factors.front().site, smax = smin;
  bool diagonal = true;
  for (const auto& f : P.factors) {
    smin = std::min(smin, f.site);
    smax = std::max(smax, f.site);
    if (f.axis != 'z') diagonal = false;
  }
  bg.require_sites(smin, smax);

  if (diagonal) {
    DiagonalObservable D{smin, smax, [&](const SpinWindow& w) {
                           double v = 1.0;
                           for (const auto& f : P.factors) v *= w.at(f.site);
                           return v;
                         }};
    return P.coeff * expect_diagonal(D, ev, bg);
  }

  // For n1 != n2 the renderings differ exactly on [p0(lo+1), p0(hi)+2] (lo, hi
  // the smaller and larger label), which has to fit inside the support.
  long jfirst = Background::kNone, jlast = Background::kNone;
  for (long l = smin; l <= smax - 2; ++l) {
    long j = bg.particle_at_base(l);
    if (j == Background::kNone) continue;
    if (jfirst == Background::kNone) jfirst = j;
    jlast = j;
  }
  if (jfirst == Background::kNone) return 0.0;
  cplx s = 0.0;
  for (long n2 = jfirst - 1; n2 <= jlast; ++n2) {
    cplx a2 = ev.amp(n2);
    if (a2 == 0.0) continue;
    SpinWindow r2 = render(bg, n2, smin, smax);
    for (long n1 = jfirst - 1; n1 <= jlast; ++n1) {
      if (n1 == n2) continue;
      cplx a1 = ev.amp(n1);
      if (a1 == 0.0) continue;
      cplx m = detail::string_element(P, render(bg, n1, smin, smax), r2);
      if (m != 0.0) s += std::conj(a1) * a2 * m;
    }
  }
  return s;
}

inline cplx expect_pauli_sum(const PauliSum& A, const Evolution& ev, const Background& bg) {
  cplx s = 0.0;
  for (const auto& P : A) s += expect_pauli_string(P, ev, bg);
  return s;
}

inline double spin_current(long l, const Evolution& ev, const Background& bg) {
  return expect_pauli_sum(current_operator(l), ev, bg).real();
}

// <D1(t1) D2(t2)> on the infinite chain, t1 >= t2 >= 0:
// sum_{m,n} J_m(4t1) J_{m-n}(4(t1-t2)) J_n(4t2) d1(m) d2(n)
inline double two_time_diagonal(const DiagonalObservable& D1, double t1, const DiagonalObservable& D2, double t2,
                                const Background& bg, double tol = 1e-12) {
  if (!(t1 >= t2 && t2 >= 0.0)) throw Error(Errc::ConfigInvalid, "need t1 >= t2 >= 0");
  if (bg.closed()) throw Error(Errc::ConfigInvalid, "two-time correlator is for the infinite chain");
  BesselWeights b1 = bessel_weights(t1, tol), b2 = bessel_weights(t2, tol), b12 = bessel_weights(t1 - t2, tol);
  bg.require_cutoff(b1.N());
  auto d1 = diagonal_values(D1, bg, -b1.N(), b1.N());
  auto d2 = diagonal_values(D2, bg, -b2.N(), b2.N());
  double s = 0.0;
  for (long n = -b2.N(); n <= b2.N(); ++n) {
    double c2 = b2(n) * d2[static_cast<size_t>(n + b2.N())];
    if (c2 == 0.0) continue;
    double inner = 0.0;
    for (long m = std::max(-b1.N(), n - b12.N()); m <= std::min(b1.N(), n + b12.N()); ++m)
      inner += b1(m) * b12(m - n) * d1[static_cast<size_t>(m + b1.N())];
    s += c2 * inner;
  }
  return s;
}

inline double p_down_down(long l, const Evolution& ev, const Background& bg) {
  DiagonalObservable D{l, l + 1, [l](const SpinWindow& w) {
                         return (w.at(l) == kDown && w.at(l + 1) == kDown) ? 1.0 : 0.0;
                       }};
  return expect_diagonal(D, ev, bg);
}

struct PositionStats {
  double prob_c = 0.0;   // P(l'_j = c(j))
  double prob_c1 = 0.0;  // P(l'_j = c(j) + 1)
  double mean = 0.0;
  double variance = 0.0;
};

// f(j, t) = sum_{n < j} |a_n|^2
inline double f_of(long j, const Evolution& ev) { return ev.weight_below(j); }

inline PositionStats position_statistics(long j, const Evolution& ev, const Background& bg) {
  bg.require(j);
  const double f = f_of(j, ev);
  return {1.0 - f, f, static_cast<double>(bg.c(j)) + f, f - f * f};
}

inline double position_correlation(long m, long n, const Evolution& ev, const Background& bg) {
  bg.require(m);
  bg.require(n);
  const double fm = f_of(m, ev), fn = f_of(n, ev);
  return f_of(std::min(m, n), ev) - fm * fn;
}

struct EntropyResult {
  double entropy_bits = 0.0;
  int schmidt_count = 0;
  std::vector<double> schmidt_weights;
};

// Cut on the bond (c, c+1). States with the impurity left of the cut share the
// right half, states with it right of the cut share the left half; at most one
// label straddles.
inline EntropyResult bipartite_entropy(long c, const Evolution& ev, const Background& bg,
                                       double zero_tol = 1e-15) {
  check_guard(bg, ev);
  bg.require_sites(c, c + 1);
  long nR = Background::kNone, nL = Background::kNone;
  for (long l = bg.site_lo() - 2; l <= bg.site_hi(); ++l) {
    long j = bg.particle_at_base(l);
    if (j == Background::kNone) continue;
    if (l <= c - 2) nR = j;
    if (l > c && nL == Background::kNone) nL = j - 1;
  }
  if (nR == Background::kNone) nR = bg.jmin() - 1;
  if (nL == Background::kNone) nL = bg.jmax();
  EntropyResult r;
  if (nR < nL) {
    r.schmidt_weights.push_back(ev.weight_below(nR + 1));
    for (long n = nR + 1; n < nL; ++n) r.schmidt_weights.push_back(ev.weight(n));
    r.schmidt_weights.push_back(ev.cum.back() - ev.weight_below(nL));
  } else {
    // the two merged groups overlap, which only happens next to a chain end:
    // decompose explicitly on the rendered halves
    std::map<std::string, Eigen::Index> L, R;
    std::vector<std::tuple<Eigen::Index, Eigen::Index, cplx>> entries;
    for (long n = ev.nmin; n <= ev.nmax(); ++n) {
      auto a = L.emplace(render(bg, n, bg.site_lo(), c).str(), static_cast<Eigen::Index>(L.size())).first->second;
      auto b = R.emplace(render(bg, n, c + 1, bg.site_hi()).str(), static_cast<Eigen::Index>(R.size())).first->second;
      entries.emplace_back(a, b, ev.amp(n));
    }
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(L.size()), static_cast<Eigen::Index>(R.size()));
    for (const auto& [a, b, v] : entries) M(a, b) += v;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
      r.schmidt_weights.push_back(svd.singularValues()(k) * svd.singularValues()(k));
  }
  for (double p : r.schmidt_weights) {
    if (p <= zero_tol) continue;
    ++r.schmidt_count;
    r.entropy_bits -= p * std::log2(p);
  }
  return r;
}

}  // namespace jam
