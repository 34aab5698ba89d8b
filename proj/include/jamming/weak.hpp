#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jamming/backgrounds.hpp"
#include "jamming/engine.hpp"
#include "jamming/specfun.hpp"

namespace jam {

// Neel background with macrosites m'..m'+M-1 all up, flipped at site 0.
struct WeakConfig {
  long mp = 1;
  long M = 1;
  double t = 0.0;

  void validate() const {
    if (mp <= 0) throw Error(Errc::ConfigInvalid, "m' must be positive");
    if (M < 1) throw Error(Errc::ConfigInvalid, "M must be at least 1");
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error(Errc::ConfigInvalid, "time must be finite and >= 0");
  }
};

// The four classes of impurity labels.
enum class WeakClass { Left, DomainEven, DomainOdd, Right };

struct WeakLabel {
  WeakClass kind;
  long index;  // a for DomainEven, b for DomainOdd, n otherwise
};

inline WeakLabel classify_label(long n, const WeakConfig& cfg) {
  if (n < cfg.mp) return {WeakClass::Left, n};
  if (n >= cfg.mp + 2 * cfg.M - 1) return {WeakClass::Right, n};
  const long k = n - cfg.mp;
  if (k % 2 == 0) return {WeakClass::DomainEven, k / 2};
  return {WeakClass::DomainOdd, (k - 1) / 2};
}

// Engine background large enough for sites [lo, hi] at time cfg.t.
inline Background weak_engine_background(const WeakConfig& cfg, long lo, long hi) {
  cfg.validate();
  long hw = default_cutoff(cfg.t) + 8;
  hw = std::max(hw, (std::max(-lo, hi) + 1) / 2 + 4);
  return weak_background(cfg.mp, cfg.M, hw);
}

// Closed forms. Bessel values and the two f's are computed once.
class WeakProtocol {
 public:
  explicit WeakProtocol(const WeakConfig& cfg, double tol = 1e-12) : cfg_(cfg), bw_((cfg.validate(), bessel_weights(cfg.t, tol))) {
    fm_ = f_exact(static_cast<double>(cfg.mp), bw_);
    fM_ = f_exact(static_cast<double>(cfg.mp + 2 * cfg.M - 2), bw_);
  }

  const WeakConfig& config() const { return cfg_; }
  const BesselWeights& weights() const { return bw_; }
  double J(long n) const { return bw_(n); }
  double J2(long n) const { return bw_(n) * bw_(n); }

  double magnetisation(long l) const {
    const long m = cfg_.mp, M = cfg_.M, lp = ceil_half(l);
    if (l % 2 != 0) {
      if (lp == m + M - 1) return 2.0 * fM_ - 1.0;
      if (lp == m - 1) return 1.0 - 2.0 * fm_;
      if (lp >= m && lp <= m + M - 2) return 1.0 - 2.0 * J2(m - 2 * lp - 1) - 2.0 * J2(m - 2 * lp);
      return -1.0;
    }
    if (lp < m - 1) return 1.0 - 2.0 * J2(lp);
    if (lp > m + M - 2) return 1.0 - 2.0 * J2(lp + M);
    return 1.0 - 2.0 * J2(m - 2 * lp - 2) - 2.0 * J2(m - 2 * lp - 1);
  }

  // <s^a_{l1} s^b_{l2}> for l1 != l2 and a, b in {x, y, z}.
  double two_point(char a, char b, long l1, long l2) const {
    check_axis(a);
    check_axis(b);
    if (l1 == l2) throw Error(Errc::PairNotInCatalog, "coincident sites");
    if (l1 > l2) {
      std::swap(l1, l2);
      std::swap(a, b);
    }
    const bool za = a == 'z', zb = b == 'z';
    if (za != zb) return 0.0;  // odd number of flips
    const bool e1 = l1 % 2 == 0, e2 = l2 % 2 == 0;
    if (za) {
      if (e1 && e2) return zz_even(ceil_half(l2), (l2 - l1) / 2);
      if (!e1 && !e2) return zz_odd(ceil_half(l2), (l2 - l1) / 2);
      return e1 ? zz_mixed(l1 / 2, ceil_half(l2)) : zz_mixed(l2 / 2, ceil_half(l1));
    }
    if (e1 != e2) return 0.0;
    const int al = a == 'x' ? 1 : 2, be = b == 'x' ? 1 : 2;
    if (e1) return xy_even(al, be, ceil_half(l2), (l2 - l1) / 2);
    if (al == be) return 0.0;
    return cross_odd(be, ceil_half(l2), (l2 - l1) / 2);
  }

 private:
  static void check_axis(char c) {
    if (c != 'x' && c != 'y' && c != 'z') throw Error(Errc::ConfigInvalid, std::string("bad axis ") + c);
  }
  static double th(bool c) { return c ? 1.0 : 0.0; }
  static double cos_quarter(long k) {
    switch (((k % 4) + 4) % 4) {
      case 0: return 1.0;
      case 2: return -1.0;
      default: return 0.0;
    }
  }

  // sites 2(l'-d) and 2l'
  double xy_even(int al, int be, long lp, long d) const {
    const long m = cfg_.mp, M = cfg_.M;
    double s = th(lp < m) * J(lp) * J(lp - d) + th(lp >= m + M + d - 2) * J(lp + M) * J(lp + M - d) +
               th(d == 1 && m <= lp && lp <= m + M - 2) * J(2 * lp - m + 1) * J(2 * lp - m);
    return 2.0 * cos_quarter(be - al + d) * s;
  }

  // s^{3-al}_{2(l'-d)-1} s^{al}_{2l'-1}
  double cross_odd(int al, long lp, long d) const {
    const long m = cfg_.mp, M = cfg_.M;
    if (d != 1 || lp < m || lp > m + M - 1) return 0.0;
    return 2.0 * (al % 2 ? -1.0 : 1.0) * J(m - 2 * lp + 1) * J(m - 2 * lp);
  }

  // sites 2(l'-d)-1 and 2l'-1
  double zz_odd(long lp, long d) const {
    const long m = cfg_.mp, M = cfg_.M;
    const bool shortd = d < M;
    double r = 1.0 - 2.0 * th(m + M - 1 == lp - d) * fM_;
    r += 2.0 * th(m - 1 == lp - d) * (-1.0 + fm_ - th(shortd) * (2.0 * fm_ - 1.0));
    r -= 2.0 * th(lp == m + M - 1) * (fM_ - 2.0 * th(shortd) * fM_);
    r += 2.0 * th(lp == m - 1) * (-1.0 + fm_);
    r += 4.0 * th(d == M && m - 1 == lp - d) * (fM_ - fm_);
    r -= 2.0 * th(!shortd) * (th(m <= lp && lp < m + M - 1) + th(m + d <= lp && lp < m + d + M - 1));
    r -= 2.0 * th(shortd) * (th(m <= lp && lp < m + d - 1) + th(m + M - 1 <= lp && lp < m + d + M - 1));
    r += 2.0 * (th(m <= lp - d && lp - d <= m + M - 2) - 2.0 * th(m + d <= lp && lp <= m + M - 1)) *
         (J2(m - 2 * lp + 2 * d) + J2(m - 2 * lp + 2 * d - 1));
    r += 2.0 * (th(m <= lp && lp <= m + M - 2) - 2.0 * th(m + d - 1 <= lp && lp <= m + M - 2)) *
         (J2(m - 2 * lp) + J2(m - 2 * lp - 1));
    return r;
  }

  // sites 2(l'-d) and 2l'
  double zz_even(long lp, long d) const {
    const long m = cfg_.mp, M = cfg_.M, q = lp - d;
    return 1.0 - 2.0 * th(q < m) * J2(q) - 2.0 * th(lp < m) * J2(lp) - 2.0 * th(q >= m + M - 2) * J2(lp + M - d) -
           2.0 * th(lp >= m + M - 2) * J2(lp + M) - 2.0 * th(m - 1 <= q && q < m + M - 2) * J2(m - 2 * lp + 2 * d - 2) -
           2.0 * th(m - 1 <= lp && lp < m + M - 2) * J2(m - 2 * lp - 2) -
           2.0 * th(m <= q && q < m + M - 1) * J2(m - 2 * lp + 2 * d - 1) -
           2.0 * th(m <= lp && lp < m + M - 1) * J2(m - 2 * lp - 1);
  }

  // sites 2a' and 2l'-1, in either order
  double zz_mixed(long ap, long lp) const {
    const long m = cfg_.mp, M = cfg_.M;
    const double left = th(ap < m) * J2(ap), right = th(ap >= m + M - 2) * J2(ap + M);
    const double e2 = th(m - 1 <= ap && ap <= m + M - 3) * J2(m - 2 * ap - 2);
    const double e1 = th(m <= ap && ap <= m + M - 2) * J2(m - 2 * ap - 1);
    double r = -1.0 + 2.0 * left + 2.0 * right + 2.0 * e2 + 2.0 * e1;
    r += 2.0 * th(lp == m - 1) * (1.0 - fm_ - 2.0 * right);
    r += 2.0 * th(lp == m + M - 1) * (fM_ - 2.0 * left);
    if (m <= lp && lp <= m + M - 2)
      r += 2.0 * (1.0 - J2(m - 2 * lp) - J2(m - 2 * lp - 1) - 2.0 * left - 2.0 * right +
                  2.0 * th(lp == ap + 1) * J2(m - 2 * lp) + 2.0 * th(ap == lp) * J2(m - 2 * ap - 1));
    r -= 4.0 * th(m - 1 <= lp && lp <= m + M - 1) * (e2 + e1);
    return r;
  }

  WeakConfig cfg_;
  BesselWeights bw_;
  double fm_ = 0.0, fM_ = 0.0;
};

inline double weak_magnetisation(long l, const WeakConfig& cfg) { return WeakProtocol(cfg).magnetisation(l); }

// Late-time values at sites 2m'-3 and 2m'+2M-3.
inline std::pair<double, double> special_trajectories(const WeakConfig& cfg) {
  cfg.validate();
  const double m = static_cast<double>(cfg.mp), M = static_cast<double>(cfg.M);
  if (cfg.t == 0.0) return {-1.0, 1.0};
  return {-arcsin_ray(m, cfg.t), arcsin_ray(m + 2.0 * (M - 1.0), cfg.t)};
}

inline double two_point(char a, char b, long l1, long l2, const WeakConfig& cfg) {
  return WeakProtocol(cfg).two_point(a, b, l1, l2);
}

// Basis |uu>, |ud>, |du>, |dd>, the first site most significant.
struct TwoSpinDensityMatrix {
  long i = 0, j = 0;
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
};

namespace detail {

inline Eigen::Matrix2cd pauli_matrix(int k) {
  Eigen::Matrix2cd s;
  const cplx I(0.0, 1.0);
  switch (k) {
    case 1: s << 0.0, 1.0, 1.0, 0.0; break;
    case 2: s << 0.0, -I, I, 0.0; break;
    case 3: s << 1.0, 0.0, 0.0, -1.0; break;
    default: s = Eigen::Matrix2cd::Identity();
  }
  return s;
}

inline Eigen::Matrix4cd kron(const Eigen::Matrix2cd& A, const Eigen::Matrix2cd& B) {
  Eigen::Matrix4cd K;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) K.block<2, 2>(2 * a, 2 * b) = A(a, b) * B;
  return K;
}

}  // namespace detail

// rho = 1/4 sum_{a,b} <s^a s^b> s^a (x) s^b from the given correlators;
// corr(a, b) gets axis indices 0..3 (0 = identity) and is only asked for
// pairs with an even number of transverse axes.
template <class Corr>
TwoSpinDensityMatrix rho_from_correlators(long i, long j, Corr&& corr) {
  TwoSpinDensityMatrix r;
  r.i = i;
  r.j = j;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const int flips = (a == 1 || a == 2) + (b == 1 || b == 2);
      if (flips % 2) continue;
      const double c = (a == 0 && b == 0) ? 1.0 : corr(a, b);
      r.rho += 0.25 * c * detail::kron(detail::pauli_matrix(a), detail::pauli_matrix(b));
    }
  return r;
}

inline TwoSpinDensityMatrix assemble_rho(long i, long j, const WeakProtocol& wp) {
  static const char ax[] = {'0', 'x', 'y', 'z'};
  return rho_from_correlators(i, j, [&](int a, int b) -> double {
    if (a == 0) return b == 3 ? wp.magnetisation(j) : 0.0;
    if (b == 0) return a == 3 ? wp.magnetisation(i) : 0.0;
    return wp.two_point(ax[a], ax[b], i, j);
  });
}

inline TwoSpinDensityMatrix assemble_rho(long i, long j, const WeakConfig& cfg) { return assemble_rho(i, j, WeakProtocol(cfg)); }

// The same matrix built from generic-engine expectation values.
inline TwoSpinDensityMatrix engine_rho(long i, long j, const Evolution& ev, const Background& bg) {
  static const char ax[] = {'0', 'x', 'y', 'z'};
  return rho_from_correlators(i, j, [&](int a, int b) -> double {
    PauliString P;
    if (a) P.factors.push_back({i, ax[a]});
    if (b) P.factors.push_back({j, ax[b]});
    return expect_pauli_string(P, ev, bg).real();
  });
}

inline void check_density_matrix(const Eigen::Matrix4cd& rho) {
  if (std::abs(rho.trace() - cplx(1.0)) > 1e-10) throw Error(Errc::NotADensityMatrix, "trace differs from 1");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw Error(Errc::NotADensityMatrix, "not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-10) throw Error(Errc::NotADensityMatrix, "negative eigenvalue");
}

// Wootters concurrence through the Hermitian form sqrt(rho) rho~ sqrt(rho).
inline double concurrence(const Eigen::Matrix4cd& rho) {
  check_density_matrix(rho);
  Eigen::Matrix4cd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
  Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::Matrix4cd sq = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  Eigen::Matrix4cd yy = detail::kron(detail::pauli_matrix(2), detail::pauli_matrix(2));
  Eigen::Matrix4cd tilde = yy * h.conjugate() * yy;
  Eigen::Matrix4cd R = sq * tilde * sq;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> er(0.5 * (R + R.adjoint()));
  Eigen::Vector4d lam = er.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(lam.data(), lam.data() + 4, std::greater<>());
  return std::max(0.0, lam(0) - lam(1) - lam(2) - lam(3));
}

inline double concurrence(const TwoSpinDensityMatrix& r) { return concurrence(r.rho); }

inline double binary_entropy(double x) {
  auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  return term(x) + term(1.0 - x);
}

inline double eof_from_concurrence(double C) {
  C = std::clamp(C, 0.0, 1.0);
  return binary_entropy(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - C * C))));
}

inline double eof(const Eigen::Matrix4cd& rho) { return eof_from_concurrence(concurrence(rho)); }
inline double eof(const TwoSpinDensityMatrix& r) { return eof(r.rho); }

struct EntanglementMap {
  long lo = 0, hi = 0;
  double t = 0.0;
  Eigen::MatrixXd values;  // E(i, j), zero on the diagonal

  double at(long i, long j) const { return values(i - lo, j - lo); }
  // factor (Jt)^2 / log2(Jt) that makes late-time maps comparable
  double display_scale() const { return t > 1.0 ? t * t / std::log2(t) : 1.0; }
};

inline EntanglementMap entanglement_map(const WeakConfig& cfg, long lo, long hi) {
  if (hi < lo) throw Error(Errc::ConfigInvalid, "empty site range");
  WeakProtocol wp(cfg);
  EntanglementMap em;
  em.lo = lo;
  em.hi = hi;
  em.t = cfg.t;
  const long n = hi - lo + 1;
  em.values = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(dynamic)
  for (long a = 0; a < n; ++a)
    for (long b = a + 1; b < n; ++b) {
      double e = eof(assemble_rho(lo + a, lo + b, wp));
      em.values(a, b) = e;
      em.values(b, a) = e;
    }
  return em;
}

}  // namespace jam
