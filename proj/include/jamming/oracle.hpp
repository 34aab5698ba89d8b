#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "jamming/engine.hpp"
#include "jamming/lattice.hpp"
#include "jamming/specfun.hpp"

// Brute-force reference: full 2^N state vectors on an open chain of sites
// 0..N-1. Basis bit k is site k, set bit = spin up.
namespace jam::oracle {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<double>;

constexpr int kMaxSites = 20;

enum class Kind { Folded, Xxz };

struct HamiltonianSpec {
  Kind kind = Kind::Folded;
  int N = 0;
  double J = 1.0;
  double delta = 0.0;  // XXZ only
};

inline void check_size(int N) {
  if (N < 1 || N > kMaxSites) throw Error(Errc::TooLarge, "chain of " + std::to_string(N) + " sites");
}

inline bool up(uint64_t s, int k) { return (s >> k) & 1u; }

// Folded: J sum_l (1 - sz_{l+1})/2 (sx_l sx_{l+2} + sy_l sy_{l+2}).
// XXZ:    J sum_l (sx_l sx_{l+1} + sy_l sy_{l+1} + delta sz_l sz_{l+1}).
inline SpMat build_hamiltonian(const HamiltonianSpec& spec) {
  check_size(spec.N);
  const int N = spec.N;
  const uint64_t dim = uint64_t{1} << N;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(dim * static_cast<uint64_t>(N));
  for (uint64_t s = 0; s < dim; ++s) {
    double diag = 0.0;
    if (spec.kind == Kind::Folded) {
      for (int l = 0; l + 2 < N; ++l) {
        if (up(s, l + 1)) continue;
        if (up(s, l) != up(s, l + 2))
          trip.emplace_back(static_cast<int>(s ^ ((uint64_t{1} << l) | (uint64_t{1} << (l + 2)))),
                            static_cast<int>(s), 2.0 * spec.J);
      }
    } else {
      for (int l = 0; l + 1 < N; ++l) {
        bool a = up(s, l), b = up(s, l + 1);
        diag += spec.J * spec.delta * (a == b ? 1.0 : -1.0);
        if (a != b)
          trip.emplace_back(static_cast<int>(s ^ ((uint64_t{1} << l) | (uint64_t{1} << (l + 1)))),
                            static_cast<int>(s), 2.0 * spec.J);
      }
    }
    if (diag != 0.0) trip.emplace_back(static_cast<int>(s), static_cast<int>(s), diag);
  }
  SpMat H(static_cast<int>(dim), static_cast<int>(dim));
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

inline uint64_t basis_index(const std::vector<int>& spins) {
  uint64_t s = 0;
  for (size_t k = 0; k < spins.size(); ++k)
    if (spins[k] == kUp) s |= uint64_t{1} << k;
  return s;
}

inline Vec product_state(const std::vector<int>& spins) {
  check_size(static_cast<int>(spins.size()));
  Vec v = Vec::Zero(static_cast<Eigen::Index>(uint64_t{1} << spins.size()));
  v(static_cast<Eigen::Index>(basis_index(spins))) = 1.0;
  return v;
}

// Gershgorin interval of a real symmetric matrix
inline std::pair<double, double> spectral_bounds(const SpMat& H) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (int k = 0; k < H.outerSize(); ++k) {
    double d = 0.0, r = 0.0;
    for (SpMat::InnerIterator it(H, k); it; ++it) {
      if (it.row() == k) d += it.value();
      else r += std::abs(it.value());
    }
    if (first || d - r < lo) lo = d - r;
    if (first || d + r > hi) hi = d + r;
    first = false;
  }
  return {lo, hi};
}

// exp(-i H t) v by a Chebyshev expansion; coefficients are Bessel values.
inline Vec evolve_chebyshev(const SpMat& H, const Vec& v, double t) {
  if (t == 0.0) return v;
  auto [lo, hi] = spectral_bounds(H);
  const double a = 0.5 * (hi - lo) + 1e-9, b = 0.5 * (hi + lo);
  // J_k(a t) = bessel_weights(a t / 4)(k)
  BesselWeights bw = bessel_weights(a * t / 4.0);
  const SpMat Hs = (H - b * SpMat(Eigen::VectorXd::Ones(H.rows()).asDiagonal())) / a;
  Vec t0 = v, t1 = Hs * v;
  Vec out = bw(0) * t0 + 2.0 * cplx(0.0, -1.0) * bw(1) * t1;
  cplx ph = cplx(0.0, -1.0);
  for (long k = 2; k <= bw.N(); ++k) {
    Vec t2 = 2.0 * (Hs * t1) - t0;
    ph *= cplx(0.0, -1.0);
    out += 2.0 * ph * bw(k) * t2;
    t0.swap(t1);
    t1.swap(t2);
  }
  return std::exp(cplx(0.0, -b * t)) * out;
}

// Reference path: dense eigendecomposition.
struct DenseEvolver {
  Eigen::MatrixXd V;
  Eigen::VectorXd E;

  explicit DenseEvolver(const SpMat& H) {
    if (H.rows() > (1 << 13)) throw Error(Errc::TooLarge, "dense eigendecomposition limited to 13 sites");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(H)};
    V = es.eigenvectors();
    E = es.eigenvalues();
  }
  Vec evolve(const Vec& v, double t) const {
    Vec c = V.transpose().cast<cplx>() * v;
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(cplx(0.0, -E(k) * t));
    return V.cast<cplx>() * c;
  }
};

enum class Method { Auto, Dense, Chebyshev };

inline Vec evolve(const Vec& v, const SpMat& H, double t, Method m = Method::Auto) {
  if (m == Method::Dense || (m == Method::Auto && H.rows() <= (1 << 11))) return DenseEvolver(H).evolve(v, t);
  return evolve_chebyshev(H, v, t);
}

inline int chain_length(const Vec& v) {
  int N = 0;
  while ((Eigen::Index{1} << N) < v.size()) ++N;
  return N;
}

// <psi| P |psi> with P's sites in chain coordinates
inline cplx measure(const Vec& psi, const PauliString& P) {
  const int N = chain_length(psi);
  uint64_t flip = 0;
  for (const auto& f : P.factors) {
    if (f.site < 0 || f.site >= N) throw Error(Errc::SupportOutsideChain, "site " + std::to_string(f.site));
    if (f.axis != 'z') flip |= uint64_t{1} << f.site;
  }
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (psi(i) == 0.0) continue;
    const uint64_t b = static_cast<uint64_t>(i);
    cplx amp = P.coeff;
    for (const auto& f : P.factors) {
      bool u = up(b, static_cast<int>(f.site));
      if (f.axis == 'z') amp *= u ? 1.0 : -1.0;
      else if (f.axis == 'y') amp *= u ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
    }
    s += std::conj(psi(static_cast<Eigen::Index>(b ^ flip))) * amp * psi(i);
  }
  return s;
}

inline cplx measure(const Vec& psi, const PauliSum& A) {
  cplx s = 0.0;
  for (const auto& P : A) s += measure(psi, P);
  return s;
}

// Diagonal observable over chain sites [lo, hi]; the window passed to the
// evaluator uses chain coordinates.
inline double measure(const Vec& psi, const DiagonalObservable& D) {
  const int N = chain_length(psi);
  if (D.lo < 0 || D.hi >= N) throw Error(Errc::SupportOutsideChain, "diagonal observable outside chain");
  double s = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    double w = std::norm(psi(i));
    if (w == 0.0) continue;
    SpinWindow win;
    win.first_site = D.lo;
    for (long l = D.lo; l <= D.hi; ++l) win.spins.push_back(up(static_cast<uint64_t>(i), static_cast<int>(l)) ? kUp : kDown);
    s += w * D.eval(win);
  }
  return s;
}

inline std::vector<double> sz_profile(const Vec& psi) {
  const int N = chain_length(psi);
  std::vector<double> out(static_cast<size_t>(N), 0.0);
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    double w = std::norm(psi(i));
    if (w == 0.0) continue;
    for (int k = 0; k < N; ++k) out[static_cast<size_t>(k)] += up(static_cast<uint64_t>(i), k) ? w : -w;
  }
  return out;
}

// Reduced density matrix on `kept`. Local index 0 is up; the first kept site
// is the most significant digit.
inline Mat partial_trace(const Vec& psi, const std::vector<int>& kept) {
  const int N = chain_length(psi);
  const int k = static_cast<int>(kept.size());
  uint64_t kmask = 0;
  for (int s : kept) {
    if (s < 0 || s >= N) throw Error(Errc::SupportOutsideChain, "kept site " + std::to_string(s));
    kmask |= uint64_t{1} << s;
  }
  auto local = [&](uint64_t b) {
    uint64_t r = 0;
    for (int q = 0; q < k; ++q) r = (r << 1) | (up(b, kept[static_cast<size_t>(q)]) ? 0u : 1u);
    return r;
  };
  // group amplitudes by the configuration of the traced-out sites
  std::unordered_map<uint64_t, std::vector<std::pair<uint64_t, cplx>>> env;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (psi(i) == 0.0) continue;
    uint64_t b = static_cast<uint64_t>(i);
    env[b & ~kmask].emplace_back(local(b), psi(i));
  }
  Mat rho = Mat::Zero(Eigen::Index{1} << k, Eigen::Index{1} << k);
  for (const auto& [e, list] : env)
    for (const auto& [r, ar] : list)
      for (const auto& [c, ac] : list) rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) += ar * std::conj(ac);
  return rho;
}

inline double von_neumann_bits(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  double s = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    double p = es.eigenvalues()(k);
    if (p > 1e-300) s -= p * std::log2(p);
  }
  return s;
}

// Entropy of the left block [0, cut] via the Schmidt values of psi.
inline double bipartite_entropy_bits(const Vec& psi, int cut) {
  const int N = chain_length(psi);
  const int nl = cut + 1;
  Mat M = Mat::Zero(Eigen::Index{1} << nl, Eigen::Index{1} << (N - nl));
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    uint64_t b = static_cast<uint64_t>(i);
    M(static_cast<Eigen::Index>(b & ((uint64_t{1} << nl) - 1)), static_cast<Eigen::Index>(b >> nl)) = psi(i);
  }
  Eigen::JacobiSVD<Mat> svd(M);
  double s = 0.0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    double p = svd.singularValues()(k) * svd.singularValues()(k);
    if (p > 1e-300) s -= p * std::log2(p);
  }
  return s;
}

// Reachable-sector ED for long folded chains: BFS over configurations from
// the initial one, dense eigendecomposition on the sector.
struct SectorEvolution {
  std::vector<std::string> configs;  // 'u'/'d' strings
  Vec psi;
};

inline SectorEvolution sector_evolve(const std::string& initial, double t, double J = 1.0, size_t max_dim = 4000) {
  std::vector<std::string> configs{initial};
  std::map<std::string, int> index{{initial, 0}};
  std::vector<Eigen::Triplet<double>> trip;
  for (size_t q = 0; q < configs.size(); ++q) {
    const std::string s = configs[q];
    for (size_t l = 0; l + 2 < s.size(); ++l) {
      if (s[l + 1] != 'd' || s[l] == s[l + 2]) continue;
      std::string r = s;
      std::swap(r[l], r[l + 2]);
      auto it = index.find(r);
      int id;
      if (it == index.end()) {
        id = static_cast<int>(configs.size());
        if (configs.size() >= max_dim) throw Error(Errc::TooLarge, "sector larger than " + std::to_string(max_dim));
        index.emplace(r, id);
        configs.push_back(r);
      } else {
        id = it->second;
      }
      trip.emplace_back(id, static_cast<int>(q), 2.0 * J);
    }
  }
  const int D = static_cast<int>(configs.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(D, D);
  for (const auto& tr : trip) H(tr.row(), tr.col()) = tr.value();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  Vec c = es.eigenvectors().row(0).transpose().cast<cplx>();
  for (int k = 0; k < D; ++k) c(k) *= std::exp(cplx(0.0, -es.eigenvalues()(k) * t));
  SectorEvolution out;
  out.configs = std::move(configs);
  out.psi = es.eigenvectors().cast<cplx>() * c;
  return out;
}

inline std::vector<double> sz_profile(const SectorEvolution& se) {
  std::vector<double> out(se.configs.front().size(), 0.0);
  for (size_t q = 0; q < se.configs.size(); ++q) {
    double w = std::norm(se.psi(static_cast<Eigen::Index>(q)));
    for (size_t k = 0; k < out.size(); ++k) out[k] += se.configs[q][k] == 'u' ? w : -w;
  }
  return out;
}

// tau_0 = up, tau_{k+1} = tau_k s_k, so that s_k = tau_k tau_{k+1}
inline std::vector<int> dual_string(const std::vector<int>& s) {
  std::vector<int> tau{kUp};
  for (int v : s) tau.push_back(tau.back() * v);
  return tau;
}

struct DualityReport {
  double delta = 0.0, t = 0.0;
  int N = 0;                      // XXZ sites; the folded chain has N - 1
  std::vector<double> folded;     // <sz_k>, k = 0..N-2
  std::vector<double> xxz;        // <sz_k sz_{k+1}>
  std::vector<double> deviation;  // folded - xxz
  int interior_lo = 0, interior_hi = 0;
  double max_interior = 0.0;
};

// Folded chain of N-1 sites starting in `folded_spins`, XXZ chain of N sites in
// the dual state. Interior sites are those at least `margin` from either end.
inline DualityReport duality_compare(const std::vector<int>& folded_spins, double delta, double t, int margin = 2) {
  const int Nf = static_cast<int>(folded_spins.size());
  const int N = Nf + 1;
  check_size(N);
  DualityReport r;
  r.delta = delta;
  r.t = t;
  r.N = N;
  Vec f0 = product_state(folded_spins);
  Vec ft = evolve(f0, build_hamiltonian({Kind::Folded, Nf, 1.0, 0.0}), t, Method::Chebyshev);
  r.folded = sz_profile(ft);
  Vec x0 = product_state(dual_string(folded_spins));
  Vec xt = evolve(x0, build_hamiltonian({Kind::Xxz, N, 1.0, delta}), t, Method::Chebyshev);
  for (int k = 0; k < Nf; ++k) r.xxz.push_back(measure(xt, pauli({{k, 'z'}, {k + 1, 'z'}})).real());
  r.interior_lo = margin;
  r.interior_hi = Nf - 1 - margin;
  for (int k = 0; k < Nf; ++k) {
    r.deviation.push_back(r.folded[static_cast<size_t>(k)] - r.xxz[static_cast<size_t>(k)]);
    if (k >= r.interior_lo && k <= r.interior_hi)
      r.max_interior = std::max(r.max_interior, std::abs(r.deviation.back()));
  }
  return r;
}

// The light cone leaves the chain when more than `limit` of the impurity weight
// sits beyond the particles available on either side.
inline void require_light_cone(long particles_left, long particles_right, double t, double limit = 0.01) {
  BesselWeights bw = bessel_weights(t);
  double out = 0.0;
  for (long n = -bw.N(); n <= bw.N(); ++n)
    if (n < -particles_left || n > particles_right) out += bw(n) * bw(n);
  if (out > limit) throw Error(Errc::LightConeEscape, "impurity weight " + std::to_string(out) + " outside the chain");
}

}  // namespace jam::oracle
