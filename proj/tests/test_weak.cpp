#include <gtest/gtest.h>

#include <random>

#include "common.hpp"
#include "jamming/weak.hpp"

using namespace jam;
using namespace jamtest;

namespace {

// lambda spectrum straight from the non-normal product rho (yy) rho* (yy)
double concurrence_direct(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix4cd yy = detail::kron(detail::pauli_matrix(2), detail::pauli_matrix(2));
  Eigen::Matrix4cd R = rho * yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(R);
  std::vector<double> lam;
  for (int k = 0; k < 4; ++k) lam.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(k).real())));
  std::sort(lam.rbegin(), lam.rend());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

Eigen::Matrix4cd random_rho(std::mt19937& rng, int rank) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd A(4, rank);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < rank; ++k) A(i, k) = cplx(g(rng), g(rng));
  Eigen::Matrix4cd rho = A * A.adjoint();
  return rho / rho.trace();
}

const std::vector<std::pair<long, long>> kConfigs = {{5, 1}, {5, 3}, {9, 10}};

}  // namespace

TEST(Weak, ConfigValidation) {
  EXPECT_THROW(WeakProtocol({0, 3, 1.0}), Error);
  EXPECT_THROW(WeakProtocol({5, 0, 1.0}), Error);
  EXPECT_THROW(WeakProtocol({5, 1, -1.0}), Error);
}

TEST(Weak, FourClassesPartitionLabels) {
  for (auto [mp, M] : kConfigs) {
    WeakConfig cfg{mp, M, 1.0};
    Background bg = weak_background(mp, M, 60);
    std::array<int, 4> count{};
    for (long n = -40; n <= 60; ++n) {
      WeakLabel lab = classify_label(n, cfg);
      ++count[static_cast<size_t>(lab.kind)];
      // macrosite pair pattern of |n>, read as 2k-1, 2k
      auto pair = [&](long k) { return std::string{render(bg, n, 2 * k - 1, 2 * k).str()}; };
      long dd = 0;
      for (long k = -45; k <= 70; ++k)
        if (pair(k) == "dd") dd = k;
      switch (lab.kind) {
        case WeakClass::Left:
          EXPECT_EQ(dd, n);
          for (long k = mp; k < mp + M; ++k) EXPECT_EQ(pair(k), "uu");
          break;
        case WeakClass::DomainEven:
          EXPECT_GE(lab.index, 0);
          EXPECT_LE(lab.index, M - 1);
          EXPECT_EQ(pair(mp + lab.index - 1), "ud");
          EXPECT_EQ(pair(mp + lab.index), "du");
          for (long k = mp - 1; k <= mp + M - 1; ++k)
            if (k != mp + lab.index - 1 && k != mp + lab.index) EXPECT_EQ(pair(k), "uu") << n << " " << k;
          break;
        case WeakClass::DomainOdd:
          EXPECT_GE(lab.index, 0);
          EXPECT_LE(lab.index, M - 2);
          EXPECT_EQ(pair(mp + lab.index), "dd");
          for (long k = mp - 1; k <= mp + M - 1; ++k)
            if (k != mp + lab.index) EXPECT_EQ(pair(k), "uu");
          break;
        case WeakClass::Right:
          EXPECT_EQ(dd, n - M);
          for (long k = mp - 1; k <= mp + M - 2; ++k) EXPECT_EQ(pair(k), "uu");
          break;
      }
    }
    EXPECT_EQ(count[0] + count[1] + count[2] + count[3], 101);
    EXPECT_EQ(count[1], M);
    EXPECT_EQ(count[2], M - 1);
  }
}

TEST(Weak, MagnetisationMatchesEngine) {
  for (auto [mp, M] : kConfigs)
    for (double t : {0.7, 3.1, 12.0}) {
      WeakConfig cfg{mp, M, t};
      WeakProtocol wp(cfg);
      const long lo = -40, hi = 2 * (mp + M) + 40;
      Background bg = weak_engine_background(cfg, lo, hi);
      Evolution ev = evolve_line(t);
      for (long l = lo; l <= hi; ++l) EXPECT_NEAR(wp.magnetisation(l), sigma_z_fast(l, ev, bg), 1e-10) << mp << "," << M << " t=" << t << " l=" << l;
    }
}

TEST(Weak, MagnetisationAtZeroTimeIsLiteralString) {
  WeakConfig cfg{9, 10, 0.0};
  WeakProtocol wp(cfg);
  Background bg = weak_background(9, 10, 20);
  for (long l = -20; l <= 50; ++l) EXPECT_EQ(wp.magnetisation(l), static_cast<double>(bg.spin(0, l))) << l;
  // odd site away from the domain edges
  EXPECT_EQ(WeakProtocol({9, 10, 4.0}).magnetisation(-7), -1.0);
}

TEST(Weak, CatalogMatchesEngine) {
  const char axes[] = {'x', 'y', 'z'};
  for (auto [mp, M] : {std::pair<long, long>{5, 3}, std::pair<long, long>{5, 1}})
    for (double t : {0.7, 3.1}) {
      WeakConfig cfg{mp, M, t};
      WeakProtocol wp(cfg);
      const long lo = -8, hi = 2 * (mp + M) + 8;
      Background bg = weak_engine_background(cfg, lo, hi);
      Evolution ev = evolve_line(t);
      for (long i = lo; i <= hi; ++i)
        for (long j = i + 1; j <= hi; ++j)
          for (char a : axes)
            for (char b : axes) {
              double e = expect_pauli_string(pauli({{i, a}, {j, b}}), ev, bg).real();
              EXPECT_NEAR(wp.two_point(a, b, i, j), e, 1e-10) << mp << "," << M << " t=" << t << " " << a << i << " " << b << j;
              EXPECT_EQ(wp.two_point(a, b, i, j), wp.two_point(b, a, j, i));
            }
    }
}

TEST(Weak, CoincidentSitesAreNotACatalogPair) {
  WeakProtocol wp({5, 3, 1.0});
  try {
    wp.two_point('x', 'x', 4, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::PairNotInCatalog);
  }
}

TEST(Weak, TransverseCorrelatorsVanishAcrossParity) {
  WeakProtocol wp({5, 3, 2.0});
  for (long i = -6; i <= 20; ++i)
    for (long j = i + 1; j <= 20; j += 2) {
      EXPECT_EQ(wp.two_point('x', 'y', i, j), 0.0);
      EXPECT_EQ(wp.two_point('x', 'z', i, j), 0.0);
    }
}

TEST(Weak, SpecialTrajectories) {
  // 4t = 2m' gives -(2/pi) arcsin(1/2) = -1/3
  auto [a, b] = special_trajectories({9, 10, 4.5});
  EXPECT_NEAR(a, -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(b, arcsin_ray(27.0, 4.5), 1e-15);
  auto [c, d] = special_trajectories({9, 10, 1e9});
  EXPECT_LT(std::abs(c), 1e-8);
  EXPECT_LT(std::abs(d), 1e-8);
  // the exact values drift towards them
  for (double t : {20.0, 60.0}) {
    WeakProtocol wp({9, 10, t});
    auto [s1, s2] = special_trajectories({9, 10, t});
    EXPECT_NEAR(wp.magnetisation(2 * 9 - 3), s1, 0.1) << t;
    EXPECT_NEAR(wp.magnetisation(2 * 9 + 2 * 10 - 3), s2, 0.1) << t;
  }
}

TEST(Weak, RhoAtZeroTimeIsProductState) {
  WeakConfig cfg{5, 3, 0.0};
  Background bg = weak_background(5, 3, 20);
  for (long i = -4; i <= 14; ++i)
    for (long j = i + 1; j <= 16; ++j) {
      TwoSpinDensityMatrix r = assemble_rho(i, j, cfg);
      int k = (bg.spin(0, i) == kUp ? 0 : 2) + (bg.spin(0, j) == kUp ? 0 : 1);
      Eigen::Matrix4cd expect = Eigen::Matrix4cd::Zero();
      expect(k, k) = 1.0;
      EXPECT_LT((r.rho - expect).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Weak, RhoIsADensityMatrix) {
  for (double t : {0.5, 2.0, 9.0, 40.0}) {
    WeakProtocol wp({9, 10, t});
    for (long i = -10; i <= 40; i += 3)
      for (long j = i + 1; j <= 44; j += 2) {
        TwoSpinDensityMatrix r = assemble_rho(i, j, wp);
        EXPECT_NO_THROW(check_density_matrix(r.rho)) << i << " " << j << " t=" << t;
        EXPECT_NEAR(std::abs(r.rho.trace() - cplx(1.0)), 0.0, 1e-12);
      }
  }
}

TEST(Weak, EngineRhoMatchesPartialTraceOnClosedChain) {
  // sites -5..8, m' = 2, M = 2, flipped at site 0
  std::string pre;
  for (long l = -5; l <= 8; ++l) pre.push_back(weak_rule(2, 2)(l) == kUp ? 'u' : 'd');
  Chain c = make_chain(pre, 5, Convention::LeftPair);
  for (double t : {0.5, 1.5}) {
    Evolution ev = evolve_open(c.bg, t);
    oracle::Vec psi = evolve_chain(c, t);
    for (int a = 0; a < c.size(); ++a)
      for (int b = a + 1; b < c.size(); ++b) {
        Eigen::MatrixXcd ed = oracle::partial_trace(psi, {a, b});
        TwoSpinDensityMatrix r = engine_rho(c.site(a), c.site(b), ev, c.bg);
        EXPECT_LT((r.rho - ed).cwiseAbs().maxCoeff(), 1e-10) << a << " " << b << " t=" << t;
      }
  }
}

TEST(Weak, CatalogRhoMatchesEngineRho) {
  WeakConfig cfg{5, 3, 3.1};
  WeakProtocol wp(cfg);
  Background bg = weak_engine_background(cfg, -10, 30);
  Evolution ev = evolve_line(cfg.t);
  for (long i = -6; i <= 20; i += 1)
    for (long j = i + 1; j <= 22; j += 3)
      EXPECT_LT((assemble_rho(i, j, wp).rho - engine_rho(i, j, ev, bg).rho).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Weak, ConcurrenceReferenceStates) {
  Eigen::Matrix4cd diag = Eigen::Matrix4cd::Zero();
  diag.diagonal() << 0.1, 0.4, 0.3, 0.2;
  EXPECT_NEAR(concurrence(diag), 0.0, 1e-15);
  Eigen::Vector4cd bell(0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0);
  EXPECT_NEAR(concurrence(bell * bell.adjoint()), 1.0, 1e-12);
  Eigen::Vector2cd u(0.6, cplx(0.0, 0.8)), v(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0));
  Eigen::Vector4cd prod;
  prod << u(0) * v(0), u(0) * v(1), u(1) * v(0), u(1) * v(1);
  EXPECT_NEAR(concurrence(prod * prod.adjoint()), 0.0, 1e-7);
  // Werner state: C = max(0, (3p - 1)/2)
  for (double p : {0.2, 0.5, 0.8}) {
    Eigen::Matrix4cd w = p * bell * bell.adjoint() + (1.0 - p) / 4.0 * Eigen::Matrix4cd::Identity();
    EXPECT_NEAR(concurrence(w), std::max(0.0, (3.0 * p - 1.0) / 2.0), 1e-12);
  }
  Eigen::Matrix4cd bad = diag;
  bad(0, 0) = 2.0;
  EXPECT_THROW(concurrence(bad), Error);
}

TEST(Weak, ConcurrenceMatchesDirectSpectrum) {
  std::mt19937 rng(11);
  for (int k = 0; k < 200; ++k) {
    Eigen::Matrix4cd rho = random_rho(rng, 1 + k % 4);
    EXPECT_NEAR(concurrence(rho), concurrence_direct(rho), 1e-6) << k;
  }
}

TEST(Weak, EntanglementOfFormation) {
  EXPECT_NEAR(eof_from_concurrence(1.0), 1.0, 1e-15);
  EXPECT_EQ(eof_from_concurrence(0.0), 0.0);
  double prev = -1.0;
  for (double c = 0.0; c <= 1.0; c += 0.01) {
    double e = eof_from_concurrence(c);
    EXPECT_GE(e, prev);
    EXPECT_LE(e, 1.0);
    prev = e;
  }
}

TEST(Weak, EntanglementMapProperties) {
  EntanglementMap z = entanglement_map({9, 10, 0.0}, -10, 45);
  EXPECT_EQ(z.values.cwiseAbs().maxCoeff(), 0.0);
  EntanglementMap m = entanglement_map({9, 10, 3.0}, -10, 45);
  EXPECT_LT((m.values - m.values.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_GE(m.values.minCoeff(), 0.0);
  EXPECT_LE(m.values.maxCoeff(), 1.0);
  EXPECT_GT(m.values.maxCoeff(), 1e-3);
  // left of the domain the map does not see it
  EntanglementMap neel = entanglement_map({60, 1, 3.0}, -10, 45);
  for (long i = -10; i <= 2 * 9 - 4; ++i)
    for (long j = i + 1; j <= 2 * 9 - 4; ++j) EXPECT_NEAR(m.at(i, j), neel.at(i, j), 1e-12) << i << " " << j;
}

TEST(Weak, LightConeOfEntanglementGrows) {
  auto reach = [](double t) {
    EntanglementMap m = entanglement_map({40, 1, t}, -80, 0);
    long far = 0;
    for (long i = -80; i < 0; ++i)
      for (long j = i + 1; j <= 0; ++j)
        if (m.at(i, j) > 1e-6) far = std::max(far, -i);
    return far;
  };
  long r2 = reach(2.0), r4 = reach(4.0), r8 = reach(8.0);
  EXPECT_GT(r4, r2);
  EXPECT_GT(r8, r4);
  EXPECT_LT(r8, 2 * (4 * 8 + 20));
}

TEST(Weak, ClassicalPairLimit) {
  WeakProtocol wp({9, 10, 200.0});
  const long i = 2 * 9 - 3, j = 2 * 9 + 2 * 10 - 3;
  EXPECT_LT(wp.two_point('z', 'z', i, j), -0.95);
  Eigen::Matrix4cd target = Eigen::Matrix4cd::Zero();
  target(1, 1) = target(2, 2) = 0.5;
  EXPECT_LT((assemble_rho(i, j, wp).rho - target).cwiseAbs().maxCoeff(), 0.05);
}
