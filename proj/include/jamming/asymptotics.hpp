#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "jamming/lattice.hpp"
#include "jamming/specfun.hpp"

namespace jam {

enum class Side { Left, Right };

// Three initial spins around a site; for the right side they are (l, l+1, l+2),
// for the left side (l-2, l-1, l).
struct PatternClass {
  Side side = Side::Right;
  std::array<int, 3> spins{};
};

inline PatternClass classify_site(long l, const Background& bg) {
  if (l == 0 || l == -1)
    throw Error(Errc::PatternUnclassifiable, "site " + std::to_string(l) + " sits in the initial impurity");
  PatternClass pc;
  pc.side = l > 0 ? Side::Right : Side::Left;
  long first = l > 0 ? l : l - 2;
  for (int k = 0; k < 3; ++k) pc.spins[static_cast<size_t>(k)] = bg.spin(0, first + k);
  return pc;
}

// Late-time <sz_l>: +-1 or +-(2/pi) arcsin(x(l)/4t), clamped outside the cone.
inline double asym_sigma_z(long l, double t, const Background& bg) {
  PatternClass pc = classify_site(l, bg);
  const auto& s = pc.spins;
  if (s[0] == kUp && s[2] == kUp) return 1.0;
  if (s[0] == kDown && s[1] == kUp && s[2] == kDown) return -1.0;
  const double A = arcsin_ray(x_of_ell(bg, l), t);
  if (s[0] == kUp && s[1] == kUp && s[2] == kDown) return A;
  if (s[0] == kDown && s[1] == kUp && s[2] == kUp) return -A;
  throw Error(Errc::PatternUnclassifiable, "pattern at site " + std::to_string(l) + " is not jammed");
}

enum class MacroCharge { Plus, Minus };  // magnetisation, staggered magnetisation

// Late-time macrosite densities (s_{2l'} +- s_{2l'-1})/2. The key is (macrosite,
// next) for l' >= 1 and (previous, macrosite) for l' <= -1, each pair read
// as (s_{2k-1}, s_{2k}) in |0; b>.
inline double asym_macrosite(long lp, double t, const Background& bg, MacroCharge which) {
  if (lp == 0) throw Error(Errc::PatternUnclassifiable, "macrosite 0 holds the initial impurity");
  const long first = lp > 0 ? lp : lp - 1;
  auto up = [&](long site) { return bg.spin(0, site) == kUp; };
  // a b | c d
  const bool a = up(2 * first - 1), b = up(2 * first), c = up(2 * first + 1), d = up(2 * first + 2);
  const double x = x_of_ell(bg, 2 * lp);
  const double acp = arccos_ray(x, t), acm = arccos_ray(-x, t);
  const bool plus = which == MacroCharge::Plus;
  if (a && b && c && d) return plus ? 1.0 : 0.0;
  if (a && b && c && !d) return plus ? acm : -acp;
  if (a && b && !c && d) return plus ? acm : acp;
  if (a && !b && c && d) return plus ? acp : -acm;
  if (!a && b && c && d) return plus ? acp : acm;
  if (a && !b && c && !d) return plus ? 0.0 : -1.0;
  if (!a && b && c && !d) return plus ? 0.0 : arcsin_ray(x, t);
  if (!a && b && !c && d) return plus ? 0.0 : 1.0;
  throw Error(Errc::PatternUnclassifiable, "macrosite pattern at " + std::to_string(lp) + " is not jammed");
}

// a / sqrt(1 - (zeta/v)^2)
inline double lqjs_envelope(double zeta, double a, double v) {
  if (!(std::abs(zeta) < std::abs(v))) throw Error(Errc::OutsideCone, "|zeta| must be below |v|");
  const double r = zeta / v;
  return a / std::sqrt(1.0 - r * r);
}

struct EnvelopeFit {
  double a = 0.0, v = 0.0, rms = 0.0;
  size_t points = 0;
};

struct EnvelopeFitOptions {
  double bin_width = 0.4;
  double zeta_max = 8.0;
  double v_lo = 4.0, v_hi = 8.0, v_step = 1e-3;
  double inside = 0.85;  // fit only |zeta| < inside * v
};

// Least-squares fit of the envelope to the per-bin maxima of (zeta, t*Pdd)
// samples. For each v on a grid, a is solved in closed form; the v with the
// smallest mean squared residual wins.
inline EnvelopeFit fit_envelope(const std::vector<std::pair<double, double>>& samples,
                                const EnvelopeFitOptions& opt = {}) {
  const long nbins = static_cast<long>(std::llround(2.0 * opt.zeta_max / opt.bin_width));
  std::vector<std::pair<double, double>> peaks(static_cast<size_t>(nbins), {0.0, -1.0});
  for (auto [z, y] : samples) {
    long k = static_cast<long>(std::floor((z + opt.zeta_max) / opt.bin_width));
    if (k < 0 || k >= nbins) continue;
    auto& p = peaks[static_cast<size_t>(k)];
    if (y > p.second) p = {z, y};
  }
  std::vector<std::pair<double, double>> pts;
  for (auto& p : peaks)
    if (p.second > 0.0) pts.push_back(p);

  EnvelopeFit best;
  best.rms = std::numeric_limits<double>::infinity();
  const long steps = static_cast<long>(std::llround((opt.v_hi - opt.v_lo) / opt.v_step));
  for (long s = 0; s < steps; ++s) {
    const double v = opt.v_lo + static_cast<double>(s) * opt.v_step;
    double gg = 0.0, gy = 0.0;
    size_t m = 0;
    for (auto [z, y] : pts) {
      if (std::abs(z) >= opt.inside * v) continue;
      double g = 1.0 / std::sqrt(1.0 - (z / v) * (z / v));
      gg += g * g;
      gy += g * y;
      ++m;
    }
    if (m == 0) continue;
    const double a = gy / gg;
    double r = 0.0;
    for (auto [z, y] : pts) {
      if (std::abs(z) >= opt.inside * v) continue;
      double e = y - a / std::sqrt(1.0 - (z / v) * (z / v));
      r += e * e;
    }
    r /= static_cast<double>(m);
    if (r < best.rms) best = {a, v, r, m};
  }
  best.rms = std::sqrt(best.rms);
  return best;
}

}  // namespace jam
