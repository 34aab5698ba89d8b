#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jamming/error.hpp"

namespace jam {

constexpr int kUp = 1;
constexpr int kDown = -1;

inline long ceil_half(long l) { return l >= 0 ? (l + 1) / 2 : -((-l) / 2); }
inline long floor_half(long l) { return l >= 0 ? l / 2 : -((-l + 1) / 2); }
// species of an up spin sitting at site l
inline int species_of_site(long l) { return static_cast<int>(2 * ceil_half(l) - l); }

struct SpinWindow {
  long first_site = 0;
  std::vector<int> spins;

  long last_site() const { return first_site + static_cast<long>(spins.size()) - 1; }
  bool contains(long l) const { return l >= first_site && l <= last_site(); }
  int at(long l) const {
    if (!contains(l)) throw Error(Errc::IndexOutOfRange, "site " + std::to_string(l) + " not in window");
    return spins[static_cast<size_t>(l - first_site)];
  }
  std::string str() const {
    std::string s;
    s.reserve(spins.size());
    for (int v : spins) s.push_back(v > 0 ? 'u' : 'd');
    return s;
  }
  static SpinWindow from_string(const std::string& s, long first_site = 0) {
    SpinWindow w;
    w.first_site = first_site;
    for (char ch : s) {
      if (ch == 'u' || ch == 'U') w.spins.push_back(kUp);
      else if (ch == 'd' || ch == 'D') w.spins.push_back(kDown);
      else throw Error(Errc::ConfigInvalid, std::string("bad spin character '") + ch + "'");
    }
    return w;
  }
};

// LeftPair: b_{-1} = b_0 = 0, flipped site becomes 0.
// RightPair: b_1 = b_0 = 1, flipped site becomes -1.
enum class Convention { LeftPair, RightPair };

inline const char* convention_name(Convention c) {
  return c == Convention::LeftPair ? "b(-1)=b(0)=0" : "b(1)=b(0)=1";
}

// Truncated: a window cut out of an infinite chain, spins are only known
// where no unlisted particle can reach. Closed: a finite open chain, every
// site outside the particle list is down.
enum class Boundary { Truncated, Closed };

struct FlipSpec {
  long site = 0;
  // used only when both neighbours of the flipped spin are down
  std::optional<Convention> prefer;
};

class Background {
 public:
  static constexpr long kNone = std::numeric_limits<long>::min();

  Background() = default;

  Background(long jmin, std::vector<int> species, Convention conv,
             Boundary boundary = Boundary::Truncated)
      : jmin_(jmin), b_(std::move(species)), conv_(conv), boundary_(boundary) {
    jmax_ = jmin_ + static_cast<long>(b_.size()) - 1;
    if (jmin_ > 0 || jmax_ < 1)
      throw Error(Errc::IndexOutOfRange, "background must contain particles 0 and 1");
    for (int v : b_)
      if (v != 0 && v != 1) throw Error(Errc::ConfigInvalid, "species must be 0 or 1");
    if (conv_ == Convention::LeftPair && b(0) != 0)
      throw Error(Errc::NotJammed, "convention b(-1)=b(0)=0 needs b(0)=0");
    if (conv_ == Convention::RightPair && b(1) != 1)
      throw Error(Errc::NotJammed, "convention b(1)=b(0)=1 needs b(1)=1");
    build();
  }

  template <class F>
  static Background from_generator(F&& gen, long jmin, long jmax, Convention conv) {
    std::vector<int> s;
    s.reserve(static_cast<size_t>(jmax - jmin + 1));
    for (long j = jmin; j <= jmax; ++j) s.push_back(gen(j));
    return Background(jmin, std::move(s), conv);
  }

  long jmin() const { return jmin_; }
  long jmax() const { return jmax_; }
  Convention convention() const { return conv_; }
  Boundary boundary() const { return boundary_; }
  bool closed() const { return boundary_ == Boundary::Closed; }
  // new_site = old_site + window_shift() for backgrounds built from spin windows
  long window_shift() const { return shift_; }

  bool has(long j) const { return j >= jmin_ && j <= jmax_; }
  void require(long j) const {
    if (!has(j))
      throw Error(Errc::IndexOutOfRange, "particle " + std::to_string(j) + " outside [" +
                                             std::to_string(jmin_) + "," + std::to_string(jmax_) + "]");
  }
  int b(long j) const { require(j); return b_[static_cast<size_t>(j - jmin_)]; }
  // state-independent part of the macrosite
  long c(long j) const { require(j); return c_[static_cast<size_t>(j - jmin_)]; }
  // site of particle j when the impurity is to its right (j <= n)
  long p0(long j) const { require(j); return p0_[static_cast<size_t>(j - jmin_)]; }
  // 1 - b_j (1 - b_{j+1}); needs j+1 in range
  int xi(long j) const {
    require(j);
    require(j + 1);
    return 1 - b_[static_cast<size_t>(j - jmin_)] * (1 - b_[static_cast<size_t>(j + 1 - jmin_)]);
  }

  long site_lo() const { return site_lo_; }
  long site_hi() const { return site_hi_; }
  bool site_ok(long l) const { return l >= site_lo_ && l <= site_hi_; }
  void require_sites(long lo, long hi) const {
    if (lo < site_lo_ || hi > site_hi_)
      throw Error(Errc::WindowOutsideGuard, "sites [" + std::to_string(lo) + "," + std::to_string(hi) +
                                                "] outside [" + std::to_string(site_lo_) + "," +
                                                std::to_string(site_hi_) + "]");
  }

  // particle j with p0(j) == l, or kNone
  long particle_at_base(long l) const {
    long k = l - base_lo_;
    if (k < 0 || k >= static_cast<long>(site2j_.size())) return kNone;
    return site2j_[static_cast<size_t>(k)];
  }

  // spin at site l in |n; b>
  int spin(long n, long l) const {
    if (!site_ok(l))
      throw Error(Errc::WindowOutsideGuard, "site " + std::to_string(l) + " outside guard");
    return spin_unchecked(n, l);
  }
  int spin_unchecked(long n, long l) const {
    long ja = particle_at_base(l);
    if (ja != kNone && ja <= n) return kUp;
    long jb = particle_at_base(l - 2);
    if (jb != kNone && jb > n) return kUp;
    return kDown;
  }
  // site of particle j in |n; b>
  long position(long j, long n) const { return p0(j) + (j > n ? 2 : 0); }

  // impurity states whose rendering is meaningful on this background
  long n_lo() const { return closed() ? jmin_ - 1 : std::numeric_limits<long>::min() / 4; }
  long n_hi() const { return closed() ? jmax_ : std::numeric_limits<long>::max() / 4; }

  // light-cone guard: particle range must cover [-N-4, N+4]
  bool covers_cutoff(long N) const { return closed() || (jmin_ <= -N - 4 && jmax_ >= N + 4); }
  void require_cutoff(long N) const {
    if (!covers_cutoff(N))
      throw Error(Errc::WindowOutsideGuard, "particle range [" + std::to_string(jmin_) + "," +
                                                std::to_string(jmax_) + "] does not cover cutoff " +
                                                std::to_string(N) + " plus margin 4");
  }

  // cumulative coarse distance, Xi(0) = 0, Xi(k) - Xi(k-1) = xi(k) for k >= 1,
  // Xi(-k) = -(xi(-1) + ... + xi(-k))
  double Xi(long k) const {
    long idx = k - xi_lo_;
    if (idx < 0 || idx >= static_cast<long>(xi_cum_.size()))
      throw Error(Errc::IndexOutOfRange, "cumulative xi index " + std::to_string(k));
    return static_cast<double>(xi_cum_[static_cast<size_t>(idx)]);
  }
  long xi_lo() const { return xi_lo_; }
  long xi_hi() const { return xi_lo_ + static_cast<long>(xi_cum_.size()) - 1; }

  std::string species_string() const {
    std::string s;
    for (long j = jmin_; j <= jmax_; ++j) {
      if (j == 1) s.push_back('.');
      s.push_back(static_cast<char>('0' + b(j)));
    }
    return s;
  }

  void set_chain(long lo, long hi, long shift) {
    shift_ = shift;
    if (closed()) {
      site_lo_ = lo;
      site_hi_ = hi;
    }
  }

 private:
  void build() {
    const size_t sz = b_.size();
    c_.assign(sz, 0);
    p0_.assign(sz, 0);
    auto idx = [&](long j) { return static_cast<size_t>(j - jmin_); };
    c_[idx(0)] = -1;
    c_[idx(1)] = 0;
    for (long j = 1; j < jmax_; ++j) c_[idx(j + 1)] = c_[idx(j)] + 1 - b_[idx(j)] * (1 - b_[idx(j + 1)]);
    for (long j = 0; j > jmin_; --j) c_[idx(j - 1)] = c_[idx(j)] - (1 - b_[idx(j - 1)] * (1 - b_[idx(j)]));
    for (long j = jmin_; j <= jmax_; ++j) p0_[idx(j)] = 2 * c_[idx(j)] - b_[idx(j)];
    for (long j = jmin_; j < jmax_; ++j)
      if (p0_[idx(j + 1)] <= p0_[idx(j)]) throw Error(Errc::NotJammed, "particle positions not increasing");
    base_lo_ = p0_.front();
    site2j_.assign(static_cast<size_t>(p0_.back() - base_lo_ + 1), kNone);
    for (long j = jmin_; j <= jmax_; ++j) site2j_[static_cast<size_t>(p0_[idx(j)] - base_lo_)] = j;
    if (closed()) {
      site_lo_ = p0_.front();
      site_hi_ = p0_.back() + 2;
    } else {
      site_lo_ = p0_.front() + 2;
      site_hi_ = p0_.back();
    }
    xi_lo_ = jmin_;
    long hi = jmax_ - 1;
    xi_cum_.assign(static_cast<size_t>(hi - xi_lo_ + 1), 0);
    auto xidx = [&](long k) { return static_cast<size_t>(k - xi_lo_); };
    for (long k = 1; k <= hi; ++k) xi_cum_[xidx(k)] = xi_cum_[xidx(k - 1)] + (1 - b_[idx(k)] * (1 - b_[idx(k + 1)]));
    for (long k = -1; k >= xi_lo_; --k) xi_cum_[xidx(k)] = xi_cum_[xidx(k + 1)] - (1 - b_[idx(k)] * (1 - b_[idx(k + 1)]));
  }

  long jmin_ = 0, jmax_ = -1;
  std::vector<int> b_;
  Convention conv_ = Convention::RightPair;
  Boundary boundary_ = Boundary::Truncated;
  std::vector<long> c_, p0_;
  long base_lo_ = 0;
  std::vector<long> site2j_;
  long site_lo_ = 0, site_hi_ = -1;
  long shift_ = 0;
  long xi_lo_ = 0;
  std::vector<long> xi_cum_;
};

struct ImpurityBasisState {
  long n = 0;
  const Background* background = nullptr;
};

struct ParticleTracker {
  long j = 0;
  long c = 0;
};

inline ParticleTracker track(const Background& bg, long j) { return {j, bg.c(j)}; }

// Applies the flip to a jammed window and returns the post-flip background.
inline Background background_from_spins(const SpinWindow& window, const FlipSpec& flip,
                                        Boundary boundary = Boundary::Truncated) {
  const long s = flip.site;
  if (!window.contains(s)) throw Error(Errc::IndexOutOfRange, "flip site outside window");
  for (long l = window.first_site; l < window.last_site(); ++l)
    if (window.at(l) == kDown && window.at(l + 1) == kDown)
      throw Error(Errc::NotJammed, "adjacent down spins at sites " + std::to_string(l) + "," +
                                       std::to_string(l + 1));
  if (window.at(s) != kUp) throw Error(Errc::FlipIneffective, "flip site holds a down spin");
  bool left_down = window.contains(s - 1) && window.at(s - 1) == kDown;
  bool right_down = window.contains(s + 1) && window.at(s + 1) == kDown;
  if (!left_down && !right_down)
    throw Error(Errc::FlipIneffective, "flipped spin has no down neighbour, state stays jammed");
  Convention conv;
  if (left_down && right_down) conv = flip.prefer.value_or(Convention::RightPair);
  else conv = right_down ? Convention::RightPair : Convention::LeftPair;
  const long shift = (conv == Convention::RightPair ? -1 : 0) - s;

  std::vector<long> left, right;
  for (long l = window.first_site; l <= window.last_site(); ++l) {
    if (l == s || window.at(l) != kUp) continue;
    (l < s ? left : right).push_back(l + shift);
  }
  if (left.empty() || right.empty())
    throw Error(Errc::IndexOutOfRange, "window needs particles on both sides of the flip");
  const long jmin = 1 - static_cast<long>(left.size());
  std::vector<int> species;
  std::vector<long> sites;
  for (long l : left) { species.push_back(species_of_site(l)); sites.push_back(l); }
  for (long l : right) { species.push_back(species_of_site(l)); sites.push_back(l); }
  Background bg(jmin, std::move(species), conv, boundary);
  for (long j = bg.jmin(); j <= bg.jmax(); ++j)
    if (bg.position(j, 0) != sites[static_cast<size_t>(j - jmin)])
      throw Error(Errc::NotJammed, "recurrence mismatch at particle " + std::to_string(j));
  bg.set_chain(window.first_site + shift, window.last_site() + shift, shift);
  return bg;
}

inline long macrosite(long j, long n, const Background& bg) { return bg.c(j) + (j > n ? 1 : 0); }

inline SpinWindow render(const Background& bg, long n, long lo, long hi) {
  bg.require_sites(lo, hi);
  SpinWindow w;
  w.first_site = lo;
  w.spins.reserve(static_cast<size_t>(hi - lo + 1));
  for (long l = lo; l <= hi; ++l) w.spins.push_back(bg.spin_unchecked(n, l));
  return w;
}

inline SpinWindow render(const ImpurityBasisState& st, long lo, long hi) {
  return render(*st.background, st.n, lo, hi);
}

// sites strictly between particles n and n+1 in |n; b>, all down
inline std::pair<long, long> impurity_sites(const Background& bg, long n) {
  long a = bg.has(n) ? bg.position(n, n) : bg.position(n + 1, n) - 3;
  long b = bg.has(n + 1) ? bg.position(n + 1, n) : a + 3;
  return {a + 1, b - 1};
}

inline double coarse_xi(const Background& bg, long j, long radius) {
  if (radius < 1) throw Error(Errc::IndexOutOfRange, "radius must be >= 1");
  bg.require(j - radius);
  bg.require(j + radius + 1);
  long sum = 0;
  for (long m = j - radius; m <= j + radius; ++m) sum += bg.xi(m);
  return static_cast<double>(sum) / static_cast<double>(2 * radius + 1);
}

// Discrete inverse of Xi(x) = l/2 with linear interpolation; plateaus resolve
// to the smallest x.
inline double x_of_ell(const Background& bg, long ell) {
  if (ell == 0) return 0.0;
  const double target = 0.5 * static_cast<double>(ell);
  long k;
  if (ell > 0) {
    k = 1;
    while (bg.Xi(k) < target) ++k;
  } else {
    k = 0;
    while (bg.Xi(k - 1) >= target) --k;
  }
  // Xi(k-1) < target <= Xi(k)
  double lo = bg.Xi(k - 1), hi = bg.Xi(k);
  return static_cast<double>(k - 1) + (target - lo) / (hi - lo);
}

}  // namespace jam
