#pragma once

#include <cctype>
#include <functional>
#include <optional>
#include <string>

#include "jamming/lattice.hpp"

namespace jam {

// Builds a window over [lo, hi] from a site -> spin rule and flips `flip`.
inline Background background_from_rule(const std::function<int(long)>& rule, long lo, long hi,
                                       FlipSpec flip) {
  SpinWindow w;
  w.first_site = lo;
  for (long l = lo; l <= hi; ++l) w.spins.push_back(rule(l));
  return background_from_spins(w, flip);
}

inline long sites_for_particles(long half_width) { return 2 * half_width + 16; }

// ...uud uud uud... with the up spin at site -1 flipped (b1 = b0 = 1)
inline Background fig2a(long half_width) {
  long r = sites_for_particles(half_width);
  auto rule = [](long l) { return ((l % 3 + 3 + 2) % 3) == 2 ? kDown : kUp; };
  return background_from_rule(rule, -r, r, {-1, Convention::RightPair});
}

// Neel state, ups on odd sites, up at -1 flipped
inline Background fig2b(long half_width) {
  long r = sites_for_particles(half_width);
  auto rule = [](long l) { return (l % 2 != 0) ? kUp : kDown; };
  return background_from_rule(rule, -r, r, {-1, Convention::RightPair});
}

// fig2b with the down spin at site 10 flipped up before the protocol
inline Background fig2c(long half_width) {
  long r = sites_for_particles(half_width) + 12;
  auto rule = [](long l) { return (l % 2 != 0 || l == 10) ? kUp : kDown; };
  return background_from_rule(rule, -r, r, {-1, Convention::RightPair});
}

// Neel state (ups on even sites) with macrosites m'..m'+M-1 fully up, spin at
// site 0 flipped.
inline std::function<int(long)> weak_rule(long mp, long M) {
  return [mp, M](long l) {
    long lp = ceil_half(l);
    if (lp >= mp && lp <= mp + M - 1) return kUp;
    return (l % 2 == 0) ? kUp : kDown;
  };
}

inline Background weak_background(long mp, long M, long half_width) {
  if (mp <= 0) throw Error(Errc::ConfigInvalid, "weak protocol needs m' > 0");
  if (M < 1) throw Error(Errc::ConfigInvalid, "weak protocol needs M >= 1");
  long r = sites_for_particles(half_width);
  return background_from_rule(weak_rule(mp, M), -r, r + 2 * (mp + M), {0, Convention::LeftPair});
}

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  size_t b = s.find_last_not_of(" \t");
  return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

// "(cell)*core*(cell)" -> pieces; either side optional
struct Periodic {
  std::string left_cell, core, right_cell;
};

inline Periodic split_periodic(const std::string& body) {
  Periodic p;
  std::string s = body;
  if (!s.empty() && s.front() == '(') {
    size_t close = s.find(')');
    if (close == std::string::npos || close + 1 >= s.size() || s[close + 1] != '*')
      throw Error(Errc::ConfigInvalid, "expected '(cell)*' prefix in '" + body + "'");
    p.left_cell = s.substr(1, close - 1);
    s = s.substr(close + 2);
  }
  if (!s.empty() && s.back() == ')') {
    size_t open = s.rfind('(');
    if (open == std::string::npos || open == 0 || s[open - 1] != '*')
      throw Error(Errc::ConfigInvalid, "expected '*(cell)' suffix in '" + body + "'");
    p.right_cell = s.substr(open + 1, s.size() - open - 2);
    s = s.substr(0, open - 1);
  }
  p.core = s;
  if (p.core.empty()) throw Error(Errc::ConfigInvalid, "empty core in '" + body + "'");
  return p;
}

}  // namespace detail

// Background grammar:
//   fig2a | fig2b | fig2c | weak:<m'>,<M>
//   b:[(cell)*]<left>.<right>[*(cell)]    species, '.' sits between j=0 and j=1
//   s:[(cell)*]<spins with one 'U'>[*(cell)]  pre-flip spins over {u,d}, 'U' is flipped
// Cells repeat outward until the particle range covers `half_width`. For s:
// strings without 'U', `flip_site` is the index in the core of the spin to flip;
// the other forms fix their own flip and reject it.
inline Background parse_background(const std::string& text, long half_width,
                                   std::optional<long> flip_site = std::nullopt) {
  const std::string t = detail::trim(text);
  if (flip_site && t.rfind("s:", 0) != 0)
    throw Error(Errc::ConfigInvalid, "a flip site only applies to s: backgrounds");
  if (t == "fig2a") return fig2a(half_width);
  if (t == "fig2b") return fig2b(half_width);
  if (t == "fig2c") return fig2c(half_width);
  if (t.rfind("weak:", 0) == 0) {
    std::string args = t.substr(5);
    size_t comma = args.find(',');
    if (comma == std::string::npos) throw Error(Errc::ConfigInvalid, "weak:<m'>,<M> expected");
    try {
      return weak_background(std::stol(args.substr(0, comma)), std::stol(args.substr(comma + 1)), half_width);
    } catch (const std::invalid_argument&) {
      throw Error(Errc::ConfigInvalid, "weak:<m'>,<M> expects integers");
    }
  }
  if (t.rfind("b:", 0) == 0) {
    auto p = detail::split_periodic(t.substr(2));
    size_t dot = p.core.find('.');
    if (dot == std::string::npos || p.core.find('.', dot + 1) != std::string::npos)
      throw Error(Errc::ConfigInvalid, "species string needs exactly one '.'");
    std::string left = p.core.substr(0, dot), right = p.core.substr(dot + 1);
    for (const std::string* part : {&left, &right, &p.left_cell, &p.right_cell})
      for (char ch : *part)
        if (ch != '0' && ch != '1') throw Error(Errc::ConfigInvalid, std::string("bad species '") + ch + "'");
    const long want = half_width + 4;
    while (!p.left_cell.empty() && static_cast<long>(left.size()) < want + 1) left = p.left_cell + left;
    while (!p.right_cell.empty() && static_cast<long>(right.size()) < want) right += p.right_cell;
    if (left.empty() || right.empty()) throw Error(Errc::ConfigInvalid, "need particles 0 and 1");
    std::vector<int> s;
    for (char ch : left) s.push_back(ch - '0');
    for (char ch : right) s.push_back(ch - '0');
    int b0 = left.back() - '0', b1 = right.front() - '0';
    Convention conv;
    if (b1 == 1) conv = Convention::RightPair;
    else if (b0 == 0) conv = Convention::LeftPair;
    else throw Error(Errc::NotJammed, "b(0)=1, b(1)=0 leaves four down spins at the flip");
    return Background(1 - static_cast<long>(left.size()), std::move(s), conv);
  }
  if (t.rfind("s:", 0) == 0) {
    auto p = detail::split_periodic(t.substr(2));
    size_t flip = p.core.find('U');
    if (flip != std::string::npos && p.core.find('U', flip + 1) != std::string::npos)
      throw Error(Errc::ConfigInvalid, "spin string has more than one 'U'");
    if (flip == std::string::npos) {
      if (!flip_site) throw Error(Errc::ConfigInvalid, "mark the flip with 'U' or give a flip site");
      if (*flip_site < 0 || *flip_site >= static_cast<long>(p.core.size()))
        throw Error(Errc::ConfigInvalid, "flip site outside the spin string");
      flip = static_cast<size_t>(*flip_site);
      if (p.core[flip] != 'u') throw Error(Errc::FlipIneffective, "flip site holds a down spin");
    } else if (flip_site && static_cast<size_t>(*flip_site) != flip) {
      throw Error(Errc::ConfigInvalid, "flip site disagrees with the 'U' marker");
    }
    std::string left = p.core.substr(0, flip), right = p.core.substr(flip + 1);
    const long want = 2 * half_width + 16;
    while (!p.left_cell.empty() && static_cast<long>(left.size()) < want) left = p.left_cell + left;
    while (!p.right_cell.empty() && static_cast<long>(right.size()) < want) right += p.right_cell;
    SpinWindow w = SpinWindow::from_string(left + "u" + right, -static_cast<long>(left.size()));
    return background_from_spins(w, {0, std::nullopt});
  }
  throw Error(Errc::ConfigInvalid, "unknown background '" + t + "'");
}

}  // namespace jam
