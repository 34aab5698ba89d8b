#pragma once

#include <string>
#include <vector>

#include "jamming/backgrounds.hpp"
#include "jamming/engine.hpp"
#include "jamming/oracle.hpp"

namespace jamtest {

using namespace jam;

// A finite open chain: post-flip spins in chain order, the closed background
// describing it, and the engine site of chain index 0.
struct Chain {
  Background bg;
  std::vector<int> spins;
  long site0 = 0;

  long site(int k) const { return site0 + k; }
  int index(long l) const { return static_cast<int>(l - site0); }
  int size() const { return static_cast<int>(spins.size()); }
};

// `pre` is the pre-flip spin string, `flip` the chain index to flip.
inline Chain make_chain(const std::string& pre, int flip, std::optional<Convention> prefer = std::nullopt) {
  SpinWindow w = SpinWindow::from_string(pre, 0);
  Chain c;
  c.bg = background_from_spins(w, {flip, prefer}, Boundary::Closed);
  c.site0 = c.bg.window_shift();
  c.spins = w.spins;
  c.spins[static_cast<size_t>(flip)] = kDown;
  return c;
}

// The fig2a post-flip state restricted to sites [lo, hi].
inline Chain fig2a_chain(long lo, long hi) {
  Background inf = fig2a(20);
  SpinWindow post = render(inf, 0, lo, hi);
  std::string pre = post.str();
  pre[static_cast<size_t>(-1 - lo)] = 'u';
  return make_chain(pre, static_cast<int>(-1 - lo), Convention::RightPair);
}

inline oracle::Vec evolve_chain(const Chain& c, double t) {
  auto H = oracle::build_hamiltonian({oracle::Kind::Folded, c.size(), 1.0, 0.0});
  return oracle::evolve(oracle::product_state(c.spins), H, t);
}

// Pauli string shifted from engine sites to chain indices
inline PauliString to_chain(const PauliString& P, const Chain& c) {
  PauliString q = P;
  for (auto& f : q.factors) f.site = c.index(f.site);
  return q;
}

inline PauliSum to_chain(const PauliSum& A, const Chain& c) {
  PauliSum out;
  for (const auto& P : A) out.push_back(to_chain(P, c));
  return out;
}

}  // namespace jamtest
