#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "jamming/asymptotics.hpp"
#include "jamming/backgrounds.hpp"
#include "jamming/engine.hpp"
#include "jamming/io.hpp"
#include "jamming/oracle.hpp"
#include "jamming/weak.hpp"

namespace jam::cli {

enum Exit { kOk = 0, kFailed = 1, kConfig = 2, kGuard = 3 };

inline int exit_code(Errc c) {
  switch (c) {
    case Errc::WindowOutsideGuard:
    case Errc::LightConeEscape:
    case Errc::IndexOutOfRange:
    case Errc::OutsideCone:
    case Errc::SupportOutsideChain:
      return kGuard;
    default:
      return kConfig;
  }
}

struct Options {
  std::string command;
  std::string background = "fig2a";
  std::optional<long> flip_site;
  std::vector<double> times;
  std::vector<std::string> obs{"sz"};
  long m = 9, M = 10;
  std::vector<double> delta{4.0, 8.0, 16.0};
  std::string sites;
  std::string out = "-";
  std::string format = "csv";
  double tol = 1e-12;
};

struct SiteRange {
  long lo = 0, hi = 0;
};

inline SiteRange parse_sites(const std::string& s) {
  size_t colon = s.find(':');
  try {
    if (colon == std::string::npos) throw Error(Errc::ConfigInvalid, "--sites expects lo:hi");
    SiteRange r{std::stol(s.substr(0, colon)), std::stol(s.substr(colon + 1))};
    if (r.hi < r.lo) throw Error(Errc::ConfigInvalid, "--sites needs lo <= hi");
    return r;
  } catch (const std::logic_error&) {
    throw Error(Errc::ConfigInvalid, "--sites expects integers lo:hi, got '" + s + "'");
  }
}

inline double max_time(const Options& o) {
  if (o.times.empty()) throw Error(Errc::ConfigInvalid, "--times is required");
  double t = 0.0;
  for (double v : o.times) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(Errc::ConfigInvalid, "times must be finite and >= 0");
    t = std::max(t, v);
  }
  return t;
}

inline SiteRange default_sites(const Options& o, double tmax) {
  if (!o.sites.empty()) return parse_sites(o.sites);
  long L = static_cast<long>(std::ceil(6.0 * tmax)) + 10;
  return {-L, L};
}

// Particle half-width covering both the light cone and the site window.
inline Background background_for(const Options& o, double tmax, SiteRange r) {
  long hw = std::max(default_cutoff(tmax) + 8, (std::max(-r.lo, r.hi) + 1) / 2 + 8);
  return parse_background(o.background, hw, o.flip_site);
}

class Output {
 public:
  explicit Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(Errc::ConfigInvalid, "cannot open '" + path + "' for writing");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

inline nlohmann::ordered_json meta_of(const Options& o) {
  nlohmann::ordered_json m;
  m["command"] = o.command;
  m["background"] = o.background;
  if (o.flip_site) m["flip_site"] = *o.flip_site;
  m["times"] = o.times;
  m["tol"] = o.tol;
  m["time_unit"] = "1/J";
  m["entropy_unit"] = "bits";
  return m;
}

inline void emit(const Options& o, std::ostream& out, const std::vector<io::Series>& series,
                 nlohmann::ordered_json meta) {
  Output dest(o.out, out);
  if (o.format == "csv") io::write_csv(dest.stream(), series);
  else io::write_json(dest.stream(), series, std::move(meta));
}

inline io::Series site_series(const std::string& name, double t, SiteRange r,
                              const std::function<std::optional<double>(long)>& f) {
  io::Series s;
  s.observable = name;
  s.t = t;
  for (long l = r.lo; l <= r.hi; ++l)
    if (auto v = f(l)) s.push(l, *v);
  return s;
}

inline int run_profile(const Options& o, std::ostream& out) {
  const double tmax = max_time(o);
  const SiteRange r = default_sites(o, tmax);
  Background bg = background_for(o, tmax, r);
  std::vector<io::Series> all;
  for (double t : o.times) {
    Evolution ev = evolve_line(t, o.tol);
    check_guard(bg, ev);
    for (const std::string& name : o.obs) {
      io::Series s;
      auto not_impurity = [](long l) { return l != 0 && l != -1; };
      if (name == "sz") {
        s = io::from_profile(magnetisation_profile(ev, bg, r.lo, r.hi));
      } else if (name == "sz_asym") {
        s = site_series(name, t, r, [&](long l) -> std::optional<double> {
          if (!not_impurity(l)) return std::nullopt;
          return asym_sigma_z(l, t, bg);
        });
        s.mode = "asymptotic";
      } else if (name == "pdd") {
        s = site_series(name, t, r, [&](long l) -> std::optional<double> { return p_down_down(l, ev, bg); });
      } else if (name == "current") {
        s = site_series(name, t, r, [&](long l) -> std::optional<double> { return spin_current(l, ev, bg); });
      } else if (name == "entropy") {
        s = site_series(name, t, r, [&](long l) -> std::optional<double> { return bipartite_entropy(l, ev, bg).entropy_bits; });
        s.index_kind = "bond";
      } else if (name == "plus" || name == "minus" || name == "plus_asym" || name == "minus_asym") {
        const bool plus = name.rfind("plus", 0) == 0, asym = name.find("asym") != std::string::npos;
        s.observable = name;
        s.index_kind = "macrosite";
        s.mode = asym ? "asymptotic" : "exact";
        for (long lp = ceil_half(r.lo) + 1; 2 * lp <= r.hi; ++lp) {
          if (asym) {
            if (lp == 0) continue;
            s.push(lp, asym_macrosite(lp, t, bg, plus ? MacroCharge::Plus : MacroCharge::Minus));
          } else {
            double a = sigma_z_fast(2 * lp - 1, ev, bg), b = sigma_z_fast(2 * lp, ev, bg);
            s.push(lp, plus ? 0.5 * (b + a) : 0.5 * (b - a));
          }
        }
      } else if (name == "variance") {
        s.observable = name;
        s.index_kind = "particle";
        for (long j = ceil_half(r.lo); j <= floor_half(r.hi); ++j) s.push(j, position_statistics(j, ev, bg).variance);
      } else {
        throw Error(Errc::ConfigInvalid,
                    "unknown observable '" + name + "' (sz, sz_asym, pdd, current, entropy, plus, minus, plus_asym, minus_asym, variance)");
      }
      s.t = t;
      all.push_back(std::move(s));
    }
  }
  emit(o, out, all, meta_of(o));
  return kOk;
}

inline int run_jamming(const Options& o, std::ostream& out) {
  const double tmax = max_time(o);
  const SiteRange r = default_sites(o, tmax);
  Background bg = background_for(o, tmax, r);
  std::vector<io::Series> all;
  std::vector<std::pair<double, double>> samples;
  for (double t : o.times) {
    Evolution ev = evolve_line(t, o.tol);
    check_guard(bg, ev);
    io::Series s = site_series("t_pdd", t, r, [&](long l) -> std::optional<double> { return t * p_down_down(l, ev, bg); });
    if (t > 0.0)
      for (size_t k = 0; k < s.index.size(); ++k) samples.emplace_back(static_cast<double>(s.index[k]) / t, s.value[k]);
    all.push_back(std::move(s));
  }
  auto meta = meta_of(o);
  if (!samples.empty()) {
    EnvelopeFit f = fit_envelope(samples);
    meta["envelope_fit"] = {{"a", f.a}, {"v", f.v}, {"rms", f.rms}, {"points", f.points}};
  }
  emit(o, out, all, meta);
  return kOk;
}

inline int run_entmap(const Options& o, std::ostream& out) {
  max_time(o);
  SiteRange r = o.sites.empty() ? SiteRange{-10, 2 * (o.m + o.M) + 10} : parse_sites(o.sites);
  std::vector<EntanglementMap> maps;
  for (double t : o.times) maps.push_back(entanglement_map({o.m, o.M, t}, r.lo, r.hi));
  auto meta = meta_of(o);
  meta.erase("background");
  meta["m"] = o.m;
  meta["M"] = o.M;
  Output dest(o.out, out);
  if (o.format == "csv") io::write_map_csv(dest.stream(), maps);
  else io::write_map_json(dest.stream(), maps, meta);
  return kOk;
}

inline int run_duality(const Options& o, std::ostream& out) {
  std::vector<double> times = o.times.empty() ? std::vector<double>{1.0} : o.times;
  long N = 16;
  if (!o.sites.empty()) {
    try {
      N = std::stol(o.sites);
    } catch (const std::logic_error&) {
      throw Error(Errc::ConfigInvalid, "duality --sites expects the XXZ chain length");
    }
  }
  if (N < 4) throw Error(Errc::ConfigInvalid, "duality needs at least 4 sites");
  oracle::check_size(static_cast<int>(N));
  const long lo = -N / 2, hi = lo + N - 2;
  Background bg = parse_background(o.background, N + 8, o.flip_site);
  std::vector<int> folded = render(bg, 0, lo, hi).spins;
  nlohmann::ordered_json rep = meta_of(o);
  rep["N"] = N;
  rep["folded_initial"] = render(bg, 0, lo, hi).str();
  SpinWindow dual;
  dual.spins = oracle::dual_string(folded);
  rep["xxz_initial"] = dual.str();
  rep["runs"] = nlohmann::ordered_json::array();
  std::ostringstream csv;
  csv << "delta,t,index,folded,xxz,deviation\n";
  for (double t : times)
    for (double d : o.delta) {
      oracle::DualityReport r = oracle::duality_compare(folded, d, t);
      for (size_t k = 0; k < r.folded.size(); ++k)
        csv << io::fmt(d) << ',' << io::fmt(t) << ',' << (lo + static_cast<long>(k)) << ',' << io::fmt(r.folded[k]) << ','
            << io::fmt(r.xxz[k]) << ',' << io::fmt(r.deviation[k]) << '\n';
      rep["runs"].push_back({{"delta", d}, {"t", t}, {"max_interior_deviation", r.max_interior},
                             {"interior", {lo + r.interior_lo, lo + r.interior_hi}}, {"deviation", r.deviation}});
    }
  Output dest(o.out, out);
  if (o.format == "csv") dest.stream() << csv.str();
  else dest.stream() << rep.dump(1) << '\n';
  return kOk;
}

// Invariant suite. Each check prints one line; failures do not abort.
inline int run_verify(const Options& o, std::ostream& out) {
  int failed = 0;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    if (!ok) ++failed;
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      report(name, false, e.what());
    }
  };
  for (double t : {1.0, 10.0, 100.0})
    guarded("normalization t=" + io::fmt(t), [&] {
      BesselWeights bw = bessel_weights(t, o.tol);
      double dev = std::abs(bw.sum_squares() - 1.0);
      report("normalization t=" + io::fmt(t), dev < o.tol, "|sum J^2 - 1| = " + io::fmt(dev));
    });
  guarded("oracle N=14", [&] {
    Background inf = fig2a(20);
    SpinWindow post = render(inf, 0, -8, 5);
    SpinWindow pre = post;
    pre.spins[7] = kUp;  // site -1
    SpinWindow chain = pre;
    chain.first_site = 0;
    Background bg = background_from_spins(chain, {7, Convention::RightPair}, Boundary::Closed);
    const long s0 = bg.window_shift();
    auto H = oracle::build_hamiltonian({oracle::Kind::Folded, 14, 1.0, 0.0});
    double worst = 0.0, leak = 0.0;
    for (double t : {0.5, 1.0, 1.5}) {
      Evolution ev = evolve_open(bg, t);
      oracle::Vec psi = oracle::evolve(oracle::product_state(post.spins), H, t);
      auto sz = oracle::sz_profile(psi);
      for (int k = 0; k < 14; ++k) worst = std::max(worst, std::abs(sigma_z_fast(s0 + k, ev, bg) - sz[static_cast<size_t>(k)]));
      double in = 0.0;
      for (long n = bg.n_lo(); n <= bg.n_hi(); ++n)
        in += std::norm(psi(static_cast<Eigen::Index>(oracle::basis_index(render(bg, n, s0, s0 + 13).spins))));
      leak = std::max(leak, 1.0 - in);
    }
    report("oracle N=14 closed chain sz", worst < 1e-10, "max dev = " + io::fmt(worst));
    report("sector invariance N=14", leak < 1e-10, "weight outside sector = " + io::fmt(leak));
  });
  guarded("rule vs render", [&] {
    long bad = 0, total = 0;
    for (const char* name : {"fig2a", "fig2c", "weak:5,3", "s:(uud)*uduUduudu*(udu)"}) {
      Background bg = parse_background(name, 60);
      for (long l = -40; l <= 40; ++l) {
        if (l == 0 || l == -1) continue;
        for (long n = -30; n <= 30; ++n, ++total)
          if (sigma_z_element_rule(n, l, bg) != bg.spin(n, l)) ++bad;
      }
    }
    report("rule vs render", bad == 0, std::to_string(bad) + " of " + std::to_string(total) + " elements differ");
  });
  guarded("weak catalog", [&] {
    WeakConfig cfg{5, 3, 3.1};
    WeakProtocol wp(cfg);
    Background bg = weak_engine_background(cfg, -8, 24);
    Evolution ev = evolve_line(cfg.t, o.tol);
    double worst = 0.0;
    for (long i = -8; i <= 24; ++i) {
      worst = std::max(worst, std::abs(wp.magnetisation(i) - sigma_z_fast(i, ev, bg)));
      for (long j = i + 1; j <= 24; ++j)
        for (char a : {'x', 'y', 'z'})
          worst = std::max(worst, std::abs(wp.two_point(a, a, i, j) - expect_pauli_string(pauli({{i, a}, {j, a}}), ev, bg).real()));
    }
    report("weak catalog vs engine", worst < 1e-10, "max dev = " + io::fmt(worst));
  });
  out << (failed ? "verify: " + std::to_string(failed) + " check(s) failed\n" : std::string("verify: all checks passed\n"));
  return failed ? kFailed : kOk;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Options o;
  CLI::App app{"Spin-flip dynamics in jammed states of the dual folded XXZ chain"};
  app.set_config("--config", "", "key=value file with the same names as the flags");
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--background", o.background, "fig2a | fig2b | fig2c | weak:m,M | b:... | s:...");
  app.add_option("--flip-site", o.flip_site, "index of the flipped spin in an s: string without 'U'");
  app.add_option("--times", o.times, "comma-separated times in units of 1/J")->delimiter(',');
  app.add_option("--obs", o.obs, "observables for 'profile'")->delimiter(',');
  app.add_option("--m", o.m, "first domain macrosite m' for 'entmap'");
  app.add_option("--M", o.M, "domain length M for 'entmap'");
  app.add_option("--delta", o.delta, "anisotropies for 'duality'")->delimiter(',');
  app.add_option("--sites", o.sites, "site window lo:hi (chain length for 'duality')");
  app.add_option("--out", o.out, "output path, '-' for stdout");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--tol", o.tol, "Bessel normalization tolerance");
  app.add_subcommand("profile", "site or macrosite profiles");
  app.add_subcommand("jamming", "J t P_dd profiles and the envelope fit");
  app.add_subcommand("entmap", "two-spin entanglement maps for the weak protocol");
  app.add_subcommand("verify", "invariant suite");
  app.add_subcommand("duality", "folded chain against XXZ");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfig;
  }
  o.command = app.get_subcommands().front()->get_name();
  try {
    if (o.command == "profile") return run_profile(o, out);
    if (o.command == "jamming") return run_jamming(o, out);
    if (o.command == "entmap") return run_entmap(o, out);
    if (o.command == "duality") return run_duality(o, out);
    return run_verify(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  }
}

}  // namespace jam::cli
