#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "jamming/engine.hpp"
#include "jamming/weak.hpp"

namespace jam::io {

// Shortest form that round-trips a double.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Long-format series: one row per (observable, time, index).
struct Series {
  std::string observable;
  std::string index_kind = "site";
  std::string mode = "exact";
  double t = 0.0;
  std::vector<long> index;
  std::vector<double> value;

  void push(long i, double v) {
    index.push_back(i);
    value.push_back(v);
  }
};

inline Series from_profile(const Profile& p) {
  Series s{p.observable, p.index_kind, p.mode, p.t, {}, {}};
  for (long i = p.lo; i <= p.hi(); ++i) s.push(i, p.at(i));
  return s;
}

inline void write_csv(std::ostream& os, const std::vector<Series>& all) {
  os << "observable,t,index,value\n";
  for (const auto& s : all)
    for (size_t k = 0; k < s.index.size(); ++k)
      os << s.observable << ',' << fmt(s.t) << ',' << s.index[k] << ',' << fmt(s.value[k]) << '\n';
}

inline nlohmann::ordered_json to_json(const Series& s) {
  nlohmann::ordered_json j;
  j["observable"] = s.observable;
  j["index_kind"] = s.index_kind;
  j["mode"] = s.mode;
  j["t"] = s.t;
  j["index"] = s.index;
  j["value"] = s.value;
  return j;
}

inline void write_json(std::ostream& os, const std::vector<Series>& all, nlohmann::ordered_json meta) {
  nlohmann::ordered_json j;
  j["meta"] = std::move(meta);
  j["series"] = nlohmann::ordered_json::array();
  for (const auto& s : all) j["series"].push_back(to_json(s));
  os << j.dump(1) << '\n';
}

inline void write_map_csv(std::ostream& os, const std::vector<EntanglementMap>& maps) {
  os << "t,i,j,value\n";
  for (const auto& m : maps)
    for (long i = m.lo; i <= m.hi; ++i)
      for (long j = m.lo; j <= m.hi; ++j) os << fmt(m.t) << ',' << i << ',' << j << ',' << fmt(m.at(i, j)) << '\n';
}

inline void write_map_json(std::ostream& os, const std::vector<EntanglementMap>& maps, nlohmann::ordered_json meta) {
  nlohmann::ordered_json j;
  j["meta"] = std::move(meta);
  j["maps"] = nlohmann::ordered_json::array();
  for (const auto& m : maps) {
    nlohmann::ordered_json e;
    e["t"] = m.t;
    e["lo"] = m.lo;
    e["hi"] = m.hi;
    e["display_scale"] = m.display_scale();
    std::vector<std::vector<double>> rows;
    for (long i = m.lo; i <= m.hi; ++i) {
      std::vector<double> r;
      for (long k = m.lo; k <= m.hi; ++k) r.push_back(m.at(i, k));
      rows.push_back(std::move(r));
    }
    e["values"] = rows;
    j["maps"].push_back(std::move(e));
  }
  os << j.dump(1) << '\n';
}

}  // namespace jam::io
