#pragma once

// JSON records for channel summaries, feature reports, distances and
// analytic field specs, plus a writer that prints floats with 17
// significant digits.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcuq/features.hpp"
#include "mcuq/metrics.hpp"
#include "mcuq/uncertainty.hpp"
#include "mcuq/volume.hpp"

namespace mcuq {

using Json = nlohmann::json;

namespace detail {

inline void dump_json_to(std::string& out, const Json& j, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_json_to(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        newline(depth + 1);
        dump_json_to(out, j[i], indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      if (std::string_view(buf).find_first_of(".eE") == std::string_view::npos) out += ".0";
      return;
    }
    default: out += j.dump();
  }
}

}  // namespace detail

/// Serializes with 17 significant digits per float. indent < 0 is compact.
inline std::string dump_json(const Json& j, int indent = -1) {
  std::string out;
  detail::dump_json_to(out, j, indent, 0);
  return out;
}

/// CDF as [[value, fraction], ...]. With max_points > 0 the ranks are
/// subsampled evenly; the last rank is always kept.
inline Json cdf_json(const ErrorCdf& c, std::size_t max_points = 0) {
  Json arr = Json::array();
  const std::size_t n = c.values.size();
  if (n == 0) return arr;
  if (max_points == 0 || n <= max_points) {
    for (std::size_t r = 0; r < n; ++r) arr.push_back({c.values[r], c.fractions[r]});
    return arr;
  }
  std::size_t prev = n;
  for (std::size_t q = 0; q < max_points; ++q) {
    const std::size_t r = (q + 1) * n / max_points - 1;
    if (r == prev) continue;
    arr.push_back({c.values[r], c.fractions[r]});
    prev = r;
  }
  return arr;
}

inline Json summary_json(const ChannelSummary& s) {
  return {{"count", s.count}, {"min", s.min}, {"mean", s.mean}, {"rms", s.rms}, {"max", s.max}};
}

/// {count, min, mean, rms, max, cdf}
inline Json channel_summary_json(std::span<const double> channel, std::size_t max_cdf_points = 256) {
  Json j = summary_json(summarize(channel));
  j["cdf"] = cdf_json(cdf(channel), max_cdf_points);
  return j;
}

inline Json topology_json(const TopologyStats& t) {
  return {{"vertices", t.vertices},   {"edges", t.edges},           {"faces", t.faces},
          {"components", t.components}, {"open_edges", t.open_edges}, {"nonmanifold_edges", t.nonmanifold_edges},
          {"euler", t.euler}};
}

inline Json distance_json(const DistanceReport& d) {
  return {{"max", d.max},
          {"mean", d.mean},
          {"rms", d.rms},
          {"samples", d.samples},
          {"samples_per_triangle", d.samples_per_triangle}};
}

inline std::string pair_code(std::uint8_t pairs) {
  std::string s;
  if (pairs & kPairLeftCenter) s += s.empty() ? "LC" : ",LC";
  if (pairs & kPairLeftRight) s += s.empty() ? "LR" : ",LR";
  if (pairs & kPairCenterRight) s += s.empty() ? "CR" : ",CR";
  return s;
}

inline Json index_json(const Index3& i) { return Json::array({i.i, i.j, i.k}); }

/// {flagged: [[i,j,k]...], triggers: [...], crossed: n, ...}
inline Json feature_report_json(const FeatureReport& f, const RecoveryReport* rec = nullptr) {
  Json flagged = Json::array(), triggers = Json::array();
  for (const auto& c : f.flagged) {
    flagged.push_back(index_json(c.cell));
    triggers.push_back({{"cell", index_json(c.cell)},
                        {"edge", index_json(c.edge.node)},
                        {"axis", std::string(1, "xyz"[axis_index(c.edge.axis)])},
                        {"pairs", pair_code(c.pairs)},
                        {"crossed", c.crossed}});
  }
  Json j{{"flagged", flagged},
         {"triggers", triggers},
         {"flagged_count", f.flagged.size()},
         {"flagged_crossed", f.count_crossed()},
         {"flagged_uncrossed", f.flagged.size() - f.count_crossed()},
         {"edges_triggered", f.edges_triggered},
         {"patch_failures", rec ? rec->patch_failures : 0}};
  if (rec) {
    j["refinement"] = {{"refined_cells", rec->refined_cells},     {"interface_faces", rec->interface_faces},
                       {"patched_faces", rec->patched_faces},     {"patch_triangles", rec->patch_triangles},     {"split_triangles", rec->split_triangles},
                       {"patch_failures", rec->patch_failures},   {"capped_loops", rec->capped_loops},
                       {"merged_vertices", rec->merged_vertices}, {"interface_open_edges", rec->interface_open_edges}};
  }
  return j;
}

/// Parses {"lo": [x,y,z], "hi": [x,y,z]} or [[x,y,z],[x,y,z]].
inline Box parse_box_json(const Json& j) {
  auto vec = [](const Json& a) {
    if (!a.is_array() || a.size() != 3) throw std::invalid_argument("box corner must be an array of 3 numbers");
    return Vec3{a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
  };
  Box b;
  if (j.is_object()) {
    b = {vec(j.at("lo")), vec(j.at("hi"))};
  } else if (j.is_array() && j.size() == 2) {
    b = {vec(j.at(0)), vec(j.at(1))};
  } else {
    throw std::invalid_argument("box must be {lo, hi} or [[lo], [hi]]");
  }
  if (!b.valid() || !is_finite(b.lo) || !is_finite(b.hi)) throw std::invalid_argument("box must have lo <= hi componentwise");
  return b;
}

inline Json box_json(const Box& b) {
  return {{"lo", {b.lo.x, b.lo.y, b.lo.z}}, {"hi", {b.hi.x, b.hi.y, b.hi.z}}};
}

/// Analytic field spec {kind, params?, dims: [nx,ny,nz] | n, domain?: box}.
struct FieldSpec {
  AnalyticField field;
  Dims dims;
  Box domain;
};

inline Dims parse_dims_json(const Json& j) {
  auto get = [](const Json& v) {
    if (!v.is_number_integer() || v.get<long long>() < 2) throw std::invalid_argument("dims must be integers >= 2");
    return static_cast<std::size_t>(v.get<long long>());
  };
  if (j.is_number()) {
    const std::size_t n = get(j);
    return {n, n, n};
  }
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("dims must be an integer or an array of 3 integers");
  return {get(j.at(0)), get(j.at(1)), get(j.at(2))};
}

inline FieldSpec parse_field_spec(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("field spec must be a JSON object");
  FieldSpec s;
  const FieldKind kind = parse_field_kind(j.at("kind").get<std::string>());
  std::map<std::string, double> params;
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw std::invalid_argument("params must be an object");
    for (const auto& [name, value] : j.at("params").items()) params[name] = value.get<double>();
  }
  s.field = make_field(kind, params);
  s.field.validate();
  s.dims = parse_dims_json(j.at("dims"));
  s.domain = j.contains("domain") ? parse_box_json(j.at("domain")) : default_domain(kind);
  if (!(s.domain.hi.x > s.domain.lo.x && s.domain.hi.y > s.domain.lo.y && s.domain.hi.z > s.domain.lo.z))
    throw std::invalid_argument("domain must have hi > lo componentwise");
  return s;
}

inline Json field_spec_json(const FieldSpec& s) {
  Json params = Json::object();
  for (const auto& [name, value] : s.field.params) params[name] = value;
  return {{"kind", std::string(to_string(s.field.kind))},
          {"params", params},
          {"dims", {s.dims.nx, s.dims.ny, s.dims.nz}},
          {"domain", {{s.domain.lo.x, s.domain.lo.y, s.domain.lo.z}, {s.domain.hi.x, s.domain.hi.y, s.domain.hi.z}}}};
}

}  // namespace mcuq
