// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "support.hpp"

using namespace mcuq;
using namespace mcuq::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome linear_exactness() {
  const ScalarGrid g = plane_grid(16);
  double worst_x = 0.0, worst_err = 0.0;
  std::size_t verts = 0;
  const double ms = time_ms([&] {
    for (Method m : {Method::Linear, Method::Cubic, Method::Weno}) {
      ExtractionConfig cfg;
      cfg.method = m;
      DetailedExtraction ex = extract_detailed(g, cfg);
      add_error_channels(ex, g, cfg);
      verts += ex.mesh.vertices.size();
      for (const auto& v : ex.mesh.vertices) worst_x = std::max(worst_x, std::abs(v.x - 0.5));
      for (double e : ex.mesh.channel("approx_error")) worst_err = std::max(worst_err, std::abs(e));
    }
  });
  return {verts > 0 && worst_x <= 1e-12 && worst_err == 0.0 && ms < 1000.0,
          fmt("max|x-0.5|=%.3g max|approx_error|=%.3g runtime=%.1fms", worst_x, worst_err, ms)};
}

Outcome bound_dominance() {
  struct Case {
    FieldKind kind;
    std::size_t n;
    double k;
  };
  bool ok = true;
  std::string detail;
  for (const Case c : {Case{FieldKind::Tangle, 32, 0.1}, Case{FieldKind::Teardrop, 32, -0.001}, Case{FieldKind::Torus, 64, 0.0}}) {
    const ScalarGrid g = field_grid(c.kind, c.n);
    ExtractionConfig cfg;
    cfg.isovalue = c.k;
    const IndexedMesh m = attach_error_channel(g, cfg);
    const auto& a = m.channel("approx_error");
    const auto& b = m.channel("bound_error");
    std::size_t dominated = 0;
    for (std::size_t v = 0; v < a.size(); ++v) dominated += a[v] <= b[v] + 1e-12 ? 1 : 0;
    const double ra = summarize(a).rms, rb = summarize(b).rms;
    ok = ok && !a.empty() && dominated == a.size() && ra < rb;
    detail += fmt("%s %zu/%zu rms %.3g<%.3g; ", std::string(to_string(c.kind)).c_str(), dominated, a.size(), ra, rb);
  }
  return {ok, detail};
}

Outcome estimate_validity() {
  double rho = 0.0, ratio = 0.0;
  const double ms = time_ms([&] {
    ExtractionConfig cfg;
    cfg.isovalue = 0.1;
    const IndexedMesh coarse = attach_error_channel(field_grid(FieldKind::Tangle, 32), cfg);
    const IndexedMesh target = extract(field_grid(FieldKind::Tangle, 128), cfg);
    const auto measured = per_vertex_distance(coarse, target);
    const auto& approx = coarse.channel("approx_error");
    rho = spearman(approx, measured);
    ratio = summarize(approx).mean / summarize(measured).mean;
  });
  return {rho >= 0.4 && ratio >= 0.5 && ratio <= 5.0 && ms < 60000.0,
          fmt("spearman=%.3f mean ratio=%.3f runtime=%.0fms", rho, ratio, ms)};
}

Outcome convergence_orders() {
  double ol = 0, oc = 0, ow = 0;
  const double ms = time_ms([&] {
    ol = fitted_order(Method::Linear);
    oc = fitted_order(Method::Cubic);
    ow = fitted_order(Method::Weno);
  });
  return {ol >= 1.5 && oc >= 3.5 && ow >= 4.0 && ms < 5000.0,
          fmt("linear=%.2f cubic=%.2f weno=%.2f runtime=%.1fms", ol, oc, ow, ms)};
}

Outcome weno_weight_sanity() {
  const WenoStencil lin({-3, -2, -1, 0, 1, 2, 3}, 1.0);
  const auto w = weno_weights(lin).weights;
  double gamma_err = 0.0;
  for (std::size_t j = 0; j < 3; ++j) gamma_err = std::max(gamma_err, std::abs(w[j] - WenoDiagnostics::gammas[j]));

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> scale_exp(-6.0, 6.0);
  std::size_t bad = 0;
  double worst_sum = 0.0;
  for (int n = 0; n < 100000; ++n) {
    const double s = std::pow(10.0, scale_exp(rng));
    std::array<double, 7> v{};
    for (auto& x : v) x = s * u(rng);
    const auto d = weno_weights(WenoStencil(v, 1.0));
    double sum = 0.0;
    for (double x : d.weights) {
      if (!(x >= 0.0)) ++bad;
      sum += x;
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  return {gamma_err <= 1e-10 && bad == 0 && worst_sum <= 1e-12,
          fmt("|w-gamma|=%.3g negative=%zu max|sum-1|=%.3g over 1e5 stencils", gamma_err, bad, worst_sum)};
}

Outcome mc_topology() {
  const ScalarGrid g = field_grid(FieldKind::Sphere, 16);
  ExtractionConfig cfg;
  const IndexedMesh m = extract(g, cfg);
  const TopologyStats t = topology_stats(m);
  const std::string first = encode_ply(m);
  bool identical = true;
  for (unsigned threads : {1u, 3u, 0u}) {
    cfg.threads = threads;
    identical = identical && encode_ply(extract(g, cfg)) == first;
  }
  return {t.open_edges == 0 && t.nonmanifold_edges == 0 && t.euler == 2 && identical && !m.empty(),
          fmt("open=%zu euler=%lld byte-identical=%s", t.open_edges, static_cast<long long>(t.euler),
              identical ? "yes" : "no")};
}

RecoveryResult teardrop_recovery(RefinementSampler sampler) {
  const ScalarGrid g = field_grid(FieldKind::Teardrop, 32);
  ExtractionConfig cfg;
  cfg.isovalue = -0.001;
  RefinementConfig rc;
  rc.box = teardrop_neck_box();
  rc.sampler = sampler;
  return extract_with_recovery(g, cfg, rc);
}

Outcome hidden_feature_recovery() {
  RecoveryResult r;
  const double ms = time_ms([&] { r = teardrop_recovery(RefinementSampler::Tricubic); });
  const Box box = teardrop_neck_box();
  const auto cb = topology_stats(triangles_in_box(r.base, box)).components;
  const auto cr = topology_stats(triangles_in_box(r.recovered, box)).components;
  return {cb > cr && r.report.interface_open_edges == 0 && r.report.patch_failures == 0 && ms < 30000.0,
          fmt("components in box %zu -> %zu, interface open edges=%zu, patch failures=%zu, runtime=%.0fms", cb, cr,
              r.report.interface_open_edges, r.report.patch_failures, ms)};
}

Outcome trilinear_control() {
  const RecoveryResult r = teardrop_recovery(RefinementSampler::Trilinear);
  const auto cb = topology_stats(r.base).components, cr = topology_stats(r.recovered).components;
  return {r.report.refined_cells > 0 && cb == cr,
          fmt("refined=%zu components %zu -> %zu", r.report.refined_cells, cb, cr)};
}

Outcome performance_envelope() {
  const ScalarGrid g = field_grid(FieldKind::Tangle, 32);
  const ScalarGrid fine = field_grid(FieldKind::Tangle, 128);
  ExtractionConfig cfg;
  cfg.isovalue = 0.1;
  IndexedMesh coarse;
  const double plain = best_ms(15, [&] { coarse = extract(g, cfg); });
  const double with_error = best_ms(15, [&] { coarse = attach_error_channel(g, cfg); });
  const IndexedMesh target = extract(fine, cfg);
  const double measure = best_ms(3, [&] { (void)mesh_distance(coarse, target); });
  const double overhead = (with_error - plain) / plain;
  return {with_error < 100.0 && overhead < 0.10 && measure > 10.0 * plain,
          fmt("extract=%.2fms extract+error=%.2fms (+%.1f%%) mesh_distance=%.1fms (%.0fx)", plain, with_error,
              100.0 * overhead, measure, measure / plain)};
}

Outcome variation_structure() {
  const ScalarGrid torus = field_grid(FieldKind::Torus, 64);
  const IndexedMesh m = extract_compare(torus, 0.0, {Method::Linear, Method::Cubic, Method::Weno});
  const auto& vmax = m.channel("variation_max");
  std::size_t violations = 0, pairs = 0;
  for (const auto& [name, values] : m.channels) {
    if (name == "variation_max" || name.rfind("variation_", 0) != 0) continue;
    ++pairs;
    for (std::size_t v = 0; v < values.size(); ++v) violations += vmax[v] >= values[v] ? 0 : 1;
  }
  const ScalarGrid plane = field_grid(FieldKind::AxisLinear, 16, Box{{-1, -1, -1}, {1, 1, 1}}, {{"d", 0.03}});
  const IndexedMesh p = extract_compare(plane, 0.0, {Method::Linear, Method::Cubic, Method::Weno});
  double plane_max = 0.0;
  for (const auto& [name, values] : p.channels)
    for (double v : values) plane_max = std::max(plane_max, std::abs(v));
  return {pairs == 3 && violations == 0 && !m.empty() && !p.empty() && plane_max <= 1e-12,
          fmt("pairwise channels=%zu violations=%zu max variation on f=x is %.3g", pairs, violations, plane_max)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"linear exactness", linear_exactness},
      {"bound dominance", bound_dominance},
      {"estimate validity vs measured error", estimate_validity},
      {"convergence orders", convergence_orders},
      {"WENO weight sanity", weno_weight_sanity},
      {"MC topology oracle", mc_topology},
      {"hidden-feature recovery", hidden_feature_recovery},
      {"trilinear-refinement negative control", trilinear_control},
      {"performance envelope", performance_envelope},
      {"interpolant-variation structure", variation_structure},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
