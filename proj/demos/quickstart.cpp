// Extracts the Tangle isosurface with the error channel and prints a summary.

#include <cstdio>

#include "mcuq/mcuq.hpp"

int main() {
  using namespace mcuq;
  const ScalarGrid grid = sample_to_grid(make_field(FieldKind::Tangle), Dims{32, 32, 32}, default_domain(FieldKind::Tangle));

  ExtractionConfig cfg;
  cfg.isovalue = 0.1;
  cfg.method = Method::Weno;
  DetailedExtraction ex = extract_detailed(grid, cfg);
  add_error_channels(ex, grid, cfg);

  const auto s = summarize(ex.mesh.channel("approx_error"));
  const auto t = topology_stats(ex.mesh);
  std::printf("vertices %zu, triangles %zu, components %zu, euler %lld\n", ex.mesh.vertices.size(),
              ex.mesh.triangles.size(), t.components, static_cast<long long>(t.euler));
  std::printf("approx_error: mean %.3g rms %.3g max %.3g\n", s.mean, s.rms, s.max);
  std::printf("vertices above 2x mean: %.1f%%\n", 100.0 * fraction_above(ex.mesh.channel("approx_error"), 2.0 * s.mean));
  write_ply("tangle_weno.ply", ex.mesh);
  return 0;
}
