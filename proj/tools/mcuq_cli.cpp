// mcuq: synthesize fields, extract isosurfaces with error channels,
// validate against a reference mesh, or serve the explorer API.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "mcuq/mcuq.hpp"
#include "mcuq/service_http.hpp"

namespace fs = std::filesystem;
using namespace mcuq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitEmpty = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path sidecar_path(const fs::path& volume) {
  fs::path p = volume;
  p.replace_extension(".json");
  return p;
}

fs::path with_suffix(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  const auto ext = p.extension();
  p.replace_extension();
  return p.string() + suffix + ext.string();
}

Box parse_domain(const std::vector<double>& v) {
  if (v.size() == 2) return {{v[0], v[0], v[0]}, {v[1], v[1], v[1]}};
  if (v.size() == 6) return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
  throw UsageError("--domain takes 2 values (lo hi) or 6 values (x0 y0 z0 x1 y1 z1)");
}

Dims parse_dims(const std::vector<std::size_t>& v) {
  if (v.size() == 1) return {v[0], v[0], v[0]};
  if (v.size() == 3) return {v[0], v[1], v[2]};
  throw UsageError("dims take 1 value (n) or 3 values (nx ny nz)");
}

void check_dims(const Dims& d) {
  if (d.nx < 2 || d.ny < 2 || d.nz < 2) throw UsageError("every dimension must be at least 2");
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects name=value, got '" + item + "'");
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("--param value is not a number: '" + item + "'");
    }
  }
  return out;
}

void emit_json(const Json& j, const std::string& path) {
  const std::string text = dump_json(j, 2) + "\n";
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_file_bytes(path, text);
  }
}

void write_mesh(const fs::path& path, const IndexedMesh& mesh) {
  if (path.extension() == ".obj") write_obj(path, mesh);
  else write_ply(path, mesh);
}

// synth

struct SynthOptions {
  std::string kind;
  std::vector<std::size_t> dims;
  std::vector<double> domain;
  std::vector<std::string> params;
  std::string out;
};

int cmd_synth(const SynthOptions& o) {
  const FieldKind kind = parse_field_kind(o.kind);
  FieldSpec spec;
  spec.field = make_field(kind, parse_params(o.params));
  spec.field.validate();
  spec.dims = parse_dims(o.dims);
  check_dims(spec.dims);
  spec.domain = o.domain.empty() ? default_domain(kind) : parse_domain(o.domain);
  if (!(spec.domain.hi.x > spec.domain.lo.x && spec.domain.hi.y > spec.domain.lo.y && spec.domain.hi.z > spec.domain.lo.z))
    throw UsageError("--domain needs hi > lo on every axis");
  const ScalarGrid grid = sample_to_grid(spec.field, spec.dims, spec.domain);
  const fs::path out = o.out.empty() ? fs::path(o.kind + "_" + std::to_string(spec.dims.nx) + ".f32") : fs::path(o.out);
  write_raw(out, grid, ValueType::F32LE);
  Json side = field_spec_json(spec);
  side["format"] = "f32le";
  side["origin"] = {grid.origin().x, grid.origin().y, grid.origin().z};
  side["spacing"] = {grid.spacing().x, grid.spacing().y, grid.spacing().z};
  side["value_range"] = {grid.min_value(), grid.max_value()};
  emit_json(side, sidecar_path(out).string());
  std::fprintf(stderr, "wrote %s and %s\n", out.string().c_str(), sidecar_path(out).string().c_str());
  return kExitOk;
}

// extract

struct ExtractOptions {
  std::string volume;
  std::string field;
  std::vector<std::size_t> dims;
  std::vector<double> domain;
  std::vector<std::string> params;
  std::string type = "f32le";
  std::vector<double> origin;
  std::vector<double> spacing;
  double k = 0.0;
  std::string method = "linear";
  std::string boundary = "clamp";
  std::vector<double> box;
  bool error = false;
  std::vector<std::string> compare;
  bool recover = false;
  int subdivision = 4;
  std::string sampler = "tricubic";
  std::string apply_to = "flagged";
  std::string out = "out.ply";
  std::string summary;
};

ScalarGrid load_volume(const ExtractOptions& o) {
  if (!o.field.empty()) {
    const FieldKind kind = parse_field_kind(o.field);
    if (o.dims.empty()) throw UsageError("--field needs --dims");
    const Dims d = parse_dims(o.dims);
    check_dims(d);
    auto field = make_field(kind, parse_params(o.params));
    field.validate();
    return sample_to_grid(field, d, o.domain.empty() ? default_domain(kind) : parse_domain(o.domain));
  }
  Dims d{};
  Vec3 origin{}, spacing{1.0, 1.0, 1.0};
  ValueType type = parse_value_type(o.type);
  const fs::path side = sidecar_path(o.volume);
  if (o.dims.empty() && fs::exists(side)) {
    const Json j = Json::parse(read_file_bytes(side));
    d = parse_dims_json(j.at("dims"));
    if (j.contains("origin")) origin = {j["origin"][0].get<double>(), j["origin"][1].get<double>(), j["origin"][2].get<double>()};
    if (j.contains("spacing"))
      spacing = {j["spacing"][0].get<double>(), j["spacing"][1].get<double>(), j["spacing"][2].get<double>()};
    if (j.contains("format")) type = parse_value_type(j.at("format").get<std::string>());
  } else if (!o.dims.empty()) {
    d = parse_dims(o.dims);
  } else {
    throw UsageError("no sidecar " + side.string() + "; pass --dims");
  }
  check_dims(d);
  if (o.origin.size() == 3) origin = {o.origin[0], o.origin[1], o.origin[2]};
  if (o.spacing.size() == 3) spacing = {o.spacing[0], o.spacing[1], o.spacing[2]};
  return load_raw(o.volume, d, type, origin, spacing);
}

int cmd_extract(const ExtractOptions& o, unsigned threads) {
  if (o.volume.empty() == o.field.empty()) throw UsageError("give exactly one of a volume file or --field");
  const ScalarGrid grid = load_volume(o);

  ExtractionConfig cfg;
  cfg.isovalue = o.k;
  cfg.method = parse_method(o.method);
  cfg.boundary = detail::parse_boundary(o.boundary);
  cfg.threads = threads;
  if (!o.box.empty()) {
    if (o.box.size() != 6) throw UsageError("--box takes 6 values x0 y0 z0 x1 y1 z1");
    cfg.region = Box{{o.box[0], o.box[1], o.box[2]}, {o.box[3], o.box[4], o.box[5]}};
  }
  std::vector<Method> compare;
  for (const auto& m : o.compare) compare.push_back(parse_method(m));

  DetailedExtraction ex =
      compare.empty() ? extract_detailed(grid, cfg) : extract_compare_detailed(grid, cfg, std::span<const Method>(compare));
  if (o.error) add_error_channels(ex, grid, cfg);
  write_mesh(o.out, ex.mesh);

  Json summary;
  summary["output"] = o.out;
  summary["isovalue"] = o.k;
  summary["method"] = std::string(to_string(cfg.method));
  summary["mesh"] = {{"vertices", ex.mesh.vertices.size()}, {"triangles", ex.mesh.triangles.size()}};
  Json channels = Json::object();
  for (const auto& [name, values] : ex.mesh.channels) channels[name] = channel_summary_json(values, 64);
  summary["channels"] = channels;
  summary["topology"] = topology_json(topology_stats(ex.mesh));

  if (o.recover) {
    RefinementConfig rc;
    rc.subdivision = o.subdivision;
    if (o.sampler == "trilinear") rc.sampler = RefinementSampler::Trilinear;
    else if (o.sampler != "tricubic") throw UsageError("--sampler must be tricubic or trilinear");
    if (o.apply_to == "box") rc.apply_to = RefineTarget::SelectionBox;
    else if (o.apply_to != "flagged") throw UsageError("--apply-to must be flagged or box");
    rc.box = cfg.region;
    const RecoveryResult rec = extract_with_recovery(grid, cfg, rc);
    const fs::path rout = with_suffix(o.out, ".recovered");
    write_mesh(rout, rec.recovered);
    summary["features"] = feature_report_json(rec.features, &rec.report);
    summary["recovered"] = {{"output", rout.string()},
                            {"mesh", {{"vertices", rec.recovered.vertices.size()},
                                      {"triangles", rec.recovered.triangles.size()}}},
                            {"topology", topology_json(topology_stats(rec.recovered))}};
  }
  emit_json(summary, o.summary);
  if (ex.mesh.empty()) {
    std::fprintf(stderr, "warning: isosurface at k=%.17g is empty\n", o.k);
    return kExitEmpty;
  }
  return kExitOk;
}

// validate

struct ValidateOptions {
  std::string coarse;
  std::string target;
  std::string channel = "approx_error";
  std::string bound_channel = "bound_error";
  std::string out;
};

double rms_of(std::span<const double> v) { return summarize(v).rms; }

int cmd_validate(const ValidateOptions& o, unsigned threads) {
  const IndexedMesh coarse = read_ply(o.coarse);
  const IndexedMesh target = read_ply(o.target);
  auto find = [&](const std::string& name) -> const std::vector<double>* {
    auto it = coarse.channels.find(name);
    return it == coarse.channels.end() ? nullptr : &it->second;
  };
  const auto* approx = find(o.channel);
  if (!approx) throw UsageError("coarse mesh has no channel '" + o.channel + "'");
  const std::vector<double> measured = per_vertex_distance(coarse, target, threads);
  Json j;
  j["vertices"] = coarse.vertices.size();
  j["channel"] = o.channel;
  j["rms_measured"] = rms_of(measured);
  j["rms_approx"] = rms_of(*approx);
  if (const auto* bound = find(o.bound_channel)) j["rms_bound"] = rms_of(*bound);
  else j["rms_bound"] = nullptr;
  j["mean_measured"] = summarize(measured).mean;
  j["mean_approx"] = summarize(*approx).mean;
  j["max_measured"] = summarize(measured).max;
  j["spearman"] = spearman(*approx, measured);
  emit_json(j, o.out);
  return kExitOk;
}

// serve

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string blob_dir;
  std::size_t max_upload_mib = 512;
  unsigned workers = 0;
  std::string cors_origin = "*";
};

int cmd_serve(const ServeOptions& o, unsigned threads) {
  ServiceConfig sc;
  sc.blob_dir = o.blob_dir;
  sc.max_upload_bytes = o.max_upload_mib << 20;
  sc.workers = o.workers;
  sc.job_threads = threads;
  sc.cors_origin = o.cors_origin;
  ExplorerService service(sc);
  httplib::Server server;
  mount(server, service);
  std::fprintf(stderr, "listening on http://%s:%d\n", o.host.c_str(), o.port);
  if (!server.listen(o.host, o.port)) {
    std::fprintf(stderr, "error: cannot listen on %s:%d\n", o.host.c_str(), o.port);
    return kExitError;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isosurface extraction with edge-crossing uncertainty"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file pre-seeding any flag; flags win");
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = all cores)");

  SynthOptions so;
  auto* synth = app.add_subcommand("synth", "Sample an analytic field to an f32le volume plus JSON sidecar");
  synth->add_option("kind", so.kind, "tangle|torus|torus_literal|marschner_lobb|teardrop|tubey|sphere|axis_linear")->required();
  synth->add_option("dims", so.dims, "n or nx ny nz")->required()->expected(1, 3);
  synth->add_option("--domain", so.domain, "lo hi, or x0 y0 z0 x1 y1 z1")->expected(2, 6);
  synth->add_option("--param", so.params, "Field parameter override name=value");
  synth->add_option("-o,--out", so.out, "Output volume path");

  ExtractOptions eo;
  auto* extract = app.add_subcommand("extract", "Extract an isosurface to PLY/OBJ and print a JSON summary");
  extract->add_option("volume", eo.volume, "Raw volume (dims from the <stem>.json sidecar or --dims)");
  extract->add_option("--field", eo.field, "Sample an analytic field instead of reading a volume");
  extract->add_option("--dims", eo.dims, "n or nx ny nz")->expected(1, 3);
  extract->add_option("--domain", eo.domain, "Analytic domain: lo hi, or x0 y0 z0 x1 y1 z1")->expected(2, 6);
  extract->add_option("--param", eo.params, "Field parameter override name=value");
  extract->add_option("--type", eo.type, "Raw value type: u8|u16le|f32le");
  extract->add_option("--origin", eo.origin, "Grid origin x y z")->expected(3);
  extract->add_option("--spacing", eo.spacing, "Grid spacing x y z")->expected(3);
  extract->add_option("-k,--isovalue", eo.k, "Isovalue")->required();
  extract->add_option("-m,--method", eo.method, "linear|cubic|weno");
  extract->add_option("--boundary", eo.boundary, "clamp|mirror");
  extract->add_option("--box", eo.box, "Selection box x0 y0 z0 x1 y1 z1")->expected(6);
  extract->add_flag("--error", eo.error, "Attach approx_error, bound_error and error_flags channels");
  extract->add_option("--compare", eo.compare, "Methods to compare, e.g. linear,cubic,weno")->delimiter(',');
  extract->add_flag("--recover", eo.recover, "Refine flagged cells and write <out>.recovered.<ext>");
  extract->add_option("--subdivision", eo.subdivision, "Refinement factor per axis (2..8)");
  extract->add_option("--sampler", eo.sampler, "tricubic|trilinear");
  extract->add_option("--apply-to", eo.apply_to, "flagged|box");
  extract->add_option("-o,--out", eo.out, "Output mesh (.ply or .obj)");
  extract->add_option("--summary", eo.summary, "Write the JSON summary here instead of stdout");

  ValidateOptions vo;
  auto* validate = app.add_subcommand("validate", "Compare a coarse mesh's error channel with measured distance");
  validate->add_option("coarse", vo.coarse, "Coarse PLY carrying the estimate channel")->required();
  validate->add_option("target", vo.target, "Reference PLY")->required();
  validate->add_option("--channel", vo.channel, "Estimate channel name");
  validate->add_option("--bound-channel", vo.bound_channel, "Bound channel name");
  validate->add_option("-o,--out", vo.out, "Write JSON here instead of stdout");

  ServeOptions sv;
  auto* serve = app.add_subcommand("serve", "Run the explorer HTTP API");
  serve->add_option("--host", sv.host, "Bind address");
  serve->add_option("--port", sv.port, "Port");
  serve->add_option("--blob-dir", sv.blob_dir, "Directory mirroring PLY blobs");
  serve->add_option("--max-upload-mib", sv.max_upload_mib, "Upload cap in MiB");
  serve->add_option("--workers", sv.workers, "Concurrent extraction jobs (0 = cores)");
  serve->add_option("--cors-origin", sv.cors_origin, "Access-Control-Allow-Origin value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*synth) return cmd_synth(so);
    if (*extract) return cmd_extract(eo, threads);
    if (*validate) return cmd_validate(vo, threads);
    if (*serve) return cmd_serve(sv, threads);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
