#pragma once

// Explorer service: field registry, cached extraction reports, CDF queries
// and PLY blobs. Transport independent; see service_http.hpp for the
// HTTP binding.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "mcuq/extractor.hpp"
#include "mcuq/features.hpp"
#include "mcuq/mesh_io.hpp"
#include "mcuq/metrics.hpp"
#include "mcuq/raw_io.hpp"
#include "mcuq/report.hpp"
#include "mcuq/uncertainty.hpp"

namespace mcuq {

struct ServiceConfig {
  std::size_t max_upload_bytes = std::size_t{512} << 20;
  /// Grid node count above which /extract needs allow_large.
  std::size_t max_extract_nodes = std::size_t{256} * 256 * 256;
  /// Concurrent extraction jobs; 0 means hardware concurrency.
  unsigned workers = 0;
  /// Threads per extraction job; 0 means hardware concurrency.
  unsigned job_threads = 0;
  /// Blobs are mirrored here when non-empty.
  std::filesystem::path blob_dir;
  std::string cors_origin = "*";
  /// Isovalues farther than this fraction of the value range outside
  /// [min, max] are rejected.
  double isovalue_slack = 0.05;
  std::size_t cdf_points = 256;
};

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  /// Header names in lower case.
  std::map<std::string, std::string> headers;
  std::string body;

  std::string header(const std::string& name) const {
    auto it = headers.find(name);
    return it == headers.end() ? std::string() : it->second;
  }
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;

  Json json() const { return Json::parse(body); }
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace detail {

struct HttpError : std::runtime_error {
  int status;
  HttpError(int s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

inline std::vector<double> parse_number_list(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string part = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    double v = 0.0;
    const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || res.ec != std::errc() || res.ptr != part.data() + part.size() || !std::isfinite(v))
      throw HttpError(400, std::string(what) + " must be " + std::to_string(expected) + " comma-separated numbers");
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.size() != expected)
    throw HttpError(400, std::string(what) + " must be " + std::to_string(expected) + " comma-separated numbers");
  return out;
}

inline BoundaryPolicy parse_boundary(const std::string& s) {
  if (s == "clamp") return BoundaryPolicy::Clamp;
  if (s == "mirror" || s == "mirror_once") return BoundaryPolicy::MirrorOnce;
  throw std::invalid_argument("unknown boundary policy '" + s + "'");
}

}  // namespace detail

class ExplorerService {
 public:
  explicit ExplorerService(ServiceConfig cfg = {})
      : cfg_(std::move(cfg)), jobs_(static_cast<std::ptrdiff_t>(std::min(resolve_thread_count(cfg_.workers), 4096u))) {
    if (!cfg_.blob_dir.empty()) std::filesystem::create_directories(cfg_.blob_dir);
  }

  const ServiceConfig& config() const { return cfg_; }

  /// Routes a request. Never throws.
  Response handle(const Request& req) {
    Response r;
    try {
      r = route(req);
    } catch (const detail::HttpError& e) {
      r = error(e.status, e.what());
    } catch (const Json::exception& e) {
      r = error(400, std::string("malformed JSON: ") + e.what());
    } catch (const std::exception& e) {
      r = error(500, e.what());
    }
    r.headers["Access-Control-Allow-Origin"] = cfg_.cors_origin;
    r.headers["Access-Control-Allow-Methods"] = "GET, POST, OPTIONS";
    r.headers["Access-Control-Allow-Headers"] = "Content-Type, Idempotency-Key";
    r.headers["Access-Control-Expose-Headers"] = "X-Cache";
    return r;
  }

  std::size_t field_count() const {
    std::shared_lock lock(mutex_);
    return fields_.size();
  }

  std::size_t extraction_runs() const { return runs_.load(); }

 private:
  struct FieldEntry {
    std::string id;
    Json source;
    std::shared_ptr<const ScalarGrid> grid;
  };

  struct StoredReport {
    std::string body;
    std::map<std::string, std::vector<double>> channels;
  };

  static Response json_response(int status, const Json& j) { return {status, "application/json", dump_json(j), {}}; }

  static Response error(int status, const std::string& message) {
    return json_response(status, {{"error", {{"status", status}, {"message", message}}}});
  }

  static bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

  Response route(const Request& req) {
    const std::string& p = req.path;
    const std::string& m = req.method;
    if (m == "OPTIONS") return {204, "text/plain", "", {}};
    auto only = [&](const char* allowed) {
      if (m != allowed) throw detail::HttpError(405, "method " + m + " not allowed on " + p);
    };
    if (p == "/fields") {
      if (m == "GET") return list_fields();
      only("POST");
      return post_fields(req);
    }
    if (starts_with(p, "/fields/")) {
      only("GET");
      return get_field(p.substr(8));
    }
    if (p == "/extract") {
      only("POST");
      return post_extract(req.body);
    }
    if (starts_with(p, "/reports/")) {
      only("GET");
      return get_report(p.substr(9));
    }
    if (starts_with(p, "/cdf/")) {
      only("GET");
      return get_cdf(p.substr(5), req.query);
    }
    if (starts_with(p, "/blobs/")) {
      only("GET");
      return get_blob(p.substr(7));
    }
    if (p == "/spec") {
      only("GET");
      return json_response(200, openapi());
    }
    if (p == "/health") {
      only("GET");
      return json_response(200, {{"status", "ok"}});
    }
    throw detail::HttpError(404, "no route for " + p);
  }

  // Fields

  static Json handle_json(const FieldEntry& f) {
    const ScalarGrid& g = *f.grid;
    const Dims d = g.dims();
    return {{"id", f.id},
            {"source", f.source},
            {"dims", {d.nx, d.ny, d.nz}},
            {"origin", {g.origin().x, g.origin().y, g.origin().z}},
            {"spacing", {g.spacing().x, g.spacing().y, g.spacing().z}},
            {"value_range", {g.min_value(), g.max_value()}}};
  }

  Response post_fields(const Request& req) {
    if (req.body.size() > cfg_.max_upload_bytes)
      throw detail::HttpError(413, "payload of " + std::to_string(req.body.size()) + " bytes exceeds the cap of " +
                                       std::to_string(cfg_.max_upload_bytes));
    const std::string key = req.header("idempotency-key");
    if (!key.empty()) {
      std::shared_lock lock(mutex_);
      if (auto it = idempotency_.find(key); it != idempotency_.end())
        return json_response(200, handle_json(*fields_.at(it->second)));
    }

    Json source;
    std::shared_ptr<const ScalarGrid> grid;
    const std::string ctype = req.header("content-type");
    if (starts_with(ctype, "application/octet-stream")) {
      auto q = [&](const char* name) {
        auto it = req.query.find(name);
        return it == req.query.end() ? std::string() : it->second;
      };
      if (q("dims").empty()) throw detail::HttpError(400, "raw upload needs ?dims=nx,ny,nz");
      const auto dv = detail::parse_number_list(q("dims"), 3, "dims");
      for (double v : dv)
        if (v < 2 || v != std::floor(v)) throw detail::HttpError(400, "dims must be integers >= 2");
      const Dims dims{static_cast<std::size_t>(dv[0]), static_cast<std::size_t>(dv[1]), static_cast<std::size_t>(dv[2])};
      Vec3 origin{}, spacing{1.0, 1.0, 1.0};
      if (!q("origin").empty()) {
        const auto o = detail::parse_number_list(q("origin"), 3, "origin");
        origin = {o[0], o[1], o[2]};
      }
      if (!q("spacing").empty()) {
        const auto s = detail::parse_number_list(q("spacing"), 3, "spacing");
        spacing = {s[0], s[1], s[2]};
      }
      try {
        grid = std::make_shared<const ScalarGrid>(decode_raw(req.body, dims, ValueType::F32LE, origin, spacing));
      } catch (const std::exception& e) {
        throw detail::HttpError(400, e.what());
      }
      source = {{"type", "raw"},
                {"format", "f32le"},
                {"bytes", req.body.size()},
                {"checksum", hex64(fnv1a64(req.body))}};
    } else {
      const Json body = Json::parse(req.body);
      FieldSpec spec;
      try {
        spec = parse_field_spec(body);
      } catch (const Json::exception& e) {
        throw detail::HttpError(400, std::string("invalid field spec: ") + e.what());
      } catch (const std::invalid_argument& e) {
        throw detail::HttpError(400, std::string("invalid field spec: ") + e.what());
      }
      const std::size_t nodes = spec.dims.count();
      if (nodes / spec.dims.nx / spec.dims.ny != spec.dims.nz || nodes > cfg_.max_upload_bytes / 4)
        throw detail::HttpError(413, "field of " + std::to_string(nodes) + " samples exceeds the size cap");
      grid = std::make_shared<const ScalarGrid>(sample_to_grid(spec.field, spec.dims, spec.domain));
      source = field_spec_json(spec);
      source["type"] = "analytic";
    }

    std::unique_lock lock(mutex_);
    if (!key.empty()) {
      if (auto it = idempotency_.find(key); it != idempotency_.end())
        return json_response(200, handle_json(*fields_.at(it->second)));
    }
    char id[32];
    std::snprintf(id, sizeof id, "field-%04zu", fields_.size() + 1);
    auto entry = std::make_shared<const FieldEntry>(FieldEntry{id, source, std::move(grid)});
    fields_[entry->id] = entry;
    order_.push_back(entry->id);
    if (!key.empty()) idempotency_[key] = entry->id;
    Response r = json_response(201, handle_json(*entry));
    r.headers["Location"] = "/fields/" + entry->id;
    return r;
  }

  Response list_fields() const {
    std::shared_lock lock(mutex_);
    Json arr = Json::array();
    for (const auto& id : order_) arr.push_back(handle_json(*fields_.at(id)));
    return json_response(200, {{"fields", arr}});
  }

  Response get_field(const std::string& id) const {
    return json_response(200, handle_json(*find_field(id)));
  }

  std::shared_ptr<const FieldEntry> find_field(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = fields_.find(id);
    if (it == fields_.end()) throw detail::HttpError(404, "unknown field '" + id + "'");
    return it->second;
  }

  // Extraction

  struct ExtractRequest {
    std::string field_id;
    ExtractionConfig cfg;
    std::vector<Method> compare;
    bool error = false;
    std::optional<RefinementConfig> recover;
    bool allow_large = false;
  };

  static Method parse_method_422(const Json& j) {
    if (!j.is_string()) throw detail::HttpError(422, "method must be a string");
    try {
      return parse_method(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw detail::HttpError(422, e.what());
    }
  }

  static ExtractRequest parse_extract(const Json& j) {
    if (!j.is_object()) throw detail::HttpError(400, "request body must be a JSON object");
    ExtractRequest r;
    if (!j.contains("field_id") || !j.at("field_id").is_string()) throw detail::HttpError(400, "field_id (string) is required");
    r.field_id = j.at("field_id").get<std::string>();
    if (!j.contains("k") || !j.at("k").is_number()) throw detail::HttpError(400, "k (number) is required");
    r.cfg.isovalue = j.at("k").get<double>();
    if (j.contains("method")) r.cfg.method = parse_method_422(j.at("method"));
    if (j.contains("box") && !j.at("box").is_null()) {
      try {
        r.cfg.region = parse_box_json(j.at("box"));
      } catch (const std::exception& e) {
        throw detail::HttpError(422, std::string("invalid box: ") + e.what());
      }
    }
    if (j.contains("boundary")) {
      try {
        r.cfg.boundary = detail::parse_boundary(j.at("boundary").get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw detail::HttpError(422, e.what());
      }
    }
    if (j.contains("error")) r.error = j.at("error").get<bool>();
    if (j.contains("allow_large")) r.allow_large = j.at("allow_large").get<bool>();
    if (j.contains("compare") && !j.at("compare").is_null()) {
      const Json& c = j.at("compare");
      if (!c.is_array() || c.empty()) throw detail::HttpError(422, "compare must be a non-empty array of methods");
      for (const auto& m : c) r.compare.push_back(parse_method_422(m));
    }
    if (j.contains("recover")) {
      const Json& rec = j.at("recover");
      if (rec.is_boolean()) {
        if (rec.get<bool>()) r.recover = RefinementConfig{};
      } else if (rec.is_object()) {
        RefinementConfig rc;
        if (rec.contains("subdivision")) rc.subdivision = rec.at("subdivision").get<int>();
        if (rec.contains("sampler")) {
          const auto s = rec.at("sampler").get<std::string>();
          if (s == "tricubic") rc.sampler = RefinementSampler::Tricubic;
          else if (s == "trilinear") rc.sampler = RefinementSampler::Trilinear;
          else throw detail::HttpError(422, "unknown sampler '" + s + "'");
        }
        if (rec.contains("apply_to")) {
          const auto s = rec.at("apply_to").get<std::string>();
          if (s == "flagged") rc.apply_to = RefineTarget::FlaggedCells;
          else if (s == "box") rc.apply_to = RefineTarget::SelectionBox;
          else throw detail::HttpError(422, "apply_to must be 'flagged' or 'box'");
        }
        r.recover = rc;
      } else if (!rec.is_null()) {
        throw detail::HttpError(422, "recover must be a boolean or an object");
      }
      if (r.recover) {
        r.recover->box = r.cfg.region;
        try {
          r.recover->validate();
        } catch (const std::invalid_argument& e) {
          throw detail::HttpError(422, e.what());
        }
      }
    }
    return r;
  }

  Response post_extract(const std::string& body) {
    const Json j = Json::parse(body);
    const std::string canonical = j.dump();
    const std::string report_id = "r" + hex64(fnv1a64(canonical));
    {
      std::shared_lock lock(mutex_);
      if (auto it = reports_.find(report_id); it != reports_.end()) {
        Response r{200, "application/json", it->second->body, {}};
        r.headers["X-Cache"] = "hit";
        return r;
      }
    }

    ExtractRequest req = parse_extract(j);
    const auto field = find_field(req.field_id);
    const ScalarGrid& grid = *field->grid;
    if (grid.dims().count() > cfg_.max_extract_nodes && !req.allow_large)
      throw detail::HttpError(422, "grid exceeds the desk-scale cap; pass allow_large=true");
    if (!std::isfinite(req.cfg.isovalue)) throw detail::HttpError(422, "k must be finite");
    const double range = grid.max_value() - grid.min_value();
    const double slack = cfg_.isovalue_slack * (range > 0.0 ? range : std::max(1.0, grid.max_abs()));
    if (req.cfg.isovalue < grid.min_value() - slack || req.cfg.isovalue > grid.max_value() + slack)
      throw detail::HttpError(422, "k outside the field value range");
    if (req.cfg.region && !req.cfg.region->intersects(grid.bounds()))
      throw detail::HttpError(422, "box does not intersect the grid");
    req.cfg.threads = cfg_.job_threads;

    auto stored = std::make_shared<StoredReport>();
    {
      jobs_.acquire();
      struct Release {
        std::counting_semaphore<4096>& s;
        ~Release() { s.release(); }
      } release{jobs_};
      ++runs_;
      stored->body = run_extract(req, j, report_id, stored->channels);
    }

    std::unique_lock lock(mutex_);
    auto [it, inserted] = reports_.emplace(report_id, stored);
    Response r{200, "application/json", it->second->body, {}};
    r.headers["X-Cache"] = inserted ? "miss" : "hit";
    return r;
  }

  std::string run_extract(const ExtractRequest& req, const Json& request_json, const std::string& report_id,
                          std::map<std::string, std::vector<double>>& channels_out) {
    const ScalarGrid& grid = *field_grid(req.field_id);
    const auto t0 = std::chrono::steady_clock::now();
    DetailedExtraction ex = req.compare.empty()
                                ? extract_detailed(grid, req.cfg)
                                : extract_compare_detailed(grid, req.cfg, std::span<const Method>(req.compare));
    if (req.error) add_error_channels(ex, grid, req.cfg);

    Json report;
    report["report_id"] = report_id;
    report["field_id"] = req.field_id;
    report["request"] = request_json;

    std::optional<RecoveryResult> rec;
    if (req.recover) rec = extract_with_recovery(grid, req.cfg, *req.recover);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    const std::string blob = encode_ply(ex.mesh);
    const std::string blob_id = store_blob(blob);
    report["blob_id"] = blob_id;
    report["blob_url"] = "/blobs/" + blob_id;
    report["mesh"] = {{"vertices", ex.mesh.vertices.size()}, {"triangles", ex.mesh.triangles.size()}};
    Json channels = Json::object();
    for (const auto& [name, values] : ex.mesh.channels) channels[name] = channel_summary_json(values, cfg_.cdf_points);
    report["channels"] = channels;
    report["topology"] = topology_json(topology_stats(ex.mesh));
    if (rec) {
      const std::string rblob = encode_ply(rec->recovered);
      const std::string rid = store_blob(rblob);
      report["features"] = feature_report_json(rec->features, &rec->report);
      report["recovered"] = {{"blob_id", rid},
                             {"blob_url", "/blobs/" + rid},
                             {"mesh", {{"vertices", rec->recovered.vertices.size()},
                                       {"triangles", rec->recovered.triangles.size()}}},
                             {"topology", topology_json(topology_stats(rec->recovered))}};
    }
    report["timing_ms"] = ms;
    channels_out = std::move(ex.mesh.channels);
    return dump_json(report);
  }

  std::shared_ptr<const ScalarGrid> field_grid(const std::string& id) const { return find_field(id)->grid; }

  std::string store_blob(const std::string& bytes) {
    const std::string id = "b" + hex64(fnv1a64(bytes));
    auto shared = std::make_shared<const std::string>(bytes);
    {
      std::unique_lock lock(mutex_);
      if (!blobs_.emplace(id, shared).second) return id;
    }
    if (!cfg_.blob_dir.empty()) write_file_bytes(cfg_.blob_dir / (id + ".ply"), bytes);
    return id;
  }

  Response get_report(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = reports_.find(id);
    if (it == reports_.end()) throw detail::HttpError(404, "unknown report '" + id + "'");
    return {200, "application/json", it->second->body, {}};
  }

  Response get_cdf(const std::string& id, const std::map<std::string, std::string>& query) const {
    std::shared_ptr<const StoredReport> rep;
    {
      std::shared_lock lock(mutex_);
      auto it = reports_.find(id);
      if (it == reports_.end()) throw detail::HttpError(404, "unknown report '" + id + "'");
      rep = it->second;
    }
    auto qit = query.find("channel");
    const std::string channel = qit == query.end() ? "approx_error" : qit->second;
    auto cit = rep->channels.find(channel);
    if (cit == rep->channels.end()) throw detail::HttpError(404, "report has no channel '" + channel + "'");
    std::size_t points = cfg_.cdf_points;
    if (auto pit = query.find("points"); pit != query.end())
      points = static_cast<std::size_t>(detail::parse_number_list(pit->second, 1, "points")[0]);
    Json out{{"report_id", id},
             {"channel", channel},
             {"count", cit->second.size()},
             {"cdf", cdf_json(cdf(cit->second), points)}};
    if (auto tit = query.find("threshold"); tit != query.end()) {
      const double t = detail::parse_number_list(tit->second, 1, "threshold")[0];
      out["threshold"] = t;
      out["fraction_above"] = fraction_above(cit->second, t);
    } else {
      out["threshold"] = nullptr;
      out["fraction_above"] = nullptr;
    }
    return json_response(200, out);
  }

  Response get_blob(const std::string& id) const {
    {
      std::shared_lock lock(mutex_);
      if (auto it = blobs_.find(id); it != blobs_.end()) return {200, "application/octet-stream", *it->second, {}};
    }
    if (!cfg_.blob_dir.empty() && id.find_first_of("/\\.") == std::string::npos) {
      const auto path = cfg_.blob_dir / (id + ".ply");
      if (std::filesystem::exists(path)) return {200, "application/octet-stream", read_file_bytes(path), {}};
    }
    throw detail::HttpError(404, "unknown blob '" + id + "'");
  }

 public:
  /// OpenAPI 3.0 description of the routes.
  static Json openapi() {
    auto err = [](const char* d) { return Json{{"description", d}}; };
    auto ok_json = [](const char* d) {
      return Json{{"description", d}, {"content", {{"application/json", {{"schema", {{"type", "object"}}}}}}}};
    };
    Json paths;
    paths["/fields"]["get"] = {{"summary", "List registered fields"}, {"responses", {{"200", ok_json("Field handles")}}}};
    paths["/fields"]["post"] = {
        {"summary", "Register an analytic field or upload a raw f32le volume"},
        {"parameters",
         {{{"name", "Idempotency-Key"}, {"in", "header"}, {"required", false}, {"schema", {{"type", "string"}}}},
          {{"name", "dims"}, {"in", "query"}, {"required", false}, {"schema", {{"type", "string"}}},
           {"description", "nx,ny,nz for raw uploads"}},
          {{"name", "origin"}, {"in", "query"}, {"required", false}, {"schema", {{"type", "string"}}}},
          {{"name", "spacing"}, {"in", "query"}, {"required", false}, {"schema", {{"type", "string"}}}}}},
        {"requestBody",
         {{"required", true},
          {"content",
           {{"application/json",
             {{"schema",
               {{"type", "object"},
                {"required", {"kind", "dims"}},
                {"properties",
                 {{"kind", {{"type", "string"}}},
                  {"params", {{"type", "object"}}},
                  {"dims", {{"type", "array"}, {"items", {{"type", "integer"}}}}},
                  {"domain", {{"type", "array"}}}}}}}}},
            {"application/octet-stream", {{"schema", {{"type", "string"}, {"format", "binary"}}}}}}}}},
        {"responses",
         {{"201", ok_json("Registered field handle")},
          {"200", ok_json("Existing handle for a repeated idempotency key")},
          {"400", err("Malformed spec or payload size mismatch")},
          {"413", err("Payload too large")}}}};
    paths["/fields/{id}"]["get"] = {{"summary", "Field handle"},
                                    {"responses", {{"200", ok_json("Field handle")}, {"404", err("Unknown field")}}}};
    paths["/extract"]["post"] = {
        {"summary", "Extract an isosurface and build a report"},
        {"requestBody",
         {{"required", true},
          {"content",
           {{"application/json",
             {{"schema",
               {{"type", "object"},
                {"required", {"field_id", "k"}},
                {"properties",
                 {{"field_id", {{"type", "string"}}},
                  {"k", {{"type", "number"}}},
                  {"method", {{"type", "string"}, {"enum", {"linear", "cubic", "weno"}}}},
                  {"box", {{"type", "object"}}},
                  {"boundary", {{"type", "string"}, {"enum", {"clamp", "mirror"}}}},
                  {"error", {{"type", "boolean"}}},
                  {"compare", {{"type", "array"}, {"items", {{"type", "string"}}}}},
                  {"recover", {{"oneOf", {{{"type", "boolean"}}, {{"type", "object"}}}}}},
                  {"allow_large", {{"type", "boolean"}}}}}}}}}}}}},
        {"responses",
         {{"200", ok_json("Extraction report")},
          {"400", err("Malformed request")},
          {"404", err("Unknown field")},
          {"422", err("Invalid method, box, isovalue or size")}}}};
    paths["/reports/{id}"]["get"] = {{"summary", "Stored extraction report"},
                                     {"responses", {{"200", ok_json("Report")}, {"404", err("Unknown report")}}}};
    paths["/cdf/{id}"]["get"] = {
        {"summary", "Cumulative distribution of a channel and the share above a threshold"},
        {"parameters",
         {{{"name", "channel"}, {"in", "query"}, {"schema", {{"type", "string"}}}},
          {{"name", "threshold"}, {"in", "query"}, {"schema", {{"type", "number"}}}},
          {{"name", "points"}, {"in", "query"}, {"schema", {{"type", "integer"}}}}}},
        {"responses", {{"200", ok_json("CDF")}, {"404", err("Unknown report or channel")}}}};
    paths["/blobs/{id}"]["get"] = {
        {"summary", "Binary PLY mesh"},
        {"responses",
         {{"200", {{"description", "PLY"},
                   {"content", {{"application/octet-stream", {{"schema", {{"type", "string"}, {"format", "binary"}}}}}}}}},
          {"404", err("Unknown blob")}}}};
    paths["/spec"]["get"] = {{"summary", "This document"}, {"responses", {{"200", ok_json("OpenAPI document")}}}};
    paths["/health"]["get"] = {{"summary", "Liveness"}, {"responses", {{"200", ok_json("ok")}}}};
    return {{"openapi", "3.0.3"},
            {"info", {{"title", "mcuq explorer service"}, {"version", "1.0.0"}}},
            {"paths", paths}};
  }

 private:
  ServiceConfig cfg_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const FieldEntry>> fields_;
  std::vector<std::string> order_;
  std::map<std::string, std::string> idempotency_;
  std::map<std::string, std::shared_ptr<const StoredReport>> reports_;
  std::map<std::string, std::shared_ptr<const std::string>> blobs_;
  std::counting_semaphore<4096> jobs_;
  std::atomic<std::size_t> runs_{0};
};

}  // namespace mcuq
