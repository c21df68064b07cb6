#pragma once

// Mounts an ExplorerService on a cpp-httplib server.

#include <algorithm>
#include <cctype>
#include <string>

#include <httplib.h>

#include "mcuq/service.hpp"

namespace mcuq {

inline Request to_service_request(const httplib::Request& in) {
  Request r;
  r.method = in.method;
  r.path = in.path;
  for (const auto& [k, v] : in.params) r.query.emplace(k, v);
  for (const auto& [k, v] : in.headers) {
    std::string lower = k;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    r.headers.emplace(std::move(lower), v);
  }
  r.body = in.body;
  return r;
}

inline void to_httplib_response(const Response& in, httplib::Response& out) {
  out.status = in.status;
  for (const auto& [k, v] : in.headers) out.set_header(k, v);
  if (in.status != 204) out.set_content(in.body, in.content_type);
}

/// Routes every GET/POST/OPTIONS path through the service. Payloads beyond
/// the upload cap are rejected by httplib with 413 before they are buffered.
inline void mount(httplib::Server& server, ExplorerService& service) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    to_httplib_response(service.handle(to_service_request(req)), res);
  };
  server.set_payload_max_length(service.config().max_upload_bytes);
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Options(".*", handler);
}

}  // namespace mcuq
