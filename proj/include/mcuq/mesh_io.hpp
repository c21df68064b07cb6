#pragma once

// Binary little-endian PLY (positions + one float property per channel) and
// OBJ with channels written to sidecar text files.

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mcuq/errors.hpp"
#include "mcuq/mesh.hpp"
#include "mcuq/raw_io.hpp"

namespace mcuq {

inline void validate_channel_name(const std::string& name) {
  if (name.empty() || name.size() > 31) throw std::invalid_argument("channel name must have 1..31 characters: '" + name + "'");
  for (char c : name)
    if (static_cast<unsigned char>(c) < 0x21 || static_cast<unsigned char>(c) > 0x7e)
      throw std::invalid_argument("channel name must be printable ASCII without spaces: '" + name + "'");
}

namespace detail {

inline void put_u32(std::string& out, std::uint32_t u) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xFF));
}
inline void put_f32(std::string& out, double v) { put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

/// Serializes the mesh as binary little-endian PLY. Channels become float
/// vertex properties in name order.
inline std::string encode_ply(const IndexedMesh& mesh) {
  mesh.validate();
  for (const auto& [name, values] : mesh.channels) validate_channel_name(name);
  std::string out = "ply\nformat binary_little_endian 1.0\ncomment mcuq isosurface\n";
  out += "element vertex " + std::to_string(mesh.vertices.size()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  for (const auto& [name, values] : mesh.channels) out += "property float " + name + "\n";
  out += "element face " + std::to_string(mesh.triangles.size()) + "\n";
  out += "property list uchar int vertex_indices\nend_header\n";
  out.reserve(out.size() + mesh.vertices.size() * 4 * (3 + mesh.channels.size()) + mesh.triangles.size() * 13);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    detail::put_f32(out, mesh.vertices[v].x);
    detail::put_f32(out, mesh.vertices[v].y);
    detail::put_f32(out, mesh.vertices[v].z);
    for (const auto& [name, values] : mesh.channels) detail::put_f32(out, values[v]);
  }
  for (const auto& t : mesh.triangles) {
    out.push_back(3);
    for (auto i : t) detail::put_u32(out, i);
  }
  return out;
}

inline void write_ply(const std::filesystem::path& path, const IndexedMesh& mesh) {
  write_file_bytes(path, encode_ply(mesh));
}

/// Reads binary little-endian PLY with float/double/int/uint/uchar vertex
/// properties and a triangle face list. Properties other than x, y, z become
/// channels.
inline IndexedMesh decode_ply(std::string_view bytes) {
  const auto header_end = bytes.find("end_header\n");
  if (bytes.substr(0, 4) != "ply\n" || header_end == std::string_view::npos) throw FormatError("PLY: missing header");
  std::istringstream header(std::string(bytes.substr(0, header_end)));
  struct Prop {
    std::string name;
    std::string type;
  };
  std::vector<Prop> vprops;
  std::size_t nv = 0, nf = 0;
  std::string face_count_type, face_index_type;
  std::string line, current;
  bool binary_le = false;
  while (std::getline(header, line)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      binary_le = fmt == "binary_little_endian";
    } else if (word == "element") {
      ls >> current;
      std::size_t n = 0;
      ls >> n;
      if (current == "vertex") nv = n;
      else if (current == "face") nf = n;
      else if (n != 0) throw FormatError("PLY: unsupported element '" + current + "'");
    } else if (word == "property") {
      std::string type;
      ls >> type;
      if (type == "list") {
        ls >> face_count_type >> face_index_type;
      } else if (current == "vertex") {
        std::string name;
        ls >> name;
        vprops.push_back({name, type});
      }
    }
  }
  if (!binary_le) throw FormatError("PLY: only binary_little_endian is supported");
  auto type_size = [](const std::string& t) -> std::size_t {
    if (t == "float" || t == "float32" || t == "int" || t == "int32" || t == "uint" || t == "uint32") return 4;
    if (t == "double" || t == "float64") return 8;
    if (t == "uchar" || t == "uint8" || t == "char" || t == "int8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    throw FormatError("PLY: unsupported property type '" + t + "'");
  };
  auto read_value = [](const unsigned char* p, const std::string& t) -> double {
    if (t == "float" || t == "float32") return std::bit_cast<float>(detail::get_u32(p));
    if (t == "double" || t == "float64") {
      const std::uint64_t lo = detail::get_u32(p), hi = detail::get_u32(p + 4);
      return std::bit_cast<double>(lo | (hi << 32));
    }
    if (t == "int" || t == "int32") return static_cast<std::int32_t>(detail::get_u32(p));
    if (t == "uint" || t == "uint32") return detail::get_u32(p);
    if (t == "uchar" || t == "uint8") return p[0];
    if (t == "char" || t == "int8") return static_cast<std::int8_t>(p[0]);
    if (t == "short" || t == "int16") return static_cast<std::int16_t>(p[0] | (p[1] << 8));
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
  };

  std::size_t stride = 0;
  for (const auto& p : vprops) stride += type_size(p.type);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data()) + header_end + 11;
  const std::size_t available = bytes.size() - header_end - 11;
  if (available < nv * stride) throw FormatError("PLY: truncated vertex data");

  IndexedMesh mesh;
  mesh.vertices.resize(nv);
  for (const auto& p : vprops)
    if (p.name != "x" && p.name != "y" && p.name != "z") mesh.channels[p.name].resize(nv);
  std::size_t off = 0;
  for (std::size_t v = 0; v < nv; ++v)
    for (const auto& p : vprops) {
      const double val = read_value(data + off, p.type);
      off += type_size(p.type);
      if (p.name == "x") mesh.vertices[v].x = val;
      else if (p.name == "y") mesh.vertices[v].y = val;
      else if (p.name == "z") mesh.vertices[v].z = val;
      else mesh.channels[p.name][v] = val;
    }
  if (nf > 0) {
    const std::size_t cs = type_size(face_count_type), is = type_size(face_index_type);
    for (std::size_t f = 0; f < nf; ++f) {
      if (off + cs > available) throw FormatError("PLY: truncated face data");
      const auto n = static_cast<std::size_t>(read_value(data + off, face_count_type));
      off += cs;
      if (off + n * is > available) throw FormatError("PLY: truncated face data");
      if (n != 3) throw FormatError("PLY: only triangle faces are supported");
      Triangle t{};
      for (std::size_t q = 0; q < 3; ++q) {
        t[q] = static_cast<std::uint32_t>(read_value(data + off, face_index_type));
        off += is;
      }
      mesh.triangles.push_back(t);
    }
  }
  try {
    mesh.validate();
  } catch (const std::logic_error& e) {
    throw FormatError(std::string("PLY: ") + e.what());
  }
  return mesh;
}

inline IndexedMesh read_ply(const std::filesystem::path& path) { return decode_ply(read_file_bytes(path)); }

/// Writes positions and faces to `path`; each channel goes to
/// `<stem>.<channel>.txt` next to it, one value per line.
inline void write_obj(const std::filesystem::path& path, const IndexedMesh& mesh) {
  mesh.validate();
  std::string out;
  char buf[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
    out += buf;
  }
  for (const auto& t : mesh.triangles) {
    std::snprintf(buf, sizeof buf, "f %u %u %u\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out += buf;
  }
  write_file_bytes(path, out);
  for (const auto& [name, values] : mesh.channels) {
    validate_channel_name(name);
    std::string text;
    for (double v : values) {
      std::snprintf(buf, sizeof buf, "%.17g\n", v);
      text += buf;
    }
    auto side = path;
    side.replace_extension();
    write_file_bytes(side.string() + "." + name + ".txt", text);
  }
}

}  // namespace mcuq
