#pragma once

// Headerless raw volumes. Layout is x-fastest; dims and value type travel
// out-of-band (CLI flags, JSON sidecar, API fields). Samples are converted to
// double without any rescaling.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "mcuq/errors.hpp"
#include "mcuq/volume.hpp"

namespace mcuq {

enum class ValueType : std::uint8_t { U8, U16LE, F32LE };

constexpr std::size_t value_size(ValueType t) {
  switch (t) {
    case ValueType::U8: return 1;
    case ValueType::U16LE: return 2;
    case ValueType::F32LE: return 4;
  }
  return 0;
}

inline std::string_view to_string(ValueType t) {
  switch (t) {
    case ValueType::U8: return "u8";
    case ValueType::U16LE: return "u16le";
    case ValueType::F32LE: return "f32le";
  }
  return "unknown";
}

inline ValueType parse_value_type(std::string_view s) {
  if (s == "u8" || s == "uint8") return ValueType::U8;
  if (s == "u16le" || s == "u16" || s == "uint16") return ValueType::U16LE;
  if (s == "f32le" || s == "f32" || s == "float") return ValueType::F32LE;
  throw std::invalid_argument("unknown value type '" + std::string(s) + "'");
}

/// Decodes a raw byte buffer. Spacing defaults to 1 and origin to 0.
inline ScalarGrid decode_raw(std::string_view bytes, Dims dims, ValueType type, Vec3 origin = {},
                             Vec3 spacing = {1.0, 1.0, 1.0}) {
  const std::size_t expected = dims.count() * value_size(type);
  if (dims.count() == 0) throw FormatError("raw volume: dimensions must be positive");
  if (bytes.size() != expected)
    throw FormatError("raw volume: expected " + std::to_string(expected) + " bytes for " + std::to_string(dims.nx) +
                      "x" + std::to_string(dims.ny) + "x" + std::to_string(dims.nz) + " " +
                      std::string(to_string(type)) + ", got " + std::to_string(bytes.size()));
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  std::vector<double> data(dims.count());
  for (std::size_t n = 0; n < data.size(); ++n) {
    switch (type) {
      case ValueType::U8: data[n] = p[n]; break;
      case ValueType::U16LE:
        data[n] = static_cast<double>(static_cast<std::uint16_t>(p[2 * n] | (p[2 * n + 1] << 8)));
        break;
      case ValueType::F32LE: {
        const std::uint32_t u = static_cast<std::uint32_t>(p[4 * n]) | (static_cast<std::uint32_t>(p[4 * n + 1]) << 8) |
                                (static_cast<std::uint32_t>(p[4 * n + 2]) << 16) |
                                (static_cast<std::uint32_t>(p[4 * n + 3]) << 24);
        data[n] = static_cast<double>(std::bit_cast<float>(u));
        break;
      }
    }
  }
  try {
    return ScalarGrid(dims, origin, spacing, std::move(data));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("raw volume: ") + e.what());
  }
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline ScalarGrid load_raw(const std::filesystem::path& path, Dims dims, ValueType type, Vec3 origin = {},
                           Vec3 spacing = {1.0, 1.0, 1.0}) {
  return decode_raw(read_file_bytes(path), dims, type, origin, spacing);
}

/// Encodes samples in the given type. Values are rounded and range-checked
/// for the integer types.
inline std::string encode_raw(const ScalarGrid& grid, ValueType type) {
  std::string out;
  out.reserve(grid.data().size() * value_size(type));
  for (double v : grid.data()) {
    switch (type) {
      case ValueType::U8: {
        const double r = std::round(v);
        if (r < 0.0 || r > 255.0) throw std::out_of_range("encode_raw: value out of u8 range");
        out.push_back(static_cast<char>(static_cast<unsigned char>(r)));
        break;
      }
      case ValueType::U16LE: {
        const double r = std::round(v);
        if (r < 0.0 || r > 65535.0) throw std::out_of_range("encode_raw: value out of u16 range");
        const auto u = static_cast<std::uint16_t>(r);
        out.push_back(static_cast<char>(u & 0xFF));
        out.push_back(static_cast<char>(u >> 8));
        break;
      }
      case ValueType::F32LE: {
        const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xFF));
        break;
      }
    }
  }
  return out;
}

inline void write_raw(const std::filesystem::path& path, const ScalarGrid& grid, ValueType type) {
  write_file_bytes(path, encode_raw(grid, type));
}

}  // namespace mcuq
