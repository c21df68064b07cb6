#pragma once

#include <stdexcept>
#include <string>

namespace mcuq {

/// Input file does not match the declared layout (size, header, value type).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Edge endpoints carry the same value, so no unique crossing exists.
class DegenerateEdgeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The isovalue does not lie between the edge endpoint values.
class NoCrossingError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace mcuq
