#pragma once

#include "gmcr/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmcr {

class PlyError : public std::runtime_error {
 public:
  enum class Kind { io, malformed_header, unsupported_format, truncated_body, bad_value };

  /// `line` is 1-based for header/ASCII errors; `offset` is the byte
  /// offset into the binary body. Zero when not applicable.
  PlyError(Kind kind, const std::string& what, std::size_t line = 0, std::size_t offset = 0);

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::size_t offset_;
};

/// Vertex x/y/z from ASCII or binary_little_endian PLY. Any float/double
/// or integer property type is accepted for x/y/z; other properties and
/// elements are skipped.
std::vector<Vec3> parse_ply(std::istream& in);
std::vector<Vec3> parse_ply(const std::filesystem::path& path);

/// ASCII PLY with double x/y/z, 17 significant digits.
void write_ply(std::ostream& out, std::span<const Vec3> points);
void write_ply(const std::filesystem::path& path, std::span<const Vec3> points);

}  // namespace gmcr
