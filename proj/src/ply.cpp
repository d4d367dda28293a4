#include "gmcr/ply.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

namespace gmcr {

PlyError::PlyError(Kind kind, const std::string& what, std::size_t line, std::size_t offset)
    : std::runtime_error(what), kind_(kind), line_(line), offset_(offset) {}

namespace {

enum class Type { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<Type> parse_type(const std::string& s) {
  if (s == "char" || s == "int8") return Type::i8;
  if (s == "uchar" || s == "uint8") return Type::u8;
  if (s == "short" || s == "int16") return Type::i16;
  if (s == "ushort" || s == "uint16") return Type::u16;
  if (s == "int" || s == "int32") return Type::i32;
  if (s == "uint" || s == "uint32") return Type::u32;
  if (s == "float" || s == "float32") return Type::f32;
  if (s == "double" || s == "float64") return Type::f64;
  return std::nullopt;
}

std::size_t type_size(Type t) {
  switch (t) {
    case Type::i8:
    case Type::u8:
      return 1;
    case Type::i16:
    case Type::u16:
      return 2;
    case Type::i32:
    case Type::u32:
    case Type::f32:
      return 4;
    case Type::f64:
      return 8;
  }
  return 0;
}

struct Property {
  std::string name;
  Type type;
  bool is_list = false;
  Type count_type = Type::u8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> props;
};

enum class Format { ascii, binary_le };

struct Header {
  Format format = Format::ascii;
  std::vector<Element> elements;
  std::size_t lines = 0;
};

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

Header read_header(std::istream& in) {
  Header h;
  std::string line;
  auto next = [&]() {
    if (!std::getline(in, line))
      throw PlyError(PlyError::Kind::malformed_header, "PLY: header ends before end_header",
                     h.lines + 1);
    ++h.lines;
    strip_cr(line);
  };
  next();
  if (line != "ply") throw PlyError(PlyError::Kind::malformed_header, "PLY: missing magic", 1);
  bool have_format = false;
  for (;;) {
    next();
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw.empty() || kw == "comment" || kw == "obj_info") continue;
    if (kw == "end_header") break;
    if (kw == "format") {
      std::string fmt, ver;
      ss >> fmt >> ver;
      if (fmt == "ascii") {
        h.format = Format::ascii;
      } else if (fmt == "binary_little_endian") {
        h.format = Format::binary_le;
      } else if (fmt == "binary_big_endian") {
        throw PlyError(PlyError::Kind::unsupported_format, "PLY: binary_big_endian is not supported",
                       h.lines);
      } else {
        throw PlyError(PlyError::Kind::malformed_header, "PLY: unknown format '" + fmt + "'", h.lines);
      }
      have_format = true;
    } else if (kw == "element") {
      Element e;
      long long count = -1;
      ss >> e.name >> count;
      if (e.name.empty() || !ss || count < 0)
        throw PlyError(PlyError::Kind::malformed_header, "PLY: bad element line", h.lines);
      e.count = static_cast<std::size_t>(count);
      h.elements.push_back(std::move(e));
    } else if (kw == "property") {
      if (h.elements.empty())
        throw PlyError(PlyError::Kind::malformed_header, "PLY: property before element", h.lines);
      std::string t1;
      ss >> t1;
      Property p;
      if (t1 == "list") {
        std::string ct, it;
        ss >> ct >> it >> p.name;
        const auto c = parse_type(ct);
        const auto i = parse_type(it);
        if (!c || !i || p.name.empty())
          throw PlyError(PlyError::Kind::malformed_header, "PLY: bad list property", h.lines);
        p.is_list = true;
        p.count_type = *c;
        p.type = *i;
      } else {
        const auto t = parse_type(t1);
        ss >> p.name;
        if (!t || p.name.empty())
          throw PlyError(PlyError::Kind::malformed_header, "PLY: bad property '" + t1 + "'", h.lines);
        p.type = *t;
      }
      h.elements.back().props.push_back(std::move(p));
    } else {
      throw PlyError(PlyError::Kind::malformed_header, "PLY: unexpected header keyword '" + kw + "'",
                     h.lines);
    }
  }
  if (!have_format) throw PlyError(PlyError::Kind::malformed_header, "PLY: missing format line", h.lines);
  return h;
}

double decode(Type t, const unsigned char* p) {
  auto get = [&](auto v) {
    std::memcpy(&v, p, sizeof v);
    return static_cast<double>(v);
  };
  switch (t) {
    case Type::i8: return get(std::int8_t{});
    case Type::u8: return get(std::uint8_t{});
    case Type::i16: return get(std::int16_t{});
    case Type::u16: return get(std::uint16_t{});
    case Type::i32: return get(std::int32_t{});
    case Type::u32: return get(std::uint32_t{});
    case Type::f32: return get(float{});
    case Type::f64: return get(double{});
  }
  return 0.0;
}

struct XyzSlots {
  int x = -1, y = -1, z = -1;
};

XyzSlots find_xyz(const Element& e) {
  XyzSlots s;
  for (std::size_t k = 0; k < e.props.size(); ++k) {
    const auto& p = e.props[k];
    if (p.is_list) continue;
    if (p.name == "x") s.x = static_cast<int>(k);
    if (p.name == "y") s.y = static_cast<int>(k);
    if (p.name == "z") s.z = static_cast<int>(k);
  }
  return s;
}

std::vector<Vec3> read_ascii(std::istream& in, const Header& h) {
  std::vector<Vec3> out;
  std::size_t line_no = h.lines;
  std::string line;
  for (const auto& e : h.elements) {
    const bool is_vertex = e.name == "vertex";
    const XyzSlots slots = is_vertex ? find_xyz(e) : XyzSlots{};
    if (is_vertex) out.reserve(e.count);
    for (std::size_t item = 0; item < e.count; ++item) {
      do {
        if (!std::getline(in, line))
          throw PlyError(PlyError::Kind::truncated_body,
                         "PLY: body ends early in element '" + e.name + "' (" + std::to_string(item) +
                             " of " + std::to_string(e.count) + ")",
                         line_no + 1);
        ++line_no;
        strip_cr(line);
      } while (line.find_first_not_of(" \t") == std::string::npos);
      if (!is_vertex) continue;
      std::istringstream ss(line);
      Vec3 v = Vec3::Zero();
      for (std::size_t k = 0; k < e.props.size(); ++k) {
        const auto& p = e.props[k];
        std::size_t n_values = 1;
        if (p.is_list) {
          double cnt;
          if (!(ss >> cnt))
            throw PlyError(PlyError::Kind::bad_value, "PLY: missing list count", line_no);
          n_values = static_cast<std::size_t>(cnt);
        }
        for (std::size_t m = 0; m < n_values; ++m) {
          std::string tok;
          if (!(ss >> tok))
            throw PlyError(PlyError::Kind::bad_value, "PLY: too few values on vertex line", line_no);
          if (p.is_list) continue;
          const int ik = static_cast<int>(k);
          if (ik == slots.x || ik == slots.y || ik == slots.z) {
            char* end = nullptr;
            const double val = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
              throw PlyError(PlyError::Kind::bad_value, "PLY: bad number '" + tok + "'", line_no);
            v[ik == slots.x ? 0 : ik == slots.y ? 1 : 2] = val;
          }
        }
      }
      out.push_back(v);
    }
    if (is_vertex) break;
  }
  return out;
}

std::vector<Vec3> read_binary(std::istream& in, const Header& h) {
  std::vector<Vec3> out;
  std::size_t offset = 0;
  unsigned char buf[8];
  auto read = [&](std::size_t n, const std::string& where) {
    in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n))
      throw PlyError(PlyError::Kind::truncated_body, "PLY: binary body ends early in " + where, 0, offset);
    offset += n;
  };
  for (const auto& e : h.elements) {
    const bool is_vertex = e.name == "vertex";
    const XyzSlots slots = is_vertex ? find_xyz(e) : XyzSlots{};
    if (is_vertex) out.reserve(e.count);
    for (std::size_t item = 0; item < e.count; ++item) {
      Vec3 v = Vec3::Zero();
      for (std::size_t k = 0; k < e.props.size(); ++k) {
        const auto& p = e.props[k];
        if (p.is_list) {
          read(type_size(p.count_type), "element '" + e.name + "'");
          const auto n = static_cast<std::size_t>(decode(p.count_type, buf));
          for (std::size_t m = 0; m < n; ++m) read(type_size(p.type), "element '" + e.name + "'");
          continue;
        }
        read(type_size(p.type), "element '" + e.name + "'");
        const int ik = static_cast<int>(k);
        if (ik == slots.x) v[0] = decode(p.type, buf);
        if (ik == slots.y) v[1] = decode(p.type, buf);
        if (ik == slots.z) v[2] = decode(p.type, buf);
      }
      if (is_vertex) out.push_back(v);
    }
    if (is_vertex) break;
  }
  return out;
}

}  // namespace

std::vector<Vec3> parse_ply(std::istream& in) {
  const Header h = read_header(in);
  const Element* vertex = nullptr;
  for (const auto& e : h.elements)
    if (e.name == "vertex") vertex = &e;
  if (!vertex) throw PlyError(PlyError::Kind::malformed_header, "PLY: no vertex element", h.lines);
  const XyzSlots slots = find_xyz(*vertex);
  if (slots.x < 0 || slots.y < 0 || slots.z < 0)
    throw PlyError(PlyError::Kind::malformed_header, "PLY: vertex element lacks x/y/z", h.lines);
  auto pts = h.format == Format::ascii ? read_ascii(in, h) : read_binary(in, h);
  for (const auto& p : pts)
    if (!p.allFinite()) throw PlyError(PlyError::Kind::bad_value, "PLY: non-finite vertex coordinate");
  return pts;
}

std::vector<Vec3> parse_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PlyError(PlyError::Kind::io, "PLY: cannot open " + path.string());
  try {
    return parse_ply(in);
  } catch (const PlyError& e) {
    throw PlyError(e.kind(), path.string() + ": " + e.what(), e.line(), e.offset());
  }
}

void write_ply(std::ostream& out, std::span<const Vec3> points) {
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  char buf[96];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out << buf;
  }
}

void write_ply(const std::filesystem::path& path, std::span<const Vec3> points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PlyError(PlyError::Kind::io, "PLY: cannot write " + path.string());
  write_ply(out, points);
  if (!out) throw PlyError(PlyError::Kind::io, "PLY: write failed for " + path.string());
}

}  // namespace gmcr
