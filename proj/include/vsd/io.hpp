// File formats with bit-exact round-trips.
//
//   annotations CSV   header `frame_id,space,camera_id,x,y,person_id`
//   density raster    magic "VSDM1\n", ASCII header, float32 LE row-major
//   masks             binary PGM (P5), foreground 255, `# VSD ...` comment
//
// All floating-point text uses shortest round-trip decimals (std::to_chars)
// and writes go through a temp file + rename so outputs appear atomically.
#pragma once

#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "vsd/annotations.hpp"
#include "vsd/density.hpp"
#include "vsd/errors.hpp"
#include "vsd/mask.hpp"

namespace vsd {

// ---------------------------------------------------------------------------
// number formatting / parsing

inline std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_int(int64_t v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& file,
                           long line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(file, line, "bad number '" + std::string(s) + "'");
  return v;
}

inline int64_t parse_int(std::string_view s, const std::string& file,
                         long line) {
  int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError(file, line, "bad integer '" + std::string(s) + "'");
  return v;
}

// ---------------------------------------------------------------------------
// atomic file output

inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& payload) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec)
    throw Error("cannot move '" + tmp.string() + "' to '" + path.string() +
                "': " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// annotation CSV

inline constexpr const char* kAnnotationCsvHeader =
    "frame_id,space,camera_id,x,y,person_id";

inline std::string annotations_to_csv(
    const std::vector<HeadAnnotation>& heads) {
  std::string out(kAnnotationCsvHeader);
  out += '\n';
  for (const auto& h : heads) {
    out += fmt_int(h.frame_id);
    out += h.space.is_plane() ? ",plane," : ",image," + h.space.camera_id;
    out += ',';
    out += fmt_double(h.position.x);
    out += ',';
    out += fmt_double(h.position.y);
    out += ',';
    if (h.person_id) out += fmt_int(*h.person_id);
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace detail

inline std::vector<HeadAnnotation> annotations_from_csv(
    const std::string& text, const std::string& file) {
  std::vector<HeadAnnotation> out;
  size_t pos = 0;
  long line_no = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kAnnotationCsvHeader)
        throw ParseError(file, 1, "expected header '" +
                                      std::string(kAnnotationCsvHeader) + "'");
      continue;
    }
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 6)
      throw ParseError(file, line_no,
                       "expected 6 fields, got " + std::to_string(f.size()));
    HeadAnnotation h;
    h.frame_id = parse_int(f[0], file, line_no);
    if (f[1] == "plane") {
      if (!f[2].empty())
        throw ParseError(file, line_no, "camera_id must be empty for plane");
      h.space = Space::plane();
    } else if (f[1] == "image") {
      if (f[2].empty())
        throw ParseError(file, line_no, "image annotation needs camera_id");
      h.space = Space::image(std::string(f[2]));
    } else {
      throw ParseError(file, line_no, "space must be 'image' or 'plane'");
    }
    h.position.x = parse_double(f[3], file, line_no);
    h.position.y = parse_double(f[4], file, line_no);
    if (!f[5].empty()) h.person_id = parse_int(f[5], file, line_no);
    out.push_back(std::move(h));
  }
  return out;
}

inline void write_annotations_csv(const std::filesystem::path& path,
                                  const std::vector<HeadAnnotation>& heads) {
  write_file_atomic(path, annotations_to_csv(heads));
}

inline std::vector<HeadAnnotation> read_annotations_csv(
    const std::filesystem::path& path) {
  return annotations_from_csv(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// density raster (.vsdm)

inline constexpr const char* kDensityMagic = "VSDM1\n";

namespace detail {

inline std::string space_token(const Space& s) {
  return s.is_plane() ? std::string("plane") : "image:" + s.camera_id;
}

inline Space parse_space_token(std::string_view tok, const std::string& file,
                               long line) {
  if (tok == "plane") return Space::plane();
  if (tok.rfind("image:", 0) == 0 && tok.size() > 6)
    return Space::image(std::string(tok.substr(6)));
  throw ParseError(file, line, "bad space token '" + std::string(tok) + "'");
}

inline MapKind parse_kind_token(std::string_view tok, const std::string& file,
                                long line) {
  if (tok == "nsdc") return MapKind::Nsdc;
  if (tok == "sdc") return MapKind::Sdc;
  if (tok == "predicted") return MapKind::Predicted;
  throw ParseError(file, line, "bad kind token '" + std::string(tok) + "'");
}

inline void put_f32_le(std::string& out, float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, 4);
  out.push_back(static_cast<char>(bits & 0xFF));
  out.push_back(static_cast<char>((bits >> 8) & 0xFF));
  out.push_back(static_cast<char>((bits >> 16) & 0xFF));
  out.push_back(static_cast<char>((bits >> 24) & 0xFF));
}

inline float get_f32_le(const char* p) {
  const uint32_t bits = (static_cast<uint32_t>(static_cast<uint8_t>(p[0]))) |
                        (static_cast<uint32_t>(static_cast<uint8_t>(p[1])) << 8) |
                        (static_cast<uint32_t>(static_cast<uint8_t>(p[2])) << 16) |
                        (static_cast<uint32_t>(static_cast<uint8_t>(p[3])) << 24);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

}  // namespace detail

inline std::string density_to_bytes(const DensityMap& map) {
  std::string out(kDensityMagic);
  out += detail::space_token(map.space);
  out += ' ';
  out += map_kind_name(map.kind);
  out += ' ';
  out += fmt_int(map.cells.width());
  out += ' ';
  out += fmt_int(map.cells.height());
  out += ' ';
  out += fmt_double(map.grid.origin_x);
  out += ' ';
  out += fmt_double(map.grid.origin_y);
  out += ' ';
  out += fmt_double(map.grid.cell_size);
  out += '\n';
  out.reserve(out.size() + map.cells.size() * 4);
  for (double v : map.cells.data())
    detail::put_f32_le(out, static_cast<float>(v));
  return out;
}

inline DensityMap density_from_bytes(const std::string& bytes,
                                     const std::string& file) {
  const size_t magic_len = std::strlen(kDensityMagic);
  if (bytes.size() < magic_len ||
      bytes.compare(0, magic_len, kDensityMagic) != 0)
    throw ParseError(file, 1, "bad magic; not a VSDM1 density raster");

  const size_t header_end = bytes.find('\n', magic_len);
  if (header_end == std::string::npos)
    throw ParseError(file, 2, "missing header line");
  std::istringstream hs(bytes.substr(magic_len, header_end - magic_len));
  std::string space_tok, kind_tok, ox, oy, cs;
  int64_t w = 0, h = 0;
  if (!(hs >> space_tok >> kind_tok >> w >> h >> ox >> oy >> cs))
    throw ParseError(file, 2, "malformed header line");
  std::string trailing;
  if (hs >> trailing) throw ParseError(file, 2, "trailing header fields");
  if (w <= 0 || h <= 0) throw ParseError(file, 2, "non-positive dimensions");

  DensityMap map;
  map.space = detail::parse_space_token(space_tok, file, 2);
  map.kind = detail::parse_kind_token(kind_tok, file, 2);
  map.grid.origin_x = parse_double(ox, file, 2);
  map.grid.origin_y = parse_double(oy, file, 2);
  map.grid.cell_size = parse_double(cs, file, 2);
  map.grid.width = static_cast<int>(w);
  map.grid.height = static_cast<int>(h);

  const size_t payload = static_cast<size_t>(w) * static_cast<size_t>(h) * 4;
  if (bytes.size() - header_end - 1 != payload)
    throw ParseError(file, 0,
                     "payload size mismatch: expected " +
                         std::to_string(payload) + " bytes, got " +
                         std::to_string(bytes.size() - header_end - 1));
  map.cells = Raster<double>(static_cast<int>(w), static_cast<int>(h), 0.0);
  const char* p = bytes.data() + header_end + 1;
  for (double& v : map.cells.data()) {
    v = static_cast<double>(detail::get_f32_le(p));
    p += 4;
  }
  return map;
}

inline void write_density(const std::filesystem::path& path,
                          const DensityMap& map) {
  write_file_atomic(path, density_to_bytes(map));
}

inline DensityMap read_density(const std::filesystem::path& path) {
  return density_from_bytes(read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// masks / overlays as binary PGM

namespace detail {

inline std::string pgm_to_bytes(const Raster<uint8_t>& gray, const Space& space) {
  std::string out = "P5\n# VSD space=";
  out += space.is_plane() ? "plane" : "image";
  out += " cam=";
  out += space.is_image() ? space.camera_id : std::string("-");
  out += '\n';
  out += fmt_int(gray.width());
  out += ' ';
  out += fmt_int(gray.height());
  out += "\n255\n";
  out.append(reinterpret_cast<const char*>(gray.data().data()),
             gray.data().size());
  return out;
}

struct PgmFile {
  Raster<uint8_t> gray;
  Space space;
};

inline PgmFile pgm_from_bytes(const std::string& bytes,
                              const std::string& file) {
  size_t pos = 0;
  auto next_line = [&](long line_no) {
    const size_t end = bytes.find('\n', pos);
    if (end == std::string::npos)
      throw ParseError(file, line_no, "truncated PGM header");
    std::string_view line(bytes.data() + pos, end - pos);
    pos = end + 1;
    return line;
  };

  if (next_line(1) != "P5") throw ParseError(file, 1, "not a P5 PGM");
  const std::string_view comment = next_line(2);
  Space space = Space::plane();
  {
    const std::string c(comment);
    if (c.rfind("# VSD space=", 0) != 0)
      throw ParseError(file, 2, "missing '# VSD' comment line");
    std::istringstream cs(c.substr(2));
    std::string tag, space_kv, cam_kv;
    if (!(cs >> tag >> space_kv >> cam_kv))
      throw ParseError(file, 2, "malformed '# VSD' comment line");
    const std::string sval = space_kv.substr(space_kv.find('=') + 1);
    const std::string cval = cam_kv.substr(cam_kv.find('=') + 1);
    if (sval == "plane") {
      if (cval != "-") throw ParseError(file, 2, "plane mask with camera id");
      space = Space::plane();
    } else if (sval == "image") {
      if (cval.empty() || cval == "-")
        throw ParseError(file, 2, "image mask needs a camera id");
      space = Space::image(cval);
    } else {
      throw ParseError(file, 2, "bad space '" + sval + "'");
    }
  }
  const std::string_view dims = next_line(3);
  int w = 0, h = 0;
  {
    std::istringstream ds{std::string(dims)};
    if (!(ds >> w >> h) || w <= 0 || h <= 0)
      throw ParseError(file, 3, "bad dimensions line");
  }
  if (next_line(4) != "255") throw ParseError(file, 4, "maxval must be 255");

  const size_t payload = static_cast<size_t>(w) * static_cast<size_t>(h);
  if (bytes.size() - pos != payload)
    throw ParseError(file, 0, "payload size mismatch");
  PgmFile out;
  out.space = space;
  out.gray = Raster<uint8_t>(w, h, 0);
  std::memcpy(out.gray.data().data(), bytes.data() + pos, payload);
  return out;
}

}  // namespace detail

// Mask files do not carry the world grid; attach one at read time when the
// plane geometry is known (image masks default to the pixel grid).
inline std::string mask_to_bytes(const BinaryMask& mask) {
  Raster<uint8_t> gray(mask.cells.width(), mask.cells.height(), 0);
  for (size_t i = 0; i < mask.cells.size(); ++i)
    gray.data()[i] = mask.cells.data()[i] ? 255 : 0;
  return detail::pgm_to_bytes(gray, mask.space);
}

inline BinaryMask mask_from_bytes(const std::string& bytes,
                                  const std::string& file,
                                  const GridSpec* plane_grid = nullptr) {
  const detail::PgmFile pgm = detail::pgm_from_bytes(bytes, file);
  BinaryMask mask;
  mask.space = pgm.space;
  mask.cells = Raster<uint8_t>(pgm.gray.width(), pgm.gray.height(), 0);
  for (size_t i = 0; i < pgm.gray.size(); ++i) {
    const uint8_t v = pgm.gray.data()[i];
    if (v != 0 && v != 255)
      throw ParseError(file, 0,
                       "mask pixel value " + std::to_string(v) +
                           " is neither 0 nor 255");
    mask.cells.data()[i] = v ? 1 : 0;
  }
  if (pgm.space.is_plane() && plane_grid != nullptr) {
    mask.grid = *plane_grid;
  } else {
    mask.grid = GridSpec::image(pgm.gray.width(), pgm.gray.height());
  }
  if (mask.grid.width != mask.cells.width() ||
      mask.grid.height != mask.cells.height())
    throw DimMismatch("mask dims do not match the supplied plane grid");
  return mask;
}

inline void write_mask_pgm(const std::filesystem::path& path,
                           const BinaryMask& mask) {
  write_file_atomic(path, mask_to_bytes(mask));
}

inline BinaryMask read_mask_pgm(const std::filesystem::path& path,
                                const GridSpec* plane_grid = nullptr) {
  return mask_from_bytes(read_file(path), path.string(), plane_grid);
}

inline void write_overlay_pgm(const std::filesystem::path& path,
                              const Raster<uint8_t>& gray,
                              const Space& space) {
  write_file_atomic(path, detail::pgm_to_bytes(gray, space));
}

}  // namespace vsd
