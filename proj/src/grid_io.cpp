#include "wlr/grid_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace wlr {

namespace {

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open file for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("write failed: " + path);
}

std::int32_t parse_cell(const std::string& path, std::string_view cell) {
  std::size_t b = 0, e = cell.size();
  while (b < e && std::isspace(static_cast<unsigned char>(cell[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(cell[e - 1]))) --e;
  std::int32_t value = 0;
  auto [ptr, ec] = std::from_chars(cell.data() + b, cell.data() + e, value);
  if (ec != std::errc() || ptr != cell.data() + e || b == e || value < 0)
    throw ValidationError(path + ": non-integer or negative cell '" +
                          std::string(cell) + "'");
  return value;
}

LabelGrid load_csv(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  std::vector<std::vector<std::int32_t>> rows;
  std::size_t lineStart = 0;
  while (lineStart < bytes.size()) {
    std::size_t lineEnd = bytes.find('\n', lineStart);
    if (lineEnd == std::string::npos) lineEnd = bytes.size();
    std::string_view line(bytes.data() + lineStart, lineEnd - lineStart);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      std::vector<std::int32_t> row;
      std::size_t cellStart = 0;
      while (true) {
        std::size_t comma = line.find(',', cellStart);
        std::string_view cell = (comma == std::string_view::npos)
                                    ? line.substr(cellStart)
                                    : line.substr(cellStart, comma - cellStart);
        row.push_back(parse_cell(path, cell));
        if (comma == std::string_view::npos) break;
        cellStart = comma + 1;
      }
      rows.push_back(std::move(row));
    }
    lineStart = lineEnd + 1;
  }
  if (rows.empty()) throw ValidationError(path + ": empty CSV grid");
  const std::size_t width = rows.front().size();
  for (const auto& row : rows)
    if (row.size() != width)
      throw ValidationError(path + ": ragged CSV rows (" + std::to_string(row.size()) +
                            " vs " + std::to_string(width) + " cells)");
  LabelGrid grid(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (Eigen::Index r = 0; r < grid.rows(); ++r)
    for (Eigen::Index c = 0; c < grid.cols(); ++c)
      grid(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return grid;
}

void save_csv(const std::string& path, const LabelGrid& grid) {
  std::string out;
  out.reserve(static_cast<std::size_t>(grid.size()) * 3);
  for (Eigen::Index r = 0; r < grid.rows(); ++r) {
    for (Eigen::Index c = 0; c < grid.cols(); ++c) {
      if (c > 0) out += ',';
      out += std::to_string(grid(r, c));
    }
    out += '\n';
  }
  write_file_bytes(path, out);
}

// PGM header tokens are separated by whitespace; '#' starts a comment that
// runs to end of line.
class PnmHeaderReader {
 public:
  PnmHeaderReader(const std::string& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  std::string token() {
    skip_separators();
    std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      ++pos_;
    if (start == pos_) throw ValidationError(path_ + ": truncated PGM header");
    return bytes_.substr(start, pos_ - start);
  }

  long number() {
    const std::string tok = token();
    long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ValidationError(path_ + ": malformed PGM header token '" + tok + "'");
    return value;
  }

  // Payload begins after exactly one whitespace byte following maxval.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      throw ValidationError(path_ + ": malformed PGM header (missing payload separator)");
    return pos_ + 1;
  }

 private:
  void skip_separators() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

LabelGrid load_pgm(const std::string& path) {
  const std::string bytes = read_file_bytes(path);
  PnmHeaderReader header(bytes, path);
  if (header.token() != "P5") throw ValidationError(path + ": not a binary PGM (P5) file");
  const long width = header.number();
  const long height = header.number();
  const long maxval = header.number();
  if (width < 1 || height < 1)
    throw ValidationError(path + ": invalid PGM dimensions");
  if (maxval < 1 || maxval > 65535)
    throw ValidationError(path + ": PGM maxval out of range [1, 65535]");

  const std::size_t offset = header.payload_offset();
  const std::size_t sampleBytes = maxval > 255 ? 2 : 1;
  const std::size_t expected = static_cast<std::size_t>(width) * height * sampleBytes;
  if (bytes.size() - offset != expected)
    throw ValidationError(path + ": PGM payload length " +
                          std::to_string(bytes.size() - offset) + " does not match header (" +
                          std::to_string(expected) + " bytes)");

  LabelGrid grid(height, width);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + offset);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (sampleBytes == 2) {
      grid.data()[i] = static_cast<std::int32_t>(p[0]) << 8 | p[1];  // big-endian
      p += 2;
    } else {
      grid.data()[i] = *p++;
    }
  }
  return grid;
}

void save_pgm(const std::string& path, const LabelGrid& grid) {
  if (grid.size() == 0) throw ValidationError("PGM save: empty grid");
  if (grid.maxCoeff() > 65535 || grid.minCoeff() < 0)
    throw ValidationError("PGM save: label id outside the 16-bit range [0, 65535]");
  std::string out = "P5\n" + std::to_string(grid.cols()) + " " +
                    std::to_string(grid.rows()) + "\n65535\n";
  out.reserve(out.size() + static_cast<std::size_t>(grid.size()) * 2);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const auto v = static_cast<std::uint16_t>(grid.data()[i]);
    out += static_cast<char>(v >> 8);
    out += static_cast<char>(v & 0xff);
  }
  write_file_bytes(path, out);
}

}  // namespace

GridFormat grid_format_from_name(const std::string& name) {
  if (name == "pgm16") return GridFormat::pgm16;
  if (name == "csv") return GridFormat::csv;
  throw ValidationError("unknown grid format '" + name + "' (expected pgm16 or csv)");
}

GridFormat grid_format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "pgm") return GridFormat::pgm16;
  if (ext == "csv") return GridFormat::csv;
  throw ValidationError("cannot infer grid format from path '" + path +
                        "' (expected .pgm or .csv)");
}

LabelGrid load_label_grid(const std::string& path, GridFormat format) {
  return format == GridFormat::csv ? load_csv(path) : load_pgm(path);
}

void save_label_grid(const std::string& path, const LabelGrid& grid, GridFormat format) {
  if (format == GridFormat::csv)
    save_csv(path, grid);
  else
    save_pgm(path, grid);
}

SegmentMap load_segment_map(const std::string& path, GridFormat format) {
  return SegmentMap::from_grid(load_label_grid(path, format));
}

}  // namespace wlr
