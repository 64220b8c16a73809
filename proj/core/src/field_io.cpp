#include "kornkit/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "kornkit/error.hpp"

namespace kornkit {

namespace {

std::string header_tokens(const GridSpec& g, int components) {
  std::ostringstream os;
  os << std::setprecision(17) << "KFK1 " << g.dim;
  for (int a = 0; a < g.dim; ++a) os << ' ' << g.shape[a];
  os << ' ' << components;
  for (int a = 0; a < g.dim; ++a) os << ' ' << g.origin[a];
  os << ' ' << g.h;
  return os.str();
}

RawField parse_header(const std::string& line) {
  std::istringstream is(line);
  std::string magic;
  int dim = 0;
  if (!(is >> magic) || magic != "KFK1") {
    throw Error(ErrorKind::FormatError, "missing KFK1 magic");
  }
  if (!(is >> dim) || dim < 1 || dim > 3) {
    throw Error(ErrorKind::FormatError, "bad dimension in field header");
  }
  std::array<int, 3> shape{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0};
  RawField raw;
  double h = 0.0;
  for (int a = 0; a < dim; ++a) {
    if (!(is >> shape[a])) throw Error(ErrorKind::FormatError, "bad shape in field header");
  }
  if (!(is >> raw.components) || raw.components < 1) {
    throw Error(ErrorKind::FormatError, "bad component count in field header");
  }
  for (int a = 0; a < dim; ++a) {
    if (!(is >> origin[a])) throw Error(ErrorKind::FormatError, "bad origin in field header");
  }
  if (!(is >> h)) throw Error(ErrorKind::FormatError, "bad spacing in field header");
  std::string extra;
  if (is >> extra) throw Error(ErrorKind::FormatError, "trailing tokens in field header");
  raw.grid = GridSpec::make(dim, std::span<const int>(shape.data(), static_cast<std::size_t>(dim)),
                            std::span<const double>(origin.data(), static_cast<std::size_t>(dim)), h);
  return raw;
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return __builtin_bswap64(v);
  }
}

}  // namespace

void write_field(std::ostream& out, const GridSpec& grid, int components,
                 std::span<const double> data) {
  if (data.size() != grid.point_count() * static_cast<std::size_t>(components)) {
    throw Error(ErrorKind::DimensionMismatch, "field data length does not match header");
  }
  out << header_tokens(grid, components) << '\n';
  for (double v : data) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
  if (!out) throw Error(ErrorKind::FormatError, "write failed");
}

RawField read_field(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::FormatError, "empty field file");
  RawField raw = parse_header(line);
  const std::size_t count = raw.grid.point_count() * static_cast<std::size_t>(raw.components);
  raw.data.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    char bytes[8];
    if (!in.read(bytes, 8)) throw Error(ErrorKind::FormatError, "field payload truncated");
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes, 8);
    raw.data[k] = std::bit_cast<double>(to_little_endian(bits));
    if (!std::isfinite(raw.data[k])) throw Error(ErrorKind::NonFinite, "non-finite value in field file");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorKind::FormatError, "trailing bytes after field payload");
  }
  return raw;
}

void write_field_csv(std::ostream& out, const GridSpec& grid, int components,
                     std::span<const double> data) {
  if (grid.point_count() > kCsvPointLimit) {
    throw Error(ErrorKind::GridTooLarge, "CSV export is limited to 10^4 points");
  }
  if (data.size() != grid.point_count() * static_cast<std::size_t>(components)) {
    throw Error(ErrorKind::DimensionMismatch, "field data length does not match header");
  }
  out << "# " << header_tokens(grid, components) << '\n';
  for (int a = 0; a < grid.dim; ++a) out << 'x' << a << ',';
  for (int c = 0; c < components; ++c) out << 'c' << c << (c + 1 < components ? "," : "\n");
  out << std::setprecision(17);
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    const Eigen::Vector3d x = grid.position(p);
    for (int a = 0; a < grid.dim; ++a) out << x(a) << ',';
    for (int c = 0; c < components; ++c) {
      out << data[p * static_cast<std::size_t>(components) + static_cast<std::size_t>(c)]
          << (c + 1 < components ? "," : "\n");
    }
  }
}

RawField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw Error(ErrorKind::FormatError, "CSV field must start with '# KFK1 ...'");
  }
  RawField raw = parse_header(line.substr(2));
  if (raw.grid.point_count() > kCsvPointLimit) {
    throw Error(ErrorKind::GridTooLarge, "CSV import is limited to 10^4 points");
  }
  if (!std::getline(in, line)) throw Error(ErrorKind::FormatError, "missing CSV column line");
  const std::size_t n = raw.grid.point_count();
  const auto comps = static_cast<std::size_t>(raw.components);
  raw.data.reserve(n * comps);
  for (std::size_t p = 0; p < n; ++p) {
    if (!std::getline(in, line)) throw Error(ErrorKind::FormatError, "CSV has too few rows");
    std::istringstream row(line);
    std::string cell;
    std::size_t column = 0;
    while (std::getline(row, cell, ',')) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorKind::FormatError, "bad CSV number '" + cell + "'");
      }
      if (column >= static_cast<std::size_t>(raw.grid.dim)) raw.data.push_back(v);
      ++column;
    }
    if (column != static_cast<std::size_t>(raw.grid.dim) + comps) {
      throw Error(ErrorKind::FormatError, "CSV row " + std::to_string(p) + " has wrong width");
    }
  }
  while (std::getline(in, line)) {
    if (!line.empty()) throw Error(ErrorKind::FormatError, "CSV has too many rows");
  }
  return raw;
}

namespace {

bool is_csv(const std::filesystem::path& path) { return path.extension() == ".csv"; }

void save_raw(const std::filesystem::path& path, const GridSpec& grid, int comps,
              std::span<const double> data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::FormatError, "cannot open " + path.string() + " for writing");
  if (is_csv(path)) {
    write_field_csv(out, grid, comps, data);
  } else {
    write_field(out, grid, comps, data);
  }
}

}  // namespace

void save_field(const std::filesystem::path& path, const VectorField& f) {
  save_raw(path, f.grid(), f.components(), f.data());
}

void save_field(const std::filesystem::path& path, const MatrixField& f) {
  save_raw(path, f.grid(), f.rows() * f.cols(), f.data());
}

RawField load_raw_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::FormatError, "cannot open " + path.string());
  return is_csv(path) ? read_field_csv(in) : read_field(in);
}

VectorField load_vector_field(const std::filesystem::path& path) {
  RawField raw = load_raw_field(path);
  return VectorField(raw.grid, raw.components, std::move(raw.data));
}

MatrixField load_matrix_field(const std::filesystem::path& path) {
  RawField raw = load_raw_field(path);
  const int n = static_cast<int>(std::lround(std::sqrt(raw.components)));
  if (n * n != raw.components) {
    throw Error(ErrorKind::FormatError, "matrix field needs a square component count");
  }
  return MatrixField(raw.grid, n, n, std::move(raw.data));
}

}  // namespace kornkit
