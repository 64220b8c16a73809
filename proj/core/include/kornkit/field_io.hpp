#pragma once

// Field files.
//
// Binary ("KFK1"): one ASCII header line
//   KFK1 <dim> <shape...> <components> <origin...> <h>\n
// followed by point-major, component-minor little-endian float64 values.
//
// CSV (fields of at most 10^4 points): a "# KFK1 ..." comment line carrying
// the same header, a column-name line, then one row per point with its
// coordinates followed by its components.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "kornkit/fields.hpp"

namespace kornkit {

inline constexpr std::size_t kCsvPointLimit = 10'000;

struct RawField {
  GridSpec grid;
  int components = 1;
  std::vector<double> data;
};

void write_field(std::ostream& out, const GridSpec& grid, int components,
                 std::span<const double> data);
RawField read_field(std::istream& in);

void write_field_csv(std::ostream& out, const GridSpec& grid, int components,
                     std::span<const double> data);
RawField read_field_csv(std::istream& in);

/// Picks binary or CSV by the ".csv" extension.
void save_field(const std::filesystem::path& path, const VectorField& f);
void save_field(const std::filesystem::path& path, const MatrixField& f);
RawField load_raw_field(const std::filesystem::path& path);
VectorField load_vector_field(const std::filesystem::path& path);
/// Components must be a perfect square (n x n matrices).
MatrixField load_matrix_field(const std::filesystem::path& path);

}  // namespace kornkit
