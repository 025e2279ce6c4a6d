#ifndef KACLAB_CSV_HPP
#define KACLAB_CSV_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace kac {

using Cell = std::variant<double, std::int64_t, std::string>;

/// A CSV table: header plus rows of numeric or identifier cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

/// Shortest round-trip form with at most 17 significant digits.
std::string format_number(double x);
std::string format_cell(const Cell& c);

void write_csv(std::ostream& out, const Table& t);
/// Throws std::runtime_error carrying the OS error text on failure.
void write_csv(const std::filesystem::path& path, const Table& t);

/// Parses a file written by write_csv. Cells that parse fully as integers
/// become int64, then doubles, otherwise strings.
Table read_csv(std::istream& in);
Table read_csv(const std::filesystem::path& path);

/// key = value lines, in order.
using Manifest = std::vector<std::pair<std::string, std::string>>;
void write_manifest(const std::filesystem::path& path, const Manifest& m);

}  // namespace kac

#endif
