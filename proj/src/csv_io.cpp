#include "mfplsim/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace mfplsim {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line, std::size_t column) {
  std::ostringstream os;
  os << path.string() << ":" << line << ":" << column;
  return os.str();
}

std::vector<double> parse_row(const std::string& raw, const std::filesystem::path& path,
                              std::size_t line) {
  std::string text = raw;
  if (!text.empty() && text.back() == '\r') text.pop_back();
  std::vector<double> out;
  std::size_t start = 0;
  std::size_t column = 1;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::size_t stop = comma == std::string::npos ? text.size() : comma;
    std::size_t b = start, e = stop;
    while (b < e && (text[b] == ' ' || text[b] == '\t')) ++b;
    while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t')) --e;
    double v = 0.0;
    const char* first = text.data() + b;
    const char* last = text.data() + e;
    if (b < e && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (b == e || res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
      throw DataError("non-numeric cell at " + where(path, line, column) + ": '" +
                      text.substr(b, e - b) + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
    ++column;
  }
  return out;
}

std::vector<std::vector<double>> read_rows(const std::filesystem::path& path,
                                           std::vector<std::size_t>& line_numbers) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    rows.push_back(parse_row(line, path, lineno));
    line_numbers.push_back(lineno);
  }
  return rows;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CurveTable read_curve_csv(const std::filesystem::path& path) {
  std::vector<std::size_t> lines;
  auto rows = read_rows(path, lines);
  if (rows.empty()) throw DataError(path.string() + ": missing header row of grid abscissae");
  const auto& header = rows.front();
  Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(header.data(), static_cast<Index>(header.size()));
  for (Index j = 1; j < t.size(); ++j) {
    if (!(t[j] > t[j - 1]))
      throw DataError("grid error at " + where(path, lines.front(), static_cast<std::size_t>(j + 1)) +
                      ": header abscissae must be strictly increasing");
  }
  CurveTable table;
  table.grid = std::make_shared<const Grid>(t);
  const Index p = t.size();
  table.values.resize(static_cast<Index>(rows.size()) - 1, p);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (static_cast<Index>(rows[r].size()) != p) {
      std::ostringstream os;
      os << "ragged row at " << where(path, lines[r], rows[r].size()) << ": expected " << p
         << " columns, found " << rows[r].size();
      throw DataError(os.str());
    }
    for (Index j = 0; j < p; ++j) table.values(static_cast<Index>(r) - 1, j) = rows[r][static_cast<std::size_t>(j)];
  }
  return table;
}

Eigen::VectorXd read_response_csv(const std::filesystem::path& path) {
  std::vector<std::size_t> lines;
  auto rows = read_rows(path, lines);
  Eigen::VectorXd y(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 1) {
      std::ostringstream os;
      os << "response row at " << where(path, lines[r], rows[r].size()) << " has " << rows[r].size()
         << " cells, expected 1";
      throw DataError(os.str());
    }
    y[static_cast<Index>(r)] = rows[r][0];
  }
  return y;
}

BiFunctionalDataset load_csv(const std::filesystem::path& zeta_path,
                             const std::filesystem::path& x_path,
                             const std::filesystem::path& y_path) {
  auto zeta = read_curve_csv(zeta_path);
  auto x = read_curve_csv(x_path);
  auto y = read_response_csv(y_path);
  if (zeta.values.rows() != y.size() || x.values.rows() != y.size()) {
    std::ostringstream os;
    os << "row-count error: " << zeta_path.string() << " has " << zeta.values.rows() << " samples, "
       << x_path.string() << " has " << x.values.rows() << ", " << y_path.string() << " has "
       << y.size();
    throw DataError(os.str());
  }
  return BiFunctionalDataset(zeta.grid, std::move(zeta.values), x.grid, std::move(x.values),
                             std::move(y));
}

void write_curve_csv(const std::filesystem::path& path, const Grid& grid,
                     const Eigen::MatrixXd& values) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (Index j = 0; j < grid.size(); ++j) {
    if (j) out << ',';
    out << format_double(grid.points()[j]);
  }
  out << '\n';
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      out << format_double(values(i, j));
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

void write_response_csv(const std::filesystem::path& path, const Eigen::VectorXd& y) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (Index i = 0; i < y.size(); ++i) out << format_double(y[i]) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

void write_csv(const BiFunctionalDataset& d, const std::filesystem::path& zeta_path,
               const std::filesystem::path& x_path, const std::filesystem::path& y_path) {
  write_curve_csv(zeta_path, *d.zeta_grid(), d.zeta());
  write_curve_csv(x_path, *d.x_grid(), d.x());
  write_response_csv(y_path, d.y());
}

}  // namespace mfplsim
