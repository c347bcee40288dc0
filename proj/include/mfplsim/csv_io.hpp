#pragma once

#include <filesystem>
#include <string>

#include "mfplsim/functional.hpp"

namespace mfplsim {

// CSV layout: comma separated, '.' decimal point. Curve files carry a header
// row of grid abscissae and one sample per row; the response file holds one
// value per row with no header.

struct CurveTable {
  GridPtr grid;
  Eigen::MatrixXd values;
};

CurveTable read_curve_csv(const std::filesystem::path& path);
Eigen::VectorXd read_response_csv(const std::filesystem::path& path);

BiFunctionalDataset load_csv(const std::filesystem::path& zeta_path,
                             const std::filesystem::path& x_path,
                             const std::filesystem::path& y_path);

/// Values are rendered with 17 significant digits so a reload is bit-identical.
void write_curve_csv(const std::filesystem::path& path, const Grid& grid,
                     const Eigen::MatrixXd& values);
void write_response_csv(const std::filesystem::path& path, const Eigen::VectorXd& y);

void write_csv(const BiFunctionalDataset& d, const std::filesystem::path& zeta_path,
               const std::filesystem::path& x_path, const std::filesystem::path& y_path);

std::string format_double(double v);

}  // namespace mfplsim
