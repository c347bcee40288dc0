#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "mfplsim/direction.hpp"
#include "mfplsim/functional.hpp"
#include "mfplsim/scad.hpp"

namespace mfplsim {

/// Runs f(i) for i in [0, n) on up to `workers` threads. The first exception
/// thrown by any task is rethrown after all threads join.
template <typename F>
void parallel_for(std::size_t n, int workers, F&& f) {
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct SearchSpec {
  const DirectionSet* directions = nullptr;
  std::vector<double> bandwidth_quantiles;
  ScadConfig scad;
  int workers = 1;
};

/// Best (theta, h, lambda) cell for one set of linear covariates.
struct CellChoice {
  bool valid = false;
  double bic = 0.0;
  std::size_t direction_index = 0;
  double h = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd beta;  // coefficients of the set's columns, in set order
  Index df = 0;
  double rss = 0.0;
  bool converged = false;
  std::size_t fits = 0;
  std::size_t nonconverged = 0;
};

/// Order used to pick a winner: lower BIC, then lower direction index, then
/// smaller h, then larger lambda.
bool precedes(const CellChoice& a, const CellChoice& b);

/// For each column set (full-grid zeta indices), the BIC-minimising cell over
/// every direction, bandwidth and lambda on its path. One transform per
/// (theta, h) serves all sets. An empty set yields the pure single-index fit.
std::vector<CellChoice> search_cells(const BiFunctionalDataset& data,
                                     const std::vector<std::vector<Index>>& column_sets,
                                     const SearchSpec& spec);

}  // namespace mfplsim
