#include "mfplsim/simlab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "mfplsim/search.hpp"

namespace mfplsim {

std::string to_string(DesignKind k) {
  switch (k) {
    case DesignKind::A: return "designA";
    case DesignKind::B: return "designB";
    case DesignKind::C: return "designC";
  }
  return "?";
}

DesignKind parse_design(const std::string& s) {
  if (s == "designA" || s == "A") return DesignKind::A;
  if (s == "designB" || s == "B") return DesignKind::B;
  if (s == "designC" || s == "C") return DesignKind::C;
  throw ValidationError("unknown design '" + s + "' (expected designA, designB or designC)");
}

void DesignSpec::validate() const {
  if (p < 2) throw ValidationError("design needs p >= 2");
  if (n < 4) throw ValidationError("design needs n >= 4");
  if (n_test < 1) throw ValidationError("design needs n_test >= 1");
}

bool GroundTruth::in_good_region(double t) const {
  for (const auto& iv : good_region)
    if (t >= iv.lo - 1e-9 && t <= iv.hi + 1e-9) return true;
  return false;
}

Curve gen_brownian(const GridPtr& grid, Rng& rng) {
  const Eigen::VectorXd& t = grid->points();
  Eigen::VectorXd v(t.size());
  v[0] = t[0] == 0.0 ? 0.0 : std::sqrt(t[0]) * rng.normal();
  for (Index j = 1; j < t.size(); ++j) v[j] = v[j - 1] + std::sqrt(t[j] - t[j - 1]) * rng.normal();
  return Curve(grid, std::move(v));
}

Curve xcurve(const GridPtr& grid, const Eigen::Vector3d& abc) {
  const Eigen::VectorXd& t = grid->points();
  Eigen::VectorXd v(t.size());
  for (Index j = 0; j < t.size(); ++j)
    v[j] = abc[0] * std::cos(2.0 * M_PI * t[j]) + abc[1] * std::sin(4.0 * M_PI * t[j]) +
           2.0 * abc[2] * (t[j] - 0.25) * (t[j] - 0.5);
  return Curve(grid, std::move(v));
}

std::pair<Curve, Eigen::Vector3d> gen_xcurves(const GridPtr& grid, Rng& rng, double hi) {
  if (!(hi > 0.0)) throw ValidationError("coefficient range must be positive");
  Eigen::Vector3d abc;
  for (int i = 0; i < 3; ++i) abc[i] = rng.uniform(0.0, hi);
  return {xcurve(grid, abc), abc};
}

Curve gen_lines(const GridPtr& grid, double c, Rng& rng) {
  const double d = rng.normal();
  return Curve(grid, (c * grid->points().array() + d).matrix());
}

Direction true_direction() {
  auto basis = std::make_shared<const BSplineBasis>(3, 3, 0.0, 1.0);
  Eigen::VectorXd a(6);
  a << 0.0, 1.741539, 0.0, 1.741539, -1.741539, -1.741539;
  return Direction(basis, a);
}

namespace {

struct Impact {
  double t;
  double beta;
};

std::vector<Impact> impacts(DesignKind k) {
  switch (k) {
    case DesignKind::A: return {{0.18, 2.0}, {0.73, -3.0}};
    case DesignKind::B: return {{0.02, 4.0}, {0.50, 3.0}, {0.70, -3.2}};
    case DesignKind::C:
      return {{0.15, 1.0}, {0.16, 1.2}, {0.17, 1.0}, {0.18, 1.2}, {0.19, 1.0},
              {0.70, 1.0}, {0.71, 1.2}, {0.72, -1.2}, {0.73, -1.2}, {0.74, -1.2}};
  }
  return {};
}

std::vector<Interval> good_region(DesignKind k) {
  switch (k) {
    case DesignKind::A: return {{0.15, 0.21}, {0.70, 0.76}};
    case DesignKind::B: return {{0.0, 0.05}, {0.47, 0.53}, {0.67, 0.73}};
    case DesignKind::C: return {{0.14, 0.20}, {0.69, 0.75}};
  }
  return {};
}

}  // namespace

SimulatedDesign gen_design(const DesignSpec& spec, std::uint64_t replicate) {
  spec.validate();
  const auto zgrid = Grid::uniform(0.0, 1.0, spec.p);
  const auto xgrid = Grid::uniform(0.0, 1.0, 100);
  const Index total = spec.n + spec.n_test;
  const Direction theta = true_direction();
  const Eigen::VectorXd pw = theta.projection_weights(*xgrid);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(spec.p);
  std::vector<double> abscissae;
  std::vector<Index> indices;
  for (const auto& imp : impacts(spec.kind)) {
    const Index j = zgrid->nearest(imp.t);
    beta[j] += imp.beta;
    if (std::find(indices.begin(), indices.end(), j) == indices.end()) {
      indices.push_back(j);
      abscissae.push_back(zgrid->points()[j]);
    }
  }

  Rng rng(spec.seed, replicate);
  const double hi = spec.kind == DesignKind::A ? 6.0 : 5.0;
  Eigen::MatrixXd zeta(total, spec.p), x(total, 100);
  for (Index i = 0; i < total; ++i) {
    const auto [xc, abc] = gen_xcurves(xgrid, rng, hi);
    x.row(i) = xc.values().transpose();
    const Curve z = spec.kind == DesignKind::B ? gen_lines(zgrid, abc[2], rng) : gen_brownian(zgrid, rng);
    zeta.row(i) = z.values().transpose();
  }

  const Eigen::VectorXd u = x * pw;
  const Eigen::VectorXd reg = zeta * beta + u.array().cube().matrix();
  const double mean = reg.mean();
  const double sd = std::sqrt((reg.array() - mean).square().sum() / static_cast<double>(total - 1));
  const double noise_sd = spec.noise_free ? 0.0 : 0.1 * sd;
  Eigen::VectorXd eps(total);
  for (Index i = 0; i < total; ++i) eps[i] = spec.noise_free ? 0.0 : noise_sd * rng.normal();
  const Eigen::VectorXd y = reg + eps;

  BiFunctionalDataset all(zgrid, std::move(zeta), xgrid, std::move(x), y);
  GroundTruth truth{beta, theta, abscissae, indices, good_region(spec.kind), noise_sd};
  return SimulatedDesign{all.rows(0, spec.n), all.rows(spec.n, spec.n_test), std::move(truth),
                         eps.head(spec.n), eps.tail(spec.n_test)};
}

ImpactCounts impact_metrics(const SupportSet& support, const GroundTruth& truth, const Grid& grid) {
  ImpactCounts c;
  for (Index j : support.indices) {
    if (j < 0 || j >= grid.size()) throw ValidationError("support index outside the grid");
    if (truth.in_good_region(grid.points()[j]))
      ++c.right;
    else
      ++c.wrong;
  }
  return c;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::fassmr: return "fassmr";
    case Method::iassmr: return "iassmr";
    case Method::pls: return "pls";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "fassmr") return Method::fassmr;
  if (s == "iassmr") return Method::iassmr;
  if (s == "pls") return Method::pls;
  throw ValidationError("unknown method '" + s + "' (expected fassmr, iassmr or pls)");
}

MethodSummary summarize(Method m, const std::vector<ReplicateResult>& replicates) {
  MethodSummary s;
  s.method = m;
  std::vector<const ReplicateResult*> ok;
  for (const auto& r : replicates) {
    if (r.method != m) continue;
    ++s.replicates;
    if (r.failed)
      ++s.failures;
    else
      ok.push_back(&r);
  }
  if (ok.empty()) {
    s.mean_msep = s.sd_msep = s.mean_right = s.mean_wrong = s.mean_seconds = std::nan("");
    return s;
  }
  const double k = static_cast<double>(ok.size());
  for (const auto* r : ok) {
    s.mean_msep += r->msep;
    s.mean_right += static_cast<double>(r->right);
    s.mean_wrong += static_cast<double>(r->wrong);
    s.mean_seconds += r->seconds;
  }
  s.mean_msep /= k;
  s.mean_right /= k;
  s.mean_wrong /= k;
  s.mean_seconds /= k;
  if (ok.size() > 1) {
    double ss = 0.0;
    for (const auto* r : ok) ss += (r->msep - s.mean_msep) * (r->msep - s.mean_msep);
    s.sd_msep = std::sqrt(ss / (k - 1.0));
  }
  return s;
}

namespace {

ReplicateResult run_method(Method m, const SimulatedDesign& d, const MonteCarloOptions& o, Index replicate) {
  ReplicateResult r;
  r.method = m;
  r.replicate = replicate;
  try {
    FassmrConfig fc = o.fassmr;
    fc.workers = 1;
    const BiFunctionalDataset& train = d.train;
    const auto start = std::chrono::steady_clock::now();
    std::optional<FitResult> fit;
    if (m == Method::iassmr) {
      IassmrConfig ic = o.iassmr;
      ic.stage1 = fc;
      fit = iassmr_fit(train, ic);
    } else {
      const BiFunctionalDataset sub =
          o.fassmr_rows ? train.rows(0, std::min(*o.fassmr_rows, train.n())) : train;
      fit = m == Method::fassmr ? fassmr_fit(sub, fc) : standard_pls_fit(sub, fc);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.msep = msep(predict(*fit, d.test), d.test.y());
    r.support = fit->support;
    r.representatives = fit->representatives;
    r.chosen = fit->chosen;
    const ImpactCounts c = impact_metrics(r.support, d.truth, *train.zeta_grid());
    r.right = c.right;
    r.wrong = c.wrong;
  } catch (const Error& e) {
    r.failed = true;
    r.error = e.what();
  }
  return r;
}

}  // namespace

MetricsSummary monte_carlo(const DesignSpec& spec, const MonteCarloOptions& options) {
  spec.validate();
  if (options.M < 1) throw ValidationError("Monte Carlo needs M >= 1");
  if (options.methods.empty()) throw ValidationError("method list is empty");
  if (options.workers < 1) throw ValidationError("workers must be positive");
  const std::size_t nm = options.methods.size();
  std::vector<ReplicateResult> results(static_cast<std::size_t>(options.M) * nm);
  parallel_for(static_cast<std::size_t>(options.M), options.workers, [&](std::size_t r) {
    const SimulatedDesign d = gen_design(spec, r);
    for (std::size_t m = 0; m < nm; ++m)
      results[r * nm + m] = run_method(options.methods[m], d, options, static_cast<Index>(r));
  });
  MetricsSummary out;
  out.spec = spec;
  out.M = options.M;
  for (Method m : options.methods) out.methods.push_back(summarize(m, results));
  out.replicates = std::move(results);
  return out;
}

}  // namespace mfplsim
