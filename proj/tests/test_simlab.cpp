#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/QR>

#include "mfplsim/simlab.hpp"

using namespace mfplsim;

namespace {

FassmrConfig cheap_fassmr() {
  const DirectionSet all = default_direction_set();
  FassmrConfig c;
  for (std::size_t i = 0; i < all.size(); i += 40) c.direction_set.directions.push_back(all[i]);
  c.bandwidth_quantiles = {0.1, 0.3};
  c.scad.lambda_grid_size = 20;
  return c;
}

bool same_summary(const MethodSummary& a, const MethodSummary& b) {
  return a.method == b.method && a.replicates == b.replicates && a.failures == b.failures &&
         a.mean_msep == b.mean_msep && a.sd_msep == b.sd_msep && a.mean_right == b.mean_right &&
         a.mean_wrong == b.mean_wrong;
}

bool same_replicate(const ReplicateResult& a, const ReplicateResult& b) {
  return a.method == b.method && a.replicate == b.replicate && a.failed == b.failed && a.msep == b.msep &&
         a.right == b.right && a.wrong == b.wrong && a.support.indices == b.support.indices;
}

}  // namespace

TEST_CASE("brownian paths") {
  const auto g = Grid::uniform(0.0, 1.0, 11);
  Rng rng(1);
  const int reps = 10000;
  Eigen::MatrixXd paths(reps, 11);
  for (int r = 0; r < reps; ++r) {
    const Curve c = gen_brownian(g, rng);
    CHECK(c.values()[0] == 0.0);
    paths.row(r) = c.values().transpose();
  }
  const Eigen::RowVectorXd mean = paths.colwise().mean();
  const Eigen::MatrixXd centred = paths.rowwise() - mean;
  const Eigen::MatrixXd cov = centred.transpose() * centred / (reps - 1.0);
  CHECK(std::abs(cov(10, 10) - 1.0) < 0.05);
  for (int a = 2; a <= 10; a += 2)
    for (int b = 2; b <= 10; b += 4) {
      const double expect = std::min(a, b) / 10.0;
      CHECK(std::abs(cov(a, b) - expect) < 0.1 * expect);
    }
}

TEST_CASE("x curves") {
  const auto g = Grid::uniform(0.0, 1.0, 101);
  CHECK(xcurve(g, Eigen::Vector3d::Zero()).values().isZero(0.0));
  const Curve c = xcurve(g, Eigen::Vector3d(1.0, 0.0, 0.0));
  for (Index j = 0; j < 101; ++j) CHECK(c.values()[j] == doctest::Approx(std::cos(2.0 * M_PI * j / 100.0)));
  // t = 0.25 is a root of both the sine and the quadratic term
  const Curve d = xcurve(g, Eigen::Vector3d(0.0, 1.0, 3.0));
  CHECK(std::abs(d.values()[25]) < 1e-12);

  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto [curve, abc] = gen_xcurves(g, rng, 6.0);
    CHECK(abc.minCoeff() >= 0.0);
    CHECK(abc.maxCoeff() <= 6.0);
    CHECK((curve.values() - xcurve(g, abc).values()).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(gen_xcurves(g, rng, 0.0), ValidationError);
}

TEST_CASE("lines") {
  const auto g = Grid::uniform(0.0, 1.0, 101);
  Rng rng(3);
  const Curve flat = gen_lines(g, 0.0, rng);
  CHECK((flat.values().array() - flat.values()[0]).abs().maxCoeff() == 0.0);
  const Curve l = gen_lines(g, 2.5, rng);
  CHECK(std::abs((l.values()[100] - l.values()[0]) - 2.5) < 1e-12);

  double sum = 0.0;
  const int reps = 10000;
  for (int i = 0; i < reps; ++i) sum += gen_lines(g, 1.0, rng).values()[0];
  CHECK(std::abs(sum / reps) < 3.0 / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("true direction") {
  const Direction th = true_direction();
  CHECK(th.coeffs()[1] == 1.741539);
  CHECK(th.coeffs()[5] == -1.741539);
  CHECK(th(0.5) > 0.0);
}

TEST_CASE("design contents") {
  SUBCASE("design A") {
    DesignSpec s;
    const auto d = gen_design(s);
    CHECK(d.train.n() == 100);
    CHECK(d.test.n() == 100);
    CHECK(d.train.p() == 101);
    CHECK(d.truth.impact_abscissae == std::vector<double>{0.18, 0.73});
    CHECK(d.truth.impact_indices == std::vector<Index>{18, 73});
    CHECK(d.truth.beta_true[18] == 2.0);
    CHECK(d.truth.beta_true[73] == -3.0);
    CHECK(d.truth.beta_true.cwiseAbs().sum() == 5.0);
    for (Index i = 0; i < 100; ++i) CHECK(d.train.zeta()(i, 0) == 0.0);
    for (double t : d.truth.impact_abscissae) CHECK(d.truth.in_good_region(t));
  }
  SUBCASE("design B zeta lines share the slope of X") {
    DesignSpec s;
    s.kind = DesignKind::B;
    s.n = 30;
    const auto d = gen_design(s);
    CHECK(d.truth.impact_indices == std::vector<Index>{2, 50, 70});
    // recover (a, b, c) from each X curve by least squares on the three basis functions
    const Eigen::VectorXd t = d.train.x_grid()->points();
    Eigen::MatrixXd basis(t.size(), 3);
    for (Index j = 0; j < t.size(); ++j) {
      basis(j, 0) = std::cos(2.0 * M_PI * t[j]);
      basis(j, 1) = std::sin(4.0 * M_PI * t[j]);
      basis(j, 2) = 2.0 * (t[j] - 0.25) * (t[j] - 0.5);
    }
    const auto qr = basis.colPivHouseholderQr();
    for (Index i = 0; i < d.train.n(); ++i) {
      const Eigen::Vector3d abc = qr.solve(d.train.x().row(i).transpose());
      CHECK(abc.minCoeff() >= -1e-9);
      CHECK(abc.maxCoeff() <= 5.0 + 1e-9);
      const Eigen::VectorXd z = d.train.zeta().row(i).transpose();
      CHECK(std::abs((z[100] - z[0]) - abc[2]) < 1e-9);
    }
    for (double t0 : {0.02, 0.5, 0.7}) CHECK(d.truth.in_good_region(t0));
  }
  SUBCASE("design C") {
    DesignSpec s;
    s.kind = DesignKind::C;
    const auto d = gen_design(s);
    const std::vector<Index> expect{15, 16, 17, 18, 19, 70, 71, 72, 73, 74};
    CHECK(d.truth.impact_indices == expect);
    Index nz = 0;
    for (Index j = 0; j < 101; ++j) nz += d.truth.beta_true[j] != 0.0;
    CHECK(nz == 10);
    for (Index j : expect) CHECK(d.truth.in_good_region(j / 100.0));
  }
  SUBCASE("snapping on coarse grids") {
    DesignSpec s;
    s.kind = DesignKind::C;
    s.p = 11;
    const auto d = gen_design(s);
    // collisions add up, so the coefficient mass is preserved
    CHECK(d.truth.beta_true.sum() == doctest::Approx(1.0 + 1.2 + 1.0 + 1.2 + 1.0 + 1.0 + 1.2 - 1.2 - 1.2 - 1.2));
    for (std::size_t i = 0; i < d.truth.impact_indices.size(); ++i)
      CHECK(d.truth.impact_abscissae[i] == d.train.zeta_grid()->points()[d.truth.impact_indices[i]]);
    s.kind = DesignKind::A;
    s.p = 50;
    const auto a = gen_design(s);
    CHECK(a.truth.impact_indices == std::vector<Index>{9, 36});
  }
  SUBCASE("validation") {
    DesignSpec s;
    s.p = 1;
    CHECK_THROWS_AS(gen_design(s), ValidationError);
    s = DesignSpec{};
    s.n = 3;
    CHECK_THROWS_AS(gen_design(s), ValidationError);
  }
}

TEST_CASE("responses agree with the truth record") {
  for (auto kind : {DesignKind::A, DesignKind::B, DesignKind::C}) {
    DesignSpec s;
    s.kind = kind;
    s.seed = 17;
    const auto d = gen_design(s, 3);
    const auto again = gen_design(s, 3);
    CHECK(again.train.y() == d.train.y());
    CHECK(again.test.x() == d.test.x());
    for (const auto* part : {&d.train, &d.test}) {
      const Eigen::VectorXd& eps = part == &d.train ? d.noise_train : d.noise_test;
      for (Index i = 0; i < part->n(); ++i) {
        const double u = project(d.truth.theta_true, part->x_curve(i));
        const double expect = part->zeta().row(i).dot(d.truth.beta_true) + u * u * u;
        CHECK(std::abs(part->y()[i] - eps[i] - expect) < 1e-10);
      }
    }
    s.noise_free = true;
    const auto clean = gen_design(s, 3);
    CHECK(clean.noise_train.isZero(0.0));
    CHECK((clean.train.y() - (d.train.y() - d.noise_train)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("noise is a tenth of the regression spread") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (auto kind : {DesignKind::A, DesignKind::B, DesignKind::C}) {
      DesignSpec s;
      s.kind = kind;
      s.seed = seed;
      const auto d = gen_design(s);
      Eigen::VectorXd eps(200), reg(200);
      eps << d.noise_train, d.noise_test;
      reg << d.train.y() - d.noise_train, d.test.y() - d.noise_test;
      auto sd = [](const Eigen::VectorXd& v) {
        return std::sqrt((v.array() - v.mean()).square().sum() / (v.size() - 1.0));
      };
      const double ratio = sd(eps) / sd(reg);
      CHECK(ratio >= 0.08);
      CHECK(ratio <= 0.12);
      CHECK(d.truth.noise_sd == doctest::Approx(0.1 * sd(reg)).epsilon(1e-12));
    }
  }
}

TEST_CASE("impact metrics") {
  DesignSpec s;
  s.kind = DesignKind::B;
  s.n = 10;
  s.n_test = 1;
  const auto d = gen_design(s);
  const Grid& g = *d.train.zeta_grid();
  auto counts = impact_metrics(SupportSet{{2, 50, 70}}, d.truth, g);
  CHECK(counts.right == 3);
  CHECK(counts.wrong == 0);
  counts = impact_metrics(SupportSet{}, d.truth, g);
  CHECK(counts.right == 0);
  CHECK(counts.wrong == 0);
  counts = impact_metrics(SupportSet{{30}}, d.truth, g);
  CHECK(counts.right == 0);
  CHECK(counts.wrong == 1);
  // interval ends are inside
  counts = impact_metrics(SupportSet{{0, 5, 47, 53, 67, 73, 74}}, d.truth, g);
  CHECK(counts.right == 6);
  CHECK(counts.wrong == 1);
  CHECK_THROWS_AS(impact_metrics(SupportSet{{101}}, d.truth, g), ValidationError);
}

TEST_CASE("names") {
  for (auto k : {DesignKind::A, DesignKind::B, DesignKind::C}) CHECK(parse_design(to_string(k)) == k);
  CHECK(parse_design("C") == DesignKind::C);
  CHECK_THROWS_AS(parse_design("designD"), ValidationError);
  for (auto m : {Method::fassmr, Method::iassmr, Method::pls}) CHECK(parse_method(to_string(m)) == m);
  CHECK_THROWS_AS(parse_method("lasso"), ValidationError);
}

TEST_CASE("summaries") {
  std::vector<ReplicateResult> rs(4);
  const double mseps[4] = {1.0, 2.0, 4.0, 100.0};
  for (int i = 0; i < 4; ++i) {
    rs[static_cast<std::size_t>(i)].replicate = i;
    rs[static_cast<std::size_t>(i)].msep = mseps[i];
    rs[static_cast<std::size_t>(i)].right = i;
    rs[static_cast<std::size_t>(i)].wrong = 1;
    rs[static_cast<std::size_t>(i)].seconds = 2.0;
  }
  rs[3].failed = true;
  const auto s = summarize(Method::fassmr, rs);
  CHECK(s.replicates == 4);
  CHECK(s.failures == 1);
  CHECK(s.mean_msep == doctest::Approx(7.0 / 3.0));
  CHECK(s.sd_msep == doctest::Approx(std::sqrt(((1 - 7.0 / 3) * (1 - 7.0 / 3) + (2 - 7.0 / 3) * (2 - 7.0 / 3) + (4 - 7.0 / 3) * (4 - 7.0 / 3)) / 2.0)));
  CHECK(s.mean_right == doctest::Approx(1.0));
  CHECK(s.mean_wrong == doctest::Approx(1.0));

  // other methods are ignored
  rs[0].method = Method::pls;
  CHECK(summarize(Method::fassmr, rs).replicates == 3);

  for (auto& r : rs) r.failed = true;
  CHECK(std::isnan(summarize(Method::pls, rs).mean_msep));
}

TEST_CASE("monte carlo") {
  DesignSpec spec;
  spec.n = 40;
  spec.n_test = 20;
  spec.seed = 99;
  MonteCarloOptions o;
  o.fassmr = cheap_fassmr();
  o.methods = {Method::fassmr};

  SUBCASE("one replicate") {
    o.M = 1;
    const auto s = monte_carlo(spec, o);
    REQUIRE(s.replicates.size() == 1);
    REQUIRE(s.methods.size() == 1);
    const auto& r = s.replicates[0];
    CHECK_FALSE(r.failed);
    CHECK(s.methods[0].mean_msep == r.msep);
    CHECK(s.methods[0].mean_right == static_cast<double>(r.right));
    CHECK(s.methods[0].mean_wrong == static_cast<double>(r.wrong));
    CHECK(r.right + r.wrong == static_cast<Index>(r.support.size()));

    // msep recomputed from scratch
    const auto d = gen_design(spec, 0);
    const auto fit = fassmr_fit(d.train, o.fassmr);
    CHECK(msep(predict(fit, d.test), d.test.y()) == r.msep);
  }

  SUBCASE("doubling M keeps the first replicates and workers do not matter") {
    o.M = 2;
    const auto a = monte_carlo(spec, o);
    o.M = 4;
    o.workers = 2;
    const auto b = monte_carlo(spec, o);
    REQUIRE(b.replicates.size() == 4);
    for (std::size_t i = 0; i < 2; ++i) CHECK(same_replicate(a.replicates[i], b.replicates[i]));
    o.workers = 1;
    const auto c = monte_carlo(spec, o);
    for (std::size_t i = 0; i < 4; ++i) CHECK(same_replicate(b.replicates[i], c.replicates[i]));
    CHECK(same_summary(b.methods[0], c.methods[0]));
    for (const auto& r : c.replicates) CHECK(r.right + r.wrong == static_cast<Index>(r.support.size()));
  }

  SUBCASE("several methods") {
    o.M = 2;
    o.methods = {Method::fassmr, Method::iassmr};
    spec.kind = DesignKind::B;
    const auto s = monte_carlo(spec, o);
    REQUIRE(s.replicates.size() == 4);
    CHECK(s.replicates[0].method == Method::fassmr);
    CHECK(s.replicates[1].method == Method::iassmr);
    CHECK(s.replicates[1].replicate == 0);
    CHECK(s.methods.size() == 2);
  }

  o.M = 0;
  CHECK_THROWS_AS(monte_carlo(spec, o), ValidationError);
}
