#include "mfplsim/export.hpp"

#include <fstream>
#include <sstream>

#include "mfplsim/csv_io.hpp"

namespace mfplsim {

namespace {

Json vec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd to_vec(const Json& a) {
  if (!a.is_array()) throw DataError("expected a numeric array in fit file");
  Eigen::VectorXd v(static_cast<Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw DataError("non-numeric entry in fit file array");
    v[static_cast<Index>(i)] = a[i].get<double>();
  }
  return v;
}

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("fit file lacks field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(std::string("fit file field '") + key + "' has the wrong type");
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

}  // namespace

Json direction_to_json(const Direction& d) {
  const auto& b = *d.basis();
  return Json{{"order", b.order()},
              {"interior_knots", b.interior_knots()},
              {"domain", {b.lower(), b.upper()}},
              {"coeffs", vec(d.coeffs())}};
}

Direction direction_from_json(const Json& j) {
  const auto dom = field<std::vector<double>>(j, "domain");
  if (dom.size() != 2) throw DataError("direction domain must have two entries");
  auto basis = std::make_shared<const BSplineBasis>(field<int>(j, "order"), field<int>(j, "interior_knots"),
                                                    dom[0], dom[1]);
  return Direction(basis, to_vec(j.at("coeffs")));
}

Json tuning_to_json(const ChosenTuning& c) {
  return Json{{"w", c.w},     {"direction_index", c.direction_index},
              {"h", c.h},     {"lambda", c.lambda},
              {"bic", c.bic}, {"df", c.df},
              {"rss", c.rss}, {"converged", c.converged}};
}

namespace {

ChosenTuning tuning_from_json(const Json& j) {
  ChosenTuning c;
  c.w = field<Index>(j, "w");
  c.direction_index = field<std::size_t>(j, "direction_index");
  c.h = field<double>(j, "h");
  c.lambda = field<double>(j, "lambda");
  c.bic = field<double>(j, "bic");
  c.df = field<Index>(j, "df");
  c.rss = field<double>(j, "rss");
  c.converged = field<bool>(j, "converged");
  return c;
}

}  // namespace

Json stage_trace_to_json(const StageTrace& t) {
  Json recs = Json::array();
  for (const auto& r : t.records) {
    Json rec{{"w", r.w},
             {"stage1", tuning_to_json(r.stage1)},
             {"stage1_support", r.stage1_support},
             {"second_stage_size", r.second_stage.size()},
             {"second_stage", r.second_stage},
             {"stage2_valid", r.stage2_valid}};
    if (r.stage2_valid) {
      rec["stage2"] = tuning_to_json(r.stage2);
      rec["bic2"] = r.stage2.bic;
    } else {
      rec["stage2"] = nullptr;
      rec["bic2"] = nullptr;
    }
    recs.push_back(std::move(rec));
  }
  return Json{{"n1", t.n1}, {"n2", t.n2}, {"chosen_w", t.chosen_w}, {"degenerate", t.degenerate},
              {"records", std::move(recs)}};
}

Json fit_to_json(const FitResult& fit) {
  const Eigen::VectorXd& t = fit.zeta_grid->points();
  Json abscissae = Json::array();
  Json support_beta = Json::array();
  for (Index j : fit.support.indices) {
    abscissae.push_back(t[j]);
    support_beta.push_back(fit.beta_full[j]);
  }
  Json j{{"method", fit.method},
         {"support_indices", fit.support.indices},
         {"support_abscissae", std::move(abscissae)},
         {"support_beta", std::move(support_beta)},
         {"bic", fit.chosen.bic},
         {"chosen", tuning_to_json(fit.chosen)},
         {"theta", direction_to_json(fit.theta_hat)},
         {"interior_knots", fit.interior_knots},
         {"representatives", fit.representatives},
         {"fits", fit.fits},
         {"nonconverged", fit.nonconverged},
         {"all_nonconverged", fit.all_nonconverged},
         {"degenerate", fit.degenerate},
         {"zeta_grid", vec(t)},
         {"beta", vec(fit.beta_full)},
         {"link",
          {{"h", fit.link_state.h},
           {"theta", direction_to_json(fit.link_state.theta)},
           {"x_grid", vec(fit.link_state.x_grid->points())},
           {"projections", vec(fit.link_state.projections)},
           {"residuals", vec(fit.link_state.residuals)}}}};
  if (fit.stage_trace) j["stage_trace"] = stage_trace_to_json(*fit.stage_trace);
  return j;
}

FitResult fit_from_json(const Json& j) {
  if (!j.is_object()) throw DataError("fit file is not a JSON object");
  const auto zgrid = std::make_shared<const Grid>(to_vec(j.at("zeta_grid")));
  const Eigen::VectorXd beta = to_vec(j.at("beta"));
  if (beta.size() != zgrid->size()) throw DataError("fit file beta length differs from its zeta grid");
  const Json& l = j.at("link");
  LinkState link{direction_from_json(l.at("theta")), field<double>(l, "h"),
                 std::make_shared<const Grid>(to_vec(l.at("x_grid"))), to_vec(l.at("projections")),
                 to_vec(l.at("residuals"))};
  if (link.projections.size() != link.residuals.size() || link.projections.size() == 0)
    throw DataError("fit file link state is inconsistent");
  FitResult r(field<std::string>(j, "method"), zgrid, beta, direction_from_json(j.at("theta")),
              tuning_from_json(j.at("chosen")), std::move(link));
  r.interior_knots = field<int>(j, "interior_knots");
  r.representatives = field<std::vector<Index>>(j, "representatives");
  r.degenerate = field<bool>(j, "degenerate");
  return r;
}

Json truth_to_json(const GroundTruth& t, const DesignSpec& spec) {
  Json regions = Json::array();
  for (const auto& iv : t.good_region) regions.push_back({iv.lo, iv.hi});
  Json beta = Json::array();
  for (Index j : t.impact_indices) beta.push_back(t.beta_true[j]);
  return Json{{"design", to_string(spec.kind)},
              {"n", spec.n},
              {"p", spec.p},
              {"n_test", spec.n_test},
              {"seed", spec.seed},
              {"noise_free", spec.noise_free},
              {"impact_indices", t.impact_indices},
              {"impact_abscissae", t.impact_abscissae},
              {"impact_beta", std::move(beta)},
              {"good_region", std::move(regions)},
              {"noise_sd", t.noise_sd},
              {"theta", direction_to_json(t.theta_true)}};
}

Json dataset_metadata(const BiFunctionalDataset& d) {
  return Json{{"n", d.n()},
              {"p", d.p()},
              {"zeta_domain", {d.zeta_grid()->front(), d.zeta_grid()->back()}},
              {"x_points", d.x_grid()->size()},
              {"x_domain", {d.x_grid()->front(), d.x_grid()->back()}},
              {"y_mean", d.y().mean()},
              {"y_min", d.y().minCoeff()},
              {"y_max", d.y().maxCoeff()}};
}

Json summary_to_json(const MetricsSummary& s) {
  Json methods = Json::array();
  const double base = s.methods.empty() ? 0.0 : s.methods.front().mean_seconds;
  for (const auto& m : s.methods) {
    methods.push_back({{"method", to_string(m.method)},
                       {"replicates", m.replicates},
                       {"failures", m.failures},
                       {"mean_msep", m.mean_msep},
                       {"sd_msep", m.sd_msep},
                       {"mean_right", m.mean_right},
                       {"mean_wrong", m.mean_wrong},
                       {"mean_seconds", m.mean_seconds},
                       {"time_ratio", base > 0.0 ? m.mean_seconds / base : 0.0}});
  }
  return Json{{"design", to_string(s.spec.kind)}, {"n", s.spec.n},   {"p", s.spec.p},
              {"n_test", s.spec.n_test},          {"seed", s.spec.seed}, {"M", s.M},
              {"methods", std::move(methods)}};
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
  if (!f) throw DataError("failed writing " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_coefficients_csv(const std::filesystem::path& path, const FitResult& fit) {
  auto f = open_out(path);
  f << "index,t,beta\n";
  const Eigen::VectorXd& t = fit.zeta_grid->points();
  for (Index j = 0; j < t.size(); ++j)
    f << j << ',' << format_double(t[j]) << ',' << format_double(fit.beta_full[j]) << '\n';
}

void write_link_csv(const std::filesystem::path& path, const FitResult& fit) {
  auto f = open_out(path);
  f << "sample,projection,residual,link\n";
  const auto& s = fit.link_state;
  for (Index i = 0; i < s.projections.size(); ++i) {
    const LinkEstimate m = evaluate_link(s, s.projections[i]);
    f << i << ',' << format_double(s.projections[i]) << ',' << format_double(s.residuals[i]) << ','
      << format_double(m.value) << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path, const MetricsSummary& s) {
  auto f = open_out(path);
  f << "design,n,p,M,method,replicates,failures,mean_msep,sd_msep,mean_right,mean_wrong,mean_seconds,time_ratio\n";
  const double base = s.methods.empty() ? 0.0 : s.methods.front().mean_seconds;
  for (const auto& m : s.methods) {
    f << to_string(s.spec.kind) << ',' << s.spec.n << ',' << s.spec.p << ',' << s.M << ','
      << to_string(m.method) << ',' << m.replicates << ',' << m.failures << ',' << format_double(m.mean_msep)
      << ',' << format_double(m.sd_msep) << ',' << format_double(m.mean_right) << ','
      << format_double(m.mean_wrong) << ',' << format_double(m.mean_seconds) << ','
      << format_double(base > 0.0 ? m.mean_seconds / base : 0.0) << '\n';
  }
}

void write_replicates_csv(const std::filesystem::path& path, const MetricsSummary& s) {
  auto f = open_out(path);
  f << "replicate,method,failed,msep,right,wrong,support_size,w,h,lambda,bic,seconds\n";
  for (const auto& r : s.replicates) {
    f << r.replicate << ',' << to_string(r.method) << ',' << (r.failed ? 1 : 0) << ','
      << format_double(r.msep) << ',' << r.right << ',' << r.wrong << ',' << r.support.size() << ','
      << r.chosen.w << ',' << format_double(r.chosen.h) << ',' << format_double(r.chosen.lambda) << ','
      << format_double(r.chosen.bic) << ',' << format_double(r.seconds) << '\n';
  }
}

}  // namespace mfplsim
