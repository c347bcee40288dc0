#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfplsim/csv_io.hpp"
#include "mfplsim/errors.hpp"
#include "mfplsim/export.hpp"
#include "mfplsim/iassmr.hpp"
#include "mfplsim/simlab.hpp"

namespace fs = std::filesystem;
using namespace mfplsim;

namespace {

// Every config key doubles as a flag (--w-set for w_set) and an environment
// variable (MFPLSIM_W_SET). Precedence: defaults < config file < env < flags.
enum class Kind { integer, number, text, boolean, integers, numbers, texts, opt_integer };

struct Key {
  std::string name;
  Kind kind;
  Json def;
  std::string help;
};

std::string flag_name(const std::string& key) {
  std::string s = "--" + key;
  for (char& c : s)
    if (c == '_') c = '-';
  return s;
}

std::string env_name(const std::string& key) {
  std::string s = "MFPLSIM_" + key;
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

long long to_integer(const std::string& s, const std::string& where) {
  long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ValidationError(where + ": expected an integer, got '" + s + "'");
  return v;
}

double to_number(const std::string& s, const std::string& where) {
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ValidationError(where + ": expected a number, got '" + s + "'");
  return v;
}

Json from_text(const Key& k, const std::string& s, const std::string& where) {
  switch (k.kind) {
    case Kind::integer: return to_integer(s, where);
    case Kind::number: return to_number(s, where);
    case Kind::text: return s;
    case Kind::boolean:
      if (s == "true" || s == "1") return true;
      if (s == "false" || s == "0") return false;
      throw ValidationError(where + ": expected true or false, got '" + s + "'");
    case Kind::opt_integer:
      if (s == "null" || s.empty()) return nullptr;
      return to_integer(s, where);
    case Kind::integers: {
      Json a = Json::array();
      for (const auto& t : split(s)) a.push_back(to_integer(t, where));
      return a;
    }
    case Kind::numbers: {
      Json a = Json::array();
      for (const auto& t : split(s)) a.push_back(to_number(t, where));
      return a;
    }
    case Kind::texts: {
      Json a = Json::array();
      for (const auto& t : split(s)) a.push_back(t);
      return a;
    }
  }
  return nullptr;
}

void check_json(const Key& k, const Json& v, const std::string& where) {
  auto all = [&](auto pred) { return v.is_array() && std::all_of(v.begin(), v.end(), pred); };
  bool ok = false;
  switch (k.kind) {
    case Kind::integer: ok = v.is_number_integer(); break;
    case Kind::number: ok = v.is_number(); break;
    case Kind::text: ok = v.is_string(); break;
    case Kind::boolean: ok = v.is_boolean(); break;
    case Kind::opt_integer: ok = v.is_null() || v.is_number_integer(); break;
    case Kind::integers: ok = all([](const Json& e) { return e.is_number_integer(); }); break;
    case Kind::numbers: ok = all([](const Json& e) { return e.is_number(); }); break;
    case Kind::texts: ok = all([](const Json& e) { return e.is_string(); }); break;
  }
  if (!ok) throw ValidationError(where + ": wrong type for key '" + k.name + "'");
}

class Settings {
public:
  explicit Settings(std::vector<Key> keys) : keys_(std::move(keys)) {
    for (const auto& k : keys_) values_[k.name] = k.def;
  }

  void bind(CLI::App& app) {
    app.add_option("--config", config_path_, "JSON config file; keys as below with '_' for '-'");
    for (const auto& k : keys_) app.add_option(flag_name(k.name), raw_[k.name], k.help);
  }

  void resolve(const CLI::App& app) {
    if (!config_path_.empty()) {
      const Json cfg = read_json(config_path_);
      if (!cfg.is_object()) throw ValidationError("config " + config_path_ + ": top level must be an object");
      for (const auto& [name, v] : cfg.items()) {
        const Key* k = find(name);
        if (!k) throw ValidationError("config " + config_path_ + ": unknown key '" + name + "'");
        check_json(*k, v, "config " + config_path_);
        values_[name] = v;
      }
    }
    for (const auto& k : keys_) {
      if (const char* e = std::getenv(env_name(k.name).c_str()))
        values_[k.name] = from_text(k, e, env_name(k.name));
    }
    for (const auto& k : keys_) {
      if (app.count(flag_name(k.name)) > 0) values_[k.name] = from_text(k, raw_[k.name], flag_name(k.name));
    }
  }

  const Json& operator[](const std::string& key) const { return values_.at(key); }
  std::string str(const std::string& key) const { return values_.at(key).get<std::string>(); }
  long long integer(const std::string& key) const { return values_.at(key).get<long long>(); }
  double number(const std::string& key) const { return values_.at(key).get<double>(); }
  bool boolean(const std::string& key) const { return values_.at(key).get<bool>(); }

  std::optional<Index> opt_index(const std::string& key) const {
    const Json& v = values_.at(key);
    if (v.is_null()) return std::nullopt;
    return static_cast<Index>(v.get<long long>());
  }

  Json echo() const {
    Json j = Json::object();
    for (const auto& k : keys_) j[k.name] = values_.at(k.name);
    return j;
  }

private:
  const Key* find(const std::string& name) const {
    for (const auto& k : keys_)
      if (k.name == name) return &k;
    return nullptr;
  }

  std::vector<Key> keys_;
  std::map<std::string, Json> values_;
  std::map<std::string, std::string> raw_;
  std::string config_path_;
};

Json default_quantiles() {
  Json a = Json::array();
  for (double q : default_bandwidth_quantiles()) a.push_back(q);
  return a;
}

std::vector<Key> tuning_keys() {
  return {
      {"w_set", Kind::integers, Json::array({10, 15, 20}), "candidate reduction sizes w"},
      {"lambda_min_ratio", Kind::number, 0.01, "smallest lambda as a fraction of lambda_max"},
      {"lambda_grid_size", Kind::integer, 100, "points on the lambda path"},
      {"bandwidth_quantiles", Kind::numbers, default_quantiles(), "quantiles of projected distances used as h"},
      {"m_knots", Kind::integers, Json::array({3}), "interior knot counts for the direction basis"},
      {"scad_a", Kind::number, 3.7, "SCAD shape parameter"},
      {"tol", Kind::number, 1e-6, "penalised fit tolerance"},
      {"max_iter", Kind::integer, 1000, "penalised fit iteration cap"},
      {"n1", Kind::opt_integer, nullptr, "first subsample size (iassmr)"},
      {"n2", Kind::opt_integer, nullptr, "second subsample size (iassmr)"},
      {"workers", Kind::integer, 1, "worker threads"},
  };
}

std::vector<Key> design_keys() {
  return {
      {"design", Kind::text, "A", "simulation design: A, B or C"},
      {"n", Kind::integer, 100, "training sample size"},
      {"p", Kind::integer, 101, "points on the zeta grid"},
      {"n_test", Kind::integer, 100, "test sample size"},
      {"seed", Kind::integer, 1, "master seed"},
  };
}

template <typename... V>
std::vector<Key> concat(V... parts) {
  std::vector<Key> out;
  (out.insert(out.end(), parts.begin(), parts.end()), ...);
  return out;
}

FassmrConfig fassmr_config(const Settings& s) {
  FassmrConfig c;
  c.w_candidates = s["w_set"].get<std::vector<Index>>();
  c.bandwidth_quantiles = s["bandwidth_quantiles"].get<std::vector<double>>();
  c.scad.a = s.number("scad_a");
  c.scad.lambda_min_ratio = s.number("lambda_min_ratio");
  c.scad.lambda_grid_size = static_cast<int>(s.integer("lambda_grid_size"));
  c.scad.tol = s.number("tol");
  c.scad.max_iter = static_cast<int>(s.integer("max_iter"));
  c.workers = static_cast<int>(s.integer("workers"));
  if (c.workers < 1) throw ValidationError("workers must be at least 1");
  c.scad.validate();
  return c;
}

IassmrConfig iassmr_config(const Settings& s, const FassmrConfig& f) {
  IassmrConfig c;
  c.stage1 = f;
  c.stage2_scad = f.scad;
  c.stage2_bandwidth_quantiles = f.bandwidth_quantiles;
  c.n1 = s.opt_index("n1");
  c.n2 = s.opt_index("n2");
  return c;
}

std::vector<int> knot_list(const Settings& s) {
  auto m = s["m_knots"].get<std::vector<int>>();
  if (m.empty()) throw ValidationError("m_knots is empty");
  for (int k : m)
    if (k < 0) throw ValidationError("m_knots entries must be non-negative");
  return m;
}

fs::path prepare_out(const std::string& dir) {
  const fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw DataError("cannot create output directory " + dir);
  return out;
}

Json support_json(const FitResult& fit) {
  Json idx = Json::array(), ab = Json::array();
  for (Index j : fit.support.indices) {
    idx.push_back(j);
    ab.push_back(fit.zeta_grid->points()[j]);
  }
  return Json{{"indices", idx}, {"abscissae", ab}};
}

int cmd_simulate(const Settings& s) {
  DesignSpec spec;
  spec.kind = parse_design(s.str("design"));
  spec.n = s.integer("n");
  spec.p = s.integer("p");
  spec.n_test = s.integer("n_test");
  spec.seed = static_cast<std::uint64_t>(s.integer("seed"));
  spec.noise_free = s.boolean("noise_free");
  spec.validate();
  const auto sim = gen_design(spec, static_cast<std::uint64_t>(s.integer("replicate")));

  const fs::path out = prepare_out(s.str("out"));
  write_json(out / "config.json", s.echo());
  for (const auto& [name, d] : {std::pair{"train", &sim.train}, std::pair{"test", &sim.test}}) {
    const fs::path dir = prepare_out((out / name).string());
    write_csv(*d, dir / "zeta.csv", dir / "x.csv", dir / "y.csv");
  }
  write_json(out / "truth.json", truth_to_json(sim.truth, spec));
  std::cout << Json{{"out", out.string()}, {"train", dataset_metadata(sim.train)},
                    {"impact_abscissae", sim.truth.impact_abscissae}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_fit(const Settings& s) {
  const Method method = parse_method(s.str("method"));
  FassmrConfig fc = fassmr_config(s);
  const auto knots = knot_list(s);
  IassmrConfig ic = iassmr_config(s, fc);
  if (s.str("zeta").empty() || s.str("x").empty() || s.str("y").empty())
    throw ValidationError("fit needs --zeta, --x and --y");

  const auto data = load_csv(s.str("zeta"), s.str("x"), s.str("y"));
  if (method == Method::iassmr) ic.resolve_split(data.n());
  const fs::path out = prepare_out(s.str("out"));
  write_json(out / "config.json", s.echo());

  auto run = [&](const BiFunctionalDataset& d, const FassmrConfig& c) {
    switch (method) {
      case Method::fassmr: return fassmr_fit(d, c);
      case Method::pls: return standard_pls_fit(d, c);
      case Method::iassmr: {
        IassmrConfig cc = ic;
        cc.stage1 = c;
        return iassmr_fit(d, cc);
      }
    }
    throw ValidationError("unknown method");
  };
  const FitResult fit = select_knots(data, fc, knots, run);
  if (fit.all_nonconverged) throw NumericalError("no penalised fit converged");

  write_json(out / "fit.json", fit_to_json(fit));
  write_coefficients_csv(out / "coefficients.csv", fit);
  write_link_csv(out / "link.csv", fit);
  if (fit.stage_trace) write_json(out / "stage_trace.json", stage_trace_to_json(*fit.stage_trace));
  if (s.boolean("dump_weights")) {
    const Eigen::MatrixXd w = nw_weights_from_projections(fit.link_state.projections, fit.link_state.h);
    // header row holds the column (training sample) indices
    write_curve_csv(out / "weights.csv", Grid(Eigen::VectorXd::LinSpaced(w.cols(), 0.0, static_cast<double>(w.cols() - 1))), w);
  }

  std::cout << Json{{"method", fit.method},
                    {"support", support_json(fit)},
                    {"chosen", tuning_to_json(fit.chosen)},
                    {"interior_knots", fit.interior_knots},
                    {"degenerate", fit.degenerate},
                    {"nonconverged", fit.nonconverged}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_predict(const Settings& s) {
  if (s.str("fit").empty() || s.str("zeta").empty() || s.str("x").empty())
    throw ValidationError("predict needs --fit, --zeta and --x");
  const FitResult fit = fit_from_json(read_json(s.str("fit")));
  const CurveTable zeta = read_curve_csv(s.str("zeta"));
  const CurveTable x = read_curve_csv(s.str("x"));
  if (zeta.values.rows() != x.values.rows())
    throw DataError("zeta and x files have different row counts");

  const fs::path out = prepare_out(s.str("out"));
  write_json(out / "config.json", s.echo());
  const Index n = zeta.values.rows();
  Eigen::VectorXd pred(n);
  std::ofstream f(out / "predictions.csv");
  if (!f) throw DataError("cannot write " + (out / "predictions.csv").string());
  f << "row,prediction,extrapolated\n";
  Index extrapolated = 0;
  for (Index i = 0; i < n; ++i) {
    const Prediction p = predict(fit, Curve(zeta.grid, zeta.values.row(i).transpose()),
                                 Curve(x.grid, x.values.row(i).transpose()));
    pred[i] = p.value;
    extrapolated += p.extrapolated ? 1 : 0;
    f << i << ',' << format_double(p.value) << ',' << (p.extrapolated ? 1 : 0) << '\n';
  }
  if (!f) throw DataError("failed writing predictions.csv");

  Json summary{{"rows", n}, {"extrapolated", extrapolated}};
  if (!s.str("y").empty()) {
    const Eigen::VectorXd y = read_response_csv(s.str("y"));
    if (y.size() != n) throw DataError("response file has " + std::to_string(y.size()) + " rows, expected " + std::to_string(n));
    summary["msep"] = msep(pred, y);
  }
  write_json(out / "predict_summary.json", summary);
  std::cout << summary.dump() << '\n';
  return 0;
}

int cmd_bench(const Settings& s) {
  DesignSpec spec;
  spec.kind = parse_design(s.str("design"));
  spec.n = s.integer("n");
  spec.p = s.integer("p");
  spec.n_test = s.integer("n_test");
  spec.seed = static_cast<std::uint64_t>(s.integer("seed"));
  spec.validate();

  MonteCarloOptions o;
  o.methods.clear();
  for (const auto& m : s["methods"].get<std::vector<std::string>>()) o.methods.push_back(parse_method(m));
  if (o.methods.empty()) throw ValidationError("methods list is empty");
  o.M = s.integer("M");
  o.fassmr = fassmr_config(s);
  o.workers = o.fassmr.workers;
  const auto knots = knot_list(s);
  if (knots.size() != 1) throw ValidationError("bench takes a single m_knots value");
  o.fassmr.direction_set = default_direction_set(knots.front());
  o.iassmr = iassmr_config(s, o.fassmr);
  o.fassmr_rows = s.opt_index("fassmr_rows");

  const fs::path out = prepare_out(s.str("out"));
  write_json(out / "config.json", s.echo());
  const MetricsSummary summary = monte_carlo(spec, o);
  write_summary_csv(out / "summary.csv", summary);
  write_json(out / "summary.json", summary_to_json(summary));
  if (s.boolean("replicates_csv")) write_replicates_csv(out / "replicates.csv", summary);
  std::cout << summary_to_json(summary).dump() << '\n';
  return 0;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::validation: return 2;
    case ErrorKind::data: return 3;
    case ErrorKind::numerical: return 4;
  }
  return 4;
}

std::string kind_name(int code) {
  switch (code) {
    case 2: return "validation";
    case 3: return "data";
    case 4: return "numerical";
  }
  return "internal";
}

int report(int code, const std::string& message) {
  std::cerr << Json{{"error", kind_name(code)}, {"exit_code", code}, {"message", message}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse semiparametric bi-functional regression"};
  app.require_subcommand(1);

  const std::vector<Key> common{{"out", Kind::text, ".", "output directory"}};

  Settings simulate(concat(design_keys(), common,
                           std::vector<Key>{{"replicate", Kind::integer, 0, "replicate index (RNG stream)"},
                                            {"noise_free", Kind::boolean, false, "omit the noise term"}}));
  Settings fit(concat(tuning_keys(), common,
                      std::vector<Key>{{"method", Kind::text, "fassmr", "fassmr, iassmr or pls"},
                                       {"zeta", Kind::text, "", "scalar-covariate curves CSV"},
                                       {"x", Kind::text, "", "functional covariate CSV"},
                                       {"y", Kind::text, "", "response CSV"},
                                       {"seed", Kind::integer, 0, "unused by fit; accepted for uniform configs"},
                                       {"dump_weights", Kind::boolean, false, "write the chosen weight matrix"}}));
  Settings predict(concat(common, std::vector<Key>{{"fit", Kind::text, "", "fit.json from the fit command"},
                                                   {"zeta", Kind::text, "", "scalar-covariate curves CSV"},
                                                   {"x", Kind::text, "", "functional covariate CSV"},
                                                   {"y", Kind::text, "", "optional response CSV for MSEP"}}));
  Settings bench(concat(design_keys(), tuning_keys(), common,
                        std::vector<Key>{{"methods", Kind::texts, Json::array({"fassmr", "pls"}), "methods to compare"},
                                         {"M", Kind::integer, 20, "Monte Carlo replicates"},
                                         {"fassmr_rows", Kind::opt_integer, nullptr, "rows used by fassmr and pls"},
                                         {"replicates_csv", Kind::boolean, false, "also write replicates.csv"}}));

  auto* sim_cmd = app.add_subcommand("simulate", "generate a simulated design");
  auto* fit_cmd = app.add_subcommand("fit", "fit a model to CSV data");
  auto* pred_cmd = app.add_subcommand("predict", "predict from a saved fit");
  auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo comparison of methods");
  simulate.bind(*sim_cmd);
  fit.bind(*fit_cmd);
  predict.bind(*pred_cmd);
  bench.bind(*bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(2, e.what());
  }

  try {
    if (*sim_cmd) {
      simulate.resolve(*sim_cmd);
      return cmd_simulate(simulate);
    }
    if (*fit_cmd) {
      fit.resolve(*fit_cmd);
      return cmd_fit(fit);
    }
    if (*pred_cmd) {
      predict.resolve(*pred_cmd);
      return cmd_predict(predict);
    }
    bench.resolve(*bench_cmd);
    return cmd_bench(bench);
  } catch (const Error& e) {
    return report(exit_code(e.kind()), e.what());
  } catch (const Json::exception& e) {
    return report(2, e.what());
  } catch (const std::exception& e) {
    return report(4, e.what());
  }
}
