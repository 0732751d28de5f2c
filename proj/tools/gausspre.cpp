#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gausspre/activation_fit.hpp"
#include "gausspre/eoc.hpp"
#include "gausspre/error.hpp"
#include "gausspre/kstest.hpp"
#include "gausspre/mellin.hpp"
#include "gausspre/parallel.hpp"
#include "gausspre/propagation.hpp"
#include "gausspre/rng.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace gausspre;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Common {
  std::uint64_t seed = 0;
  std::string out = ".";
  std::size_t threads = 0;
  std::string config;
  std::string cache_dir;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_grid(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t"));
    cell.erase(cell.find_last_not_of(" \t") + 1);
    if (cell.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw DomainError(what + ": '" + cell + "' is not a number");
    }
  }
  if (out.empty()) throw DomainError(what + ": empty list");
  return out;
}

std::vector<std::size_t> parse_count_grid(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  for (double v : parse_grid(text, what)) {
    if (!(v >= 1.0) || v != std::floor(v)) throw DomainError(what + ": entries must be integers >= 1");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

/// Output directory with the conventions every subcommand follows.
class Run {
 public:
  Run(std::string subcommand, const Common& common)
      : subcommand_(std::move(subcommand)), common_(common), dir_(common.out) {
    fs::create_directories(dir_);
  }

  std::ofstream csv(const std::string& name, const std::vector<std::string>& columns) {
    std::ofstream f(dir_ / name);
    if (!f) throw DomainError("cannot write " + (dir_ / name).string());
    f << "# gausspre version=1 seed=" << common_.seed << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) f << (i ? "," : "") << columns[i];
    f << "\n";
    artifacts_.push_back(name);
    return f;
  }

  void add_artifact(const std::string& name) { artifacts_.push_back(name); }
  const fs::path& dir() const { return dir_; }
  json& summary() { return summary_; }

  void manifest(const json& config, const std::string& status) const {
    json m;
    m["tool"] = "gausspre";
    m["version"] = kVersion;
    m["format_version"] = 1;
    m["subcommand"] = subcommand_;
    m["status"] = status;
    m["seed"] = common_.seed;
    m["threads"] = resolve_threads(common_.threads);
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    m["created_utc"] = stamp;
    m["config"] = config;
    json files = json::array();
    for (const auto& a : artifacts_) files.push_back({{"file", a}, {"format_version", 1}});
    m["artifacts"] = files;
    m["summary"] = summary_;
    std::ofstream(dir_ / "manifest.json") << m.dump(2) << "\n";
  }

 private:
  std::string subcommand_;
  Common common_;
  fs::path dir_;
  std::vector<std::string> artifacts_;
  json summary_ = json::object();
};

fs::path cache_path(const Common& c) {
  if (!c.cache_dir.empty()) return c.cache_dir;
  if (const char* env = std::getenv("GAUSSPRE_CACHE"); env && *env) return env;
  return {};
}

/// identity | relu | tanh | phi (needs theta) | delta-omega:<d>,<w> | path to a table file.
Activation resolve_activation(const std::string& name, double theta, const std::string& table,
                              const Common& common) {
  if (!table.empty()) {
    return Activation::from_table(std::make_shared<const ActivationTable>(ActivationTable::load_csv(table)));
  }
  if (name == "phi" || name == "phi-theta") {
    if (!(theta > 2.0)) throw DomainError("activation phi needs --theta > 2");
    return Activation::from_table(shipped_activation(theta, cache_path(common)));
  }
  if (name.rfind("delta-omega:", 0) == 0) {
    const auto parts = parse_grid(name.substr(12), "delta-omega");
    if (parts.size() != 2) throw DomainError("delta-omega activation takes delta,omega");
    return Activation::delta_omega(parts[0], parts[1]);
  }
  if (name == "identity" || name == "id" || name == "relu" || name == "tanh") return Activation::parse(name);
  if (fs::exists(name)) {
    return Activation::from_table(std::make_shared<const ActivationTable>(ActivationTable::load_csv(name)));
  }
  throw DomainError("unknown activation '" + name + "'");
}

Init resolve_init(const std::string& kind, double sigma_w, double sigma_b, double theta) {
  switch (parse_init_kind(kind)) {
    case InitKind::gaussian: return Init::gaussian(sigma_w, sigma_b);
    case InitKind::weibull:
      if (!(theta > 0.0)) throw DomainError("weibull init needs --theta");
      return Init::weibull(theta, sigma_w);
    case InitKind::rademacher: return Init::rademacher(sigma_w);
  }
  return Init{};
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  app->add_option("--out", c.out, "Output directory")->capture_default_str();
  app->add_option("--threads", c.threads, "Worker threads (0: GAUSSPRE_THREADS or all cores)")
      ->capture_default_str();
  app->add_option("--config", c.config, "JSON config file; flags override its values");
  app->add_option("--cache-dir", c.cache_dir,
                  "Directory caching fitted phi_theta tables (default: GAUSSPRE_CACHE)");
}

json resolved_config(const CLI::App* app) {
  json cfg = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string key = opt->get_lnames().front();
    if (key == "help" || key == "config") continue;
    if (opt->get_type_size() == 0) {
      cfg[key] = opt->count() > 0;
    } else if (opt->count() > 0) {
      cfg[key] = opt->results().back();
    } else {
      cfg[key] = opt->get_default_str();
    }
  }
  return cfg;
}

// --- subcommands -----------------------------------------------------------

struct FitArgs {
  double theta = 0.0;
  std::size_t epochs = 100;
  std::size_t steps = 1000;
  double lr = 1e-3;
  double jitter = 0.0;
};

void cmd_fit(const FitArgs& a, const Common& c, Run& run) {
  FitConfig cfg;
  cfg.epochs = a.epochs;
  cfg.steps_per_epoch = a.steps;
  cfg.learning_rate = a.lr;
  cfg.init_jitter = a.jitter;
  cfg.anneal_epochs = std::min<std::size_t>(cfg.anneal_epochs, a.epochs / 2);
  const FitResult result = fit(a.theta, cfg, c.seed);
  const ActivationTable table = build_activation(result.model, result.loss);

  std::ostringstream text;
  table.write_csv(text);
  std::string body = text.str();
  const auto eol = body.find('\n');
  body.insert(eol + 1, "# gausspre version=1 seed=" + std::to_string(c.seed) + "\n");
  std::ofstream(run.dir() / "activation.csv") << body;
  run.add_artifact("activation.csv");

  auto trace = run.csv("fit_trace.csv", {"epoch", "loss", "lr", "theta_prime"});
  for (const auto& row : result.trace) {
    trace << row.epoch << "," << num(row.loss) << "," << num(row.learning_rate) << ","
          << num(row.theta_prime) << "\n";
  }
  run.summary() = {{"theta", a.theta},          {"theta_prime", result.model.theta_prime},
                   {"fit_loss", result.loss},   {"alpha", result.model.alpha},
                   {"gamma", result.model.gamma}, {"lambda1", result.model.lambda1},
                   {"lambda2", result.model.lambda2}};
  std::printf("theta=%g fit_loss=%.6g alpha=%.6g gamma=%.6g lambda1=%.6g lambda2=%.6g\n", a.theta,
              result.loss, result.model.alpha, result.model.gamma, result.model.lambda1,
              result.model.lambda2);
}

struct EocArgs {
  std::string activation;
  std::string table;
  double theta = 0.0;
  std::string sigma_b_grid;
  std::string sigma_b2_grid;
  double sigma_w_min = 0.05;
  double sigma_w_max = 10.0;
  double tol = 1e-3;
};

void cmd_eoc(const EocArgs& a, const Common& c, Run& run) {
  if (!a.sigma_b_grid.empty() && !a.sigma_b2_grid.empty()) {
    throw DomainError("give either --sigma-b-grid or --sigma-b2-grid");
  }
  std::vector<double> grid;
  if (!a.sigma_b2_grid.empty()) {
    for (double v : parse_grid(a.sigma_b2_grid, "--sigma-b2-grid")) {
      if (v < 0.0) throw DomainError("--sigma-b2-grid entries must be >= 0");
      grid.push_back(std::sqrt(v));
    }
  } else {
    grid = parse_grid(a.sigma_b_grid.empty() ? "0" : a.sigma_b_grid, "--sigma-b-grid");
  }
  const Activation act = resolve_activation(a.activation, a.theta, a.table, c);
  EocCurveOptions opt{a.sigma_w_min, a.sigma_w_max, a.tol, c.threads};
  const EocCurve curve = eoc_curve(act, grid, opt);
  auto out = run.csv("eoc.csv", {"sigma_b", "sigma_w", "sigma_b2", "sigma_w2", "v_star", "chi1", "regime"});
  for (const auto& p : curve.points) {
    out << num(p.sigma_b) << "," << num(p.sigma_w) << "," << num(p.sigma_b * p.sigma_b) << ","
        << num(p.sigma_w * p.sigma_w) << "," << num(p.v_star) << "," << num(p.chi1) << ","
        << to_string(p.regime) << "\n";
  }
  auto warn = run.csv("eoc_warnings.csv", {"sigma_b", "reason"});
  for (const auto& w : curve.warnings) warn << num(w.sigma_b) << ",\"" << w.reason << "\"\n";
  run.summary() = {{"activation", act.name()},
                   {"points", curve.points.size()},
                   {"warnings", curve.warnings.size()}};
  for (const auto& p : curve.points) {
    std::printf("sigma_b2=%.6g sigma_w2=%.6g chi1=%.6g\n", p.sigma_b * p.sigma_b, p.sigma_w * p.sigma_w, p.chi1);
  }
  for (const auto& w : curve.warnings) std::printf("warning sigma_b=%.6g: %s\n", w.sigma_b, w.reason.c_str());
}

struct PropagateArgs {
  std::string preset = "custom";
  std::string activation = "tanh";
  std::string table;
  std::string init = "gaussian";
  double theta = 0.0;
  double sigma_w = 1.0;
  double sigma_b = 0.0;
  std::size_t width = 100;
  std::size_t depth = 50;
  std::size_t n0 = 0;
  std::string input = "synthetic";
  std::string normalize = "individual";
  std::string channels;
  std::size_t sample_index = 0;
  std::size_t samples = 10000;
  bool correlation = false;
  std::size_t draws = 100;
  std::size_t classes = 10;
  std::size_t per_class = 5;
  double spread = 0.5;
};

void apply_preset(PropagateArgs& a, const CLI::App* app) {
  auto unset = [&](const char* name) { return app->get_option(name)->count() == 0; };
  if (a.preset == "custom") return;
  if (a.preset == "weibull") {
    if (!(a.theta > 2.0)) throw DomainError("preset weibull needs --theta > 2");
    if (unset("--activation")) a.activation = "phi";
    if (unset("--init")) a.init = "weibull";
    if (unset("--width")) a.width = 100;
    if (unset("--depth")) a.depth = 50;
  } else if (a.preset == "relu-eoc") {
    if (unset("--activation")) a.activation = "relu";
    if (unset("--init")) a.init = "gaussian";
    if (unset("--sigma-w")) a.sigma_w = std::sqrt(2.0);
    if (unset("--sigma-b")) a.sigma_b = 0.0;
    if (unset("--width")) a.width = 10;
    if (unset("--depth")) a.depth = 50;
  } else if (a.preset == "tanh-eoc") {
    if (unset("--activation")) a.activation = "tanh";
    if (unset("--init")) a.init = "gaussian";
    if (unset("--sigma-w")) a.sigma_w = 1.0;
    if (unset("--sigma-b")) a.sigma_b = 0.0;
    if (unset("--width")) a.width = 1000;
    if (unset("--depth")) a.depth = 20;
  } else {
    throw DomainError("unknown preset '" + a.preset + "' (custom, weibull, relu-eoc, tanh-eoc)");
  }
}

void cmd_propagate(PropagateArgs a, const CLI::App* app, const Common& c, Run& run) {
  apply_preset(a, app);
  if (a.width < 1 || a.depth < 1) throw DomainError("--width and --depth must be >= 1");
  Dataset data;
  if (a.input == "synthetic") {
    const std::size_t dim = a.n0 ? a.n0 : a.width;
    data = synthetic_classes(a.classes, a.per_class, dim, a.spread, derive_seed(c.seed, 0xda7a));
  } else {
    data = load_csv_dataset(a.input);
    if (a.n0 && a.n0 != data.dim) throw DomainError("--n0 does not match the dataset dimension");
  }
  if (a.normalize == "dataset") {
    std::vector<std::size_t> lengths;
    if (!a.channels.empty()) lengths = load_channel_sidecar(a.channels);
    data = normalize_whole_dataset(data, lengths);
  } else if (a.normalize == "individual") {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto row = normalize_individual(data.row(i));
      std::copy(row.begin(), row.end(), data.row(i).begin());
    }
  } else if (a.normalize != "none") {
    throw DomainError("--normalize must be individual, dataset or none");
  }
  if (a.sample_index >= data.size()) throw DomainError("--sample-index outside the dataset");

  std::vector<std::size_t> widths{data.dim};
  for (std::size_t l = 0; l < a.depth; ++l) widths.push_back(a.width);
  const NetworkConfig net{widths, resolve_activation(a.activation, a.theta, a.table, c),
                          resolve_init(a.init, a.sigma_w, a.sigma_b, a.theta)};
  const auto x = data.row(a.sample_index);
  const PropagationReport report = layer_distribution_experiment(net, x, a.samples, c.seed, c.threads);
  auto out = run.csv("propagation.csv",
                     {"layer", "ks_raw", "ks_standardized", "mean", "std", "threshold", "samples"});
  std::size_t above = 0;
  for (const auto& l : report.layers) {
    out << l.layer << "," << num(l.ks_raw) << "," << num(l.ks_standardized) << "," << num(l.mean)
        << "," << num(l.std) << "," << num(report.threshold) << "," << report.samples << "\n";
    above += l.ks_standardized > report.threshold ? 1 : 0;
  }
  run.summary() = {{"activation", net.activation.name()}, {"init", net.init.name()},
                   {"layers", report.layers.size()},      {"threshold", report.threshold},
                   {"layers_above_threshold", above},     {"input_dim", data.dim}};
  std::printf("layers=%zu threshold=%.6g layers_above_threshold=%zu last_ks_standardized=%.6g\n",
              report.layers.size(), report.threshold, above, report.layers.back().ks_standardized);

  if (a.correlation) {
    const CorrelationReport corr = correlation_experiment(data, net, a.draws, derive_seed(c.seed, 0xc0), c.threads);
    auto cf = run.csv("correlation.csv", {"layer", "p", "q", "label_p", "label_q", "c"});
    for (std::size_t l = 0; l < corr.matrices.size(); ++l) {
      for (std::size_t p = 0; p < corr.classes; ++p) {
        for (std::size_t q = 0; q < corr.classes; ++q) {
          cf << l + 1 << "," << p << "," << q << "," << corr.class_labels[p] << ","
             << corr.class_labels[q] << "," << num(corr.at(l, p, q)) << "\n";
        }
      }
    }
    run.summary()["correlation_averaging"] = corr.averaging;
    run.summary()["correlation_draws"] = corr.draws;
  }
}

struct CounterexampleArgs {
  double delta = 0.99;
  double omega = 6.0;
  double sigma_w = 0.0;
  double sigma_b = 0.0;
  double v_min = 0.1;
  double v_max = 20.0;
  std::size_t points = 200;
};

void cmd_counterexample(const CounterexampleArgs& a, const Common&, Run& run) {
  if (!(a.v_min > 0.0) || !(a.v_max > a.v_min)) throw DomainError("need 0 < --v-min < --v-max");
  if (a.points < 2) throw DomainError("--points must be >= 2");
  const double sigma = sigma_omega(a.delta, a.omega);
  const double sw = a.sigma_w > 0.0 ? a.sigma_w : sigma;
  const EocSetting s{sw, a.sigma_b, Activation::delta_omega(a.delta, a.omega)};
  s.validate();
  auto curve = run.csv("variance_curve.csv", {"v", "V", "V_over_v", "sigma_w", "sigma_omega"});
  for (std::size_t i = 0; i < a.points; ++i) {
    const double v = a.v_min * std::pow(a.v_max / a.v_min, static_cast<double>(i) / (a.points - 1));
    const double V = variance_map(v, s);
    curve << num(v) << "," << num(V) << "," << num(V / v) << "," << num(sw) << "," << num(sigma) << "\n";
  }
  const FixedPointReport fp = find_fixed_points(s, a.v_min, a.v_max);
  auto points = run.csv("fixed_points.csv", {"v", "stable", "slope", "sigma_w", "sigma_omega"});
  for (const auto& p : fp.points) {
    points << num(p.v) << "," << (p.stable ? 1 : 0) << "," << num(p.slope) << "," << num(sw) << ","
           << num(sigma) << "\n";
  }
  run.summary() = {{"sigma_omega", sigma},
                   {"sigma_w", sw},
                   {"fixed_points", fp.points.size()},
                   {"degenerate_continuum", fp.degenerate_continuum}};
  std::printf("sigma_omega=%.6g sigma_w=%.6g\n", sigma, sw);
  if (fp.degenerate_continuum) std::printf("V(v) = v on the whole range (continuum of fixed points)\n");
  for (const auto& p : fp.points) {
    std::printf("fixed point v=%.6g %s slope=%.4g\n", p.v, p.stable ? "stable" : "unstable", p.slope);
  }
}

struct MellinArgs {
  double theta = 0.0;
  std::size_t K = 500;
  std::string precision = "both";
  double z_max = 60.0;
  std::size_t z_points = 601;
};

void cmd_mellin(const MellinArgs& a, const Common&, Run& run) {
  std::vector<Precision> precisions;
  if (a.precision == "float64" || a.precision == "both") precisions.push_back(Precision::float64);
  if (a.precision == "extended" || a.precision == "both") precisions.push_back(Precision::extended);
  if (precisions.empty()) throw DomainError("--precision must be float64, extended or both");
  if (a.z_points < 2 || !(a.z_max > 0.0)) throw DomainError("need --z-max > 0 and --z-points >= 2");
  auto coef = run.csv("mellin_coefficients.csv", {"precision", "k", "c_k", "term_magnitude"});
  auto recon = run.csv("mellin_reconstruction.csv", {"precision", "z", "value", "terms"});
  json summary = json::object();
  for (Precision p : precisions) {
    const LaguerreSeries series = laguerre_coefficients(a.theta, a.K, p);
    for (std::size_t k = 0; k < series.coefficients.size(); ++k) {
      coef << to_string(p) << "," << k + 1 << "," << num(series.coefficients[k]) << ","
           << num(series.term_magnitude[k]) << "\n";
    }
    double lowest = INFINITY;
    for (std::size_t i = 0; i < a.z_points; ++i) {
      const double z = a.z_max * static_cast<double>(i) / static_cast<double>(a.z_points - 1);
      const double v = laguerre_inverse_eval(series, z);
      if (z <= 5.0) lowest = std::min(lowest, v);
      recon << to_string(p) << "," << num(z) << "," << num(v) << "," << series.usable_terms() << "\n";
    }
    json entry = {{"usable_terms", series.usable_terms()}, {"min_on_0_5", lowest}};
    entry["divergence_index"] = series.divergence_index ? json(*series.divergence_index) : json(nullptr);
    summary[to_string(p)] = entry;
    std::printf("%s: divergence_index=%s usable_terms=%zu min_reconstruction_on_[0,5]=%.6g\n",
                to_string(p),
                series.divergence_index ? std::to_string(*series.divergence_index).c_str() : "none",
                series.usable_terms(), lowest);
  }
  run.summary() = summary;
}

struct KsProductArgs {
  std::string activation;
  std::string table;
  double theta = 0.0;
  std::string init;
  double sigma_w = 1.0;
  double sigma_b = 0.0;
  std::string n_grid = "1,2,3,5,10,30,100";
  std::size_t samples = 18000;
  double alpha = 0.05;
};

void cmd_ks_product(const KsProductArgs& a, const Common& c, Run& run) {
  const bool phi = a.activation.empty() || a.activation == "phi" || a.activation == "phi-theta";
  if (phi && a.table.empty() && !(a.theta > 2.0)) {
    throw DomainError("ks-product needs --theta > 2, --table or --activation");
  }
  const Activation act = resolve_activation(a.activation.empty() ? "phi" : a.activation, a.theta, a.table, c);
  const std::string init_kind = !a.init.empty() ? a.init : (a.theta > 0.0 ? "weibull" : "gaussian");
  const Init init = resolve_init(init_kind, a.sigma_w, a.sigma_b, a.theta);
  auto out = run.csv("ks_product.csv", {"n", "samples", "ks_raw", "ks_standardized", "threshold",
                                        "reject_standardized", "mean", "std"});
  const auto grid = parse_count_grid(a.n_grid, "--n-grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const ProductTestResult r = product_test(grid[i], act, init, a.samples, derive_seed(c.seed, i), c.threads, a.alpha);
    out << grid[i] << "," << a.samples << "," << num(r.raw.statistic) << ","
        << num(r.standardized.statistic) << "," << num(r.standardized.threshold) << ","
        << (r.standardized.reject ? 1 : 0) << "," << num(r.mean) << "," << num(r.std) << "\n";
    std::printf("n=%zu ks_raw=%.5g ks_standardized=%.5g threshold=%.5g std=%.5g\n", grid[i],
                r.raw.statistic, r.standardized.statistic, r.standardized.threshold, r.std);
  }
  run.summary() = {{"activation", act.name()}, {"init", init.name()}, {"n_values", grid.size()}};
}

struct IndependenceArgs {
  std::string n0_grid = "1,2,5,10";
  std::string n1_grid = "10";
  std::string activation = "tanh";
  std::string table;
  double theta = 0.0;
  std::string init = "gaussian";
  double sigma_w = 1.0;
  std::size_t samples = 10000;
  double alpha = 0.05;
};

void cmd_independence(const IndependenceArgs& a, const Common& c, Run& run) {
  const Activation act = resolve_activation(a.activation, a.theta, a.table, c);
  const Init init = resolve_init(a.init, a.sigma_w, 0.0, a.theta);
  const auto n0s = parse_count_grid(a.n0_grid, "--n0-grid");
  const auto n1s = parse_count_grid(a.n1_grid, "--n1-grid");
  auto out = run.csv("independence.csv", {"n0", "n1", "samples", "ks_standardized", "threshold",
                                          "reject", "zero_fraction"});
  std::size_t index = 0;
  for (std::size_t n0 : n0s) {
    for (std::size_t n1 : n1s) {
      const IndependenceResult r = independence_experiment(n0, n1, act, init, a.samples,
                                                           derive_seed(c.seed, index++), c.threads, a.alpha);
      out << n0 << "," << n1 << "," << a.samples << "," << num(r.ks.statistic) << ","
          << num(r.ks.threshold) << "," << (r.ks.reject ? 1 : 0) << "," << num(r.zero_fraction) << "\n";
      std::printf("n0=%zu n1=%zu ks_standardized=%.5g threshold=%.5g zero_fraction=%.4f\n", n0, n1,
                  r.ks.statistic, r.ks.threshold, r.zero_fraction);
    }
  }
  run.summary() = {{"activation", act.name()}, {"init", init.name()}};
}

// --- config files ------------------------------------------------------------

const std::vector<std::string> kSubcommands{"fit",           "eoc",     "propagate", "counterexample",
                                            "mellin-diagnose", "ks-product", "independence"};

void append_json_args(const json& obj, std::vector<std::string>& args) {
  for (const auto& [key, value] : obj.items()) {
    if (value.is_object() || value.is_null() || key == "config") continue;
    if (value.is_string() && value.get<std::string>().empty()) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
      continue;
    }
    std::string text;
    if (value.is_array()) {
      for (const auto& v : value) {
        if (!text.empty()) text += ",";
        text += v.is_string() ? v.get<std::string>() : v.dump();
      }
    } else {
      text = value.is_string() ? value.get<std::string>() : value.dump();
    }
    args.push_back("--" + key + "=" + text);
  }
}

/// Inserts the values of --config right after the subcommand name so that
/// explicit flags, which come later, take precedence.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const auto sub = std::find_if(args.begin() + 1, args.end(), [](const std::string& a) {
    return std::find(kSubcommands.begin(), kSubcommands.end(), a) != kSubcommands.end();
  });
  if (sub == args.end()) return args;
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError("bad config file '" + path + "': " + e.what());
  }
  if (!cfg.is_object()) throw DomainError("config file must hold a JSON object");
  if (cfg.contains("config") && cfg["config"].is_object()) cfg = cfg["config"];  // a manifest
  std::vector<std::string> injected;
  append_json_args(cfg, injected);
  if (cfg.contains(*sub) && cfg[*sub].is_object()) append_json_args(cfg[*sub], injected);
  args.insert(sub + 1, injected.begin(), injected.end());
  return args;
}

void write_diagnostic(const fs::path& dir, const std::string& subcommand, const std::string& kind,
                      const std::string& message) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  json d = {{"error", kind}, {"subcommand", subcommand}, {"message", message}};
  std::ofstream(dir / "diagnostic.json") << d.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian pre-activations: activation fitting, edge-of-chaos analysis and "
               "Monte-Carlo propagation experiments",
               "gausspre"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;
  auto theta_above_2 = CLI::Validator(
      [](std::string& s) -> std::string {
        try {
          if (std::stod(s) > 2.0) return {};
        } catch (const std::exception&) {
        }
        return "theta must be > 2";
      },
      "THETA>2");

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit g_Lambda and build the phi_theta activation table");
  fit_cmd->add_option("--theta", fit_args.theta, "Weight shape theta > 2")->required()->check(theta_above_2);
  fit_cmd->add_option("--epochs", fit_args.epochs, "Training epochs")->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--steps-per-epoch", fit_args.steps, "Adam steps per epoch")
      ->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--lr", fit_args.lr, "Initial learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--init-jitter", fit_args.jitter, "Seeded log-normal jitter of the initial parameters")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  add_common(fit_cmd, common);

  EocArgs eoc_args;
  auto* eoc_cmd = app.add_subcommand("eoc", "Edge-of-chaos curve sigma_w(sigma_b)");
  eoc_cmd->add_option("--activation", eoc_args.activation,
                      "identity, relu, tanh, phi, delta-omega:<d>,<w> or a table file")->required();
  eoc_cmd->add_option("--table", eoc_args.table, "Activation table file");
  eoc_cmd->add_option("--theta", eoc_args.theta, "Shape for --activation phi")->check(theta_above_2);
  eoc_cmd->add_option("--sigma-b-grid", eoc_args.sigma_b_grid, "Comma-separated sigma_b values");
  eoc_cmd->add_option("--sigma-b2-grid", eoc_args.sigma_b2_grid, "Comma-separated sigma_b^2 values");
  eoc_cmd->add_option("--sigma-w-min", eoc_args.sigma_w_min)->capture_default_str();
  eoc_cmd->add_option("--sigma-w-max", eoc_args.sigma_w_max)->capture_default_str();
  eoc_cmd->add_option("--tol", eoc_args.tol, "Accepted |chi1 - 1|")->capture_default_str();
  add_common(eoc_cmd, common);

  PropagateArgs prop_args;
  auto* prop_cmd = app.add_subcommand("propagate", "Per-layer pre-activation distributions (KS vs Gaussian)");
  prop_cmd->add_option("--preset", prop_args.preset, "custom, weibull, relu-eoc or tanh-eoc")->capture_default_str();
  prop_cmd->add_option("--activation", prop_args.activation, "identity, relu, tanh, phi or a table file")
      ->capture_default_str();
  prop_cmd->add_option("--table", prop_args.table, "Activation table file");
  prop_cmd->add_option("--init", prop_args.init, "gaussian, weibull or rademacher")->capture_default_str();
  prop_cmd->add_option("--theta", prop_args.theta, "Weibull shape (and phi_theta)");
  prop_cmd->add_option("--sigma-w", prop_args.sigma_w, "Weight scale")->capture_default_str();
  prop_cmd->add_option("--sigma-b", prop_args.sigma_b, "Gaussian bias std")->capture_default_str();
  prop_cmd->add_option("--width", prop_args.width)->capture_default_str();
  prop_cmd->add_option("--depth", prop_args.depth)->capture_default_str();
  prop_cmd->add_option("--n0", prop_args.n0, "Input dimension for synthetic data (default: width)");
  prop_cmd->add_option("--input", prop_args.input, "synthetic or a CSV dataset")->capture_default_str();
  prop_cmd->add_option("--normalize", prop_args.normalize, "individual, dataset or none")->capture_default_str();
  prop_cmd->add_option("--channels", prop_args.channels, "JSON channel sidecar for --normalize dataset");
  prop_cmd->add_option("--sample-index", prop_args.sample_index, "Input row to propagate")->capture_default_str();
  prop_cmd->add_option("--samples", prop_args.samples, "Parameter draws")->capture_default_str();
  prop_cmd->add_flag("--correlation", prop_args.correlation, "Also compute class correlation matrices");
  prop_cmd->add_option("--draws", prop_args.draws, "Parameter draws for --correlation")->capture_default_str();
  prop_cmd->add_option("--classes", prop_args.classes, "Synthetic classes")->capture_default_str();
  prop_cmd->add_option("--per-class", prop_args.per_class, "Synthetic samples per class")->capture_default_str();
  prop_cmd->add_option("--spread", prop_args.spread, "Synthetic class spread")->capture_default_str();
  add_common(prop_cmd, common);

  CounterexampleArgs ce_args;
  auto* ce_cmd = app.add_subcommand("counterexample", "Fixed points of the variance map for phi_{delta,omega}");
  ce_cmd->add_option("--delta", ce_args.delta)->capture_default_str();
  ce_cmd->add_option("--omega", ce_args.omega)->capture_default_str();
  ce_cmd->add_option("--sigma-w", ce_args.sigma_w, "Weight std (default: sigma_omega)");
  ce_cmd->add_option("--sigma-b", ce_args.sigma_b)->capture_default_str();
  ce_cmd->add_option("--v-min", ce_args.v_min)->capture_default_str();
  ce_cmd->add_option("--v-max", ce_args.v_max)->capture_default_str();
  ce_cmd->add_option("--points", ce_args.points, "Samples of the variance curve")->capture_default_str();
  add_common(ce_cmd, common);

  MellinArgs mellin_args;
  auto* mellin_cmd = app.add_subcommand("mellin-diagnose", "Laguerre-series inversion of the Mellin ratio");
  mellin_cmd->add_option("--theta", mellin_args.theta)->required()->check(CLI::PositiveNumber);
  mellin_cmd->add_option("--K", mellin_args.K, "Number of coefficients")->capture_default_str()->check(CLI::PositiveNumber);
  mellin_cmd->add_option("--precision", mellin_args.precision, "float64, extended or both")->capture_default_str();
  mellin_cmd->add_option("--z-max", mellin_args.z_max)->capture_default_str();
  mellin_cmd->add_option("--z-points", mellin_args.z_points)->capture_default_str();
  add_common(mellin_cmd, common);

  KsProductArgs ks_args;
  auto* ks_cmd = app.add_subcommand("ks-product", "KS statistic of sum_i W_i phi(Z_i) / sqrt(n)");
  ks_cmd->add_option("--theta", ks_args.theta, "Use phi_theta with Weibull(theta) weights");
  ks_cmd->add_option("--activation", ks_args.activation, "identity, relu, tanh, phi or a table file");
  ks_cmd->add_option("--table", ks_args.table, "Activation table file");
  ks_cmd->add_option("--init", ks_args.init, "gaussian, weibull or rademacher");
  ks_cmd->add_option("--sigma-w", ks_args.sigma_w)->capture_default_str();
  ks_cmd->add_option("--sigma-b", ks_args.sigma_b)->capture_default_str();
  ks_cmd->add_option("--n-grid", ks_args.n_grid, "Comma-separated input counts")->capture_default_str();
  ks_cmd->add_option("--samples", ks_args.samples)->capture_default_str();
  ks_cmd->add_option("--alpha", ks_args.alpha)->capture_default_str();
  add_common(ks_cmd, common);

  IndependenceArgs ind_args;
  auto* ind_cmd = app.add_subcommand("independence", "Two-layer scalar output Gaussianity (dependent pre-activations)");
  ind_cmd->add_option("--n0-grid", ind_args.n0_grid)->capture_default_str();
  ind_cmd->add_option("--n1-grid", ind_args.n1_grid)->capture_default_str();
  ind_cmd->add_option("--activation", ind_args.activation)->capture_default_str();
  ind_cmd->add_option("--table", ind_args.table);
  ind_cmd->add_option("--theta", ind_args.theta);
  ind_cmd->add_option("--init", ind_args.init)->capture_default_str();
  ind_cmd->add_option("--sigma-w", ind_args.sigma_w)->capture_default_str();
  ind_cmd->add_option("--samples", ind_args.samples)->capture_default_str();
  ind_cmd->add_option("--alpha", ind_args.alpha)->capture_default_str();
  add_common(ind_cmd, common);

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(std::move(args));
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  std::optional<Run> run_slot;
  try {
    Run& run = run_slot.emplace(name, common);
    if (name == "fit") cmd_fit(fit_args, common, run);
    if (name == "eoc") cmd_eoc(eoc_args, common, run);
    if (name == "propagate") cmd_propagate(prop_args, sub, common, run);
    if (name == "counterexample") cmd_counterexample(ce_args, common, run);
    if (name == "mellin-diagnose") cmd_mellin(mellin_args, common, run);
    if (name == "ks-product") cmd_ks_product(ks_args, common, run);
    if (name == "independence") cmd_independence(ind_args, common, run);
    run.manifest(resolved_config(sub), "ok");
    return 0;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    if (run_slot) run_slot->manifest(resolved_config(sub), "usage_error");
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    write_diagnostic(common.out, name, dynamic_cast<const NumericError*>(&e) ? "numeric" : "runtime", e.what());
    if (run_slot) run_slot->manifest(resolved_config(sub), "numeric_failure");
    return 3;
  }
}
