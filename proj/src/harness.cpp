#include "skqi/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace skqi {

using json = nlohmann::json;

namespace {

// Seed stream tags; each consumer derives from (cfg.seed, tag).
constexpr std::uint64_t kEvalTag = 0xe7a1;
constexpr std::uint64_t kProbeTag = 0x9f0be;
constexpr std::uint64_t kPointsTag = 0x90175;
constexpr std::uint64_t kNoiseTag = 0x4015e;
constexpr std::uint64_t kTrialTag = 0x7a1a1;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double l2_scale(const ExperimentConfig& cfg) {
  return cfg.l2_measure == L2Measure::Surface ? std::sqrt(4.0 * std::numbers::pi) : 1.0;
}

SphereFunction wrap(std::shared_ptr<const Approximant> q) {
  return [q = std::move(q)](PointRef x) { return q->evaluate(x); };
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

bool deterministic(PointKind kind) { return kind != PointKind::Random; }

// ---- JSON field helpers ----

template <typename T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, std::string("wrong type: ") + e.what());
  }
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError(where.empty() ? key : where + "." + key, "unknown key");
  }
}

Experiment parse_experiment(const std::string& s) {
  if (s == "convergence") return Experiment::Convergence;
  if (s == "multilevel") return Experiment::Multilevel;
  if (s == "noise-compare") return Experiment::NoiseCompare;
  if (s == "timing") return Experiment::Timing;
  throw ConfigError("experiment", "unknown experiment '" + s + "'");
}

PointKind parse_point_kind(const std::string& s) {
  if (s == "random") return PointKind::Random;
  if (s == "spiral") return PointKind::Spiral;
  if (s == "tdesign") return PointKind::TDesign;
  if (s == "maxdet") return PointKind::MaxDeterminant;
  if (s == "loaded") return PointKind::Loaded;
  throw ConfigError("point_kind", "unknown point kind '" + s + "'");
}

}  // namespace

double franke(PointRef p) {
  const double x = p[0], y = p[1], z = p[2];
  const double a = 9 * x - 2, b = 9 * y - 2, c = 9 * z - 2;
  return 0.75 * std::exp(-(a * a + b * b + c * c) / 4) +
         0.75 * std::exp(-(9 * x + 1) * (9 * x + 1) / 49 - (9 * y + 1) / 10 - (9 * z + 1) / 10) +
         0.5 * std::exp(-((9 * x - 7) * (9 * x - 7) + (9 * y - 3) * (9 * y - 3) + (9 * z - 5) * (9 * z - 5)) / 4) -
         0.2 * std::exp(-(9 * x - 4) * (9 * x - 4) - (9 * y - 7) * (9 * y - 7) - (9 * z - 5) * (9 * z - 5));
}

RadialProfile KernelChoice::profile() const {
  if (family == KernelFamily::Gaussian) return RadialProfile::gaussian();
  const int k = wendland_k.value_or(std::clamp(order / 2, 0, 3));
  return RadialProfile::wendland(wendland_l.value_or(k + 2), k);
}

std::string KernelChoice::label() const {
  return (family == KernelFamily::Gaussian ? std::string("gaussian") : profile().name()) + " m=" +
         std::to_string(order);
}

double RhoRule::rho(std::size_t n, std::size_t index) const {
  if (kind == Kind::Explicit) return values.at(index);
  return constant * std::pow(static_cast<double>(n), exponent);
}

SphereFunction Target::function() const {
  if (kind == Kind::Franke) return franke;
  const HarmonicIndex idx{ell, k, 2};
  return [idx](PointRef x) { return eval_harmonic(idx, x); };
}

std::string Target::label() const {
  if (kind == Kind::Franke) return "franke";
  return "Y_" + std::to_string(ell) + "," + std::to_string(k);
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Convergence: return "convergence";
    case Experiment::Multilevel: return "multilevel";
    case Experiment::NoiseCompare: return "noise-compare";
    case Experiment::Timing: return "timing";
  }
  return "convergence";
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  switch (e) {
    case Experiment::Convergence:
      cfg.kernel = {KernelFamily::Gaussian, 4, std::nullopt, std::nullopt};
      cfg.point_kind = PointKind::Spiral;
      cfg.n_grid = {1024, 2048, 4096, 8192, 16384};
      break;
    case Experiment::Multilevel:
      cfg.kernel = {KernelFamily::Wendland, 2, std::nullopt, std::nullopt};
      cfg.point_kind = PointKind::Spiral;
      cfg.n_grid = {144, 576, 2304, 9216, 36864};
      cfg.target = {Target::Kind::Franke, 0, 0};
      cfg.noise = NoiseConfig{NoiseModel::Kind::GaussianStd, {0.01, 0.1}};
      break;
    case Experiment::NoiseCompare:
      cfg.kernel = {KernelFamily::Wendland, 2, std::nullopt, std::nullopt};
      cfg.orders = {2, 4};
      cfg.point_kind = PointKind::Spiral;
      cfg.n_grid = {1024, 2048, 4096, 8192, 16384};
      cfg.rho_rule.constant = 2.0;
      cfg.target = {Target::Kind::Franke, 0, 0};
      cfg.noise = NoiseConfig{NoiseModel::Kind::GaussianStd, {0.01, 0.1}};
      break;
    case Experiment::Timing:
      cfg.kernel = {KernelFamily::Wendland, 2, std::nullopt, std::nullopt};
      cfg.point_kind = PointKind::Spiral;
      cfg.n_grid = {1328, 2704, 4562};
      cfg.target = {Target::Kind::Franke, 0, 0};
      break;
  }
  return cfg;
}

void apply_paper_scale(ExperimentConfig& cfg) {
  cfg.paper_scale = true;
  cfg.trials = 100;
  cfg.eval_points = 50000;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, "", {"experiment", "kernel", "orders", "point_kind", "point_files", "n_grid", "rho_rule",
                     "target", "noise", "seed", "output", "l2_degree", "l2_measure", "trials", "eval_points",
                     "nu", "h_mode", "c_delta", "filter_a", "timing_repeats", "timing_grid"});

  const Experiment e = j.contains("experiment") ? parse_experiment(get_as<std::string>(j["experiment"], "experiment"))
                                                : Experiment::Convergence;
  ExperimentConfig cfg = default_config(e);

  if (j.contains("kernel")) {
    const json& k = j["kernel"];
    check_keys(k, "kernel", {"family", "order", "l", "k"});
    if (k.contains("family")) {
      const auto fam = get_as<std::string>(k["family"], "kernel.family");
      if (fam == "gaussian")
        cfg.kernel.family = KernelFamily::Gaussian;
      else if (fam == "wendland")
        cfg.kernel.family = KernelFamily::Wendland;
      else
        throw ConfigError("kernel.family", "unknown family '" + fam + "'");
    }
    if (k.contains("order")) cfg.kernel.order = get_as<int>(k["order"], "kernel.order");
    cfg.kernel.wendland_l = k.contains("l") ? std::optional<int>(get_as<int>(k["l"], "kernel.l")) : std::nullopt;
    cfg.kernel.wendland_k = k.contains("k") ? std::optional<int>(get_as<int>(k["k"], "kernel.k")) : std::nullopt;
  }
  if (j.contains("orders"))
    cfg.orders = get_as<std::vector<int>>(j["orders"], "orders");
  else if (j.contains("kernel") && e == Experiment::NoiseCompare)
    cfg.orders = {cfg.kernel.order};
  if (j.contains("point_kind")) cfg.point_kind = parse_point_kind(get_as<std::string>(j["point_kind"], "point_kind"));
  if (j.contains("point_files")) cfg.point_files = get_as<std::vector<std::string>>(j["point_files"], "point_files");
  if (j.contains("n_grid")) {
    const auto raw = get_as<std::vector<long long>>(j["n_grid"], "n_grid");
    cfg.n_grid.clear();
    for (long long v : raw) {
      if (v < 1) throw ConfigError("n_grid", "entries must be >= 1");
      cfg.n_grid.push_back(static_cast<std::size_t>(v));
    }
  }
  if (j.contains("rho_rule")) {
    const json& r = j["rho_rule"];
    check_keys(r, "rho_rule", {"kind", "exponent", "constant", "values"});
    const auto kind = r.contains("kind") ? get_as<std::string>(r["kind"], "rho_rule.kind") : "pow-qmc";
    if (kind == "pow-qmc") {
      cfg.rho_rule.kind = RhoRule::Kind::PowQMC;
      cfg.rho_rule.exponent = -1.0 / (2.0 * 2);
    } else if (kind == "pow-mc") {
      cfg.rho_rule.kind = RhoRule::Kind::PowMC;
      cfg.rho_rule.exponent = -1.0 / (2.0 * cfg.kernel.order);
    } else if (kind == "explicit") {
      cfg.rho_rule.kind = RhoRule::Kind::Explicit;
    } else {
      throw ConfigError("rho_rule.kind", "unknown rule '" + kind + "'");
    }
    if (r.contains("exponent")) cfg.rho_rule.exponent = get_as<double>(r["exponent"], "rho_rule.exponent");
    if (r.contains("constant")) cfg.rho_rule.constant = get_as<double>(r["constant"], "rho_rule.constant");
    if (r.contains("values")) cfg.rho_rule.values = get_as<std::vector<double>>(r["values"], "rho_rule.values");
  }
  if (j.contains("target")) {
    const json& t = j["target"];
    check_keys(t, "target", {"kind", "ell", "k"});
    const auto kind = t.contains("kind") ? get_as<std::string>(t["kind"], "target.kind") : "harmonic";
    if (kind == "franke") {
      cfg.target = {Target::Kind::Franke, 0, 0};
    } else if (kind == "harmonic") {
      cfg.target.kind = Target::Kind::Harmonic;
      cfg.target.ell = t.contains("ell") ? get_as<int>(t["ell"], "target.ell") : 6;
      cfg.target.k = t.contains("k") ? get_as<int>(t["k"], "target.k") : 4;
    } else {
      throw ConfigError("target.kind", "unknown target '" + kind + "'");
    }
  }
  if (j.contains("noise")) {
    if (j["noise"].is_null()) {
      cfg.noise.reset();
    } else {
      const json& n = j["noise"];
      check_keys(n, "noise", {"kind", "levels"});
      NoiseConfig nc;
      const auto kind = n.contains("kind") ? get_as<std::string>(n["kind"], "noise.kind") : "gaussian";
      if (kind == "gaussian")
        nc.kind = NoiseModel::Kind::GaussianStd;
      else if (kind == "uniform")
        nc.kind = NoiseModel::Kind::UniformBounded;
      else
        throw ConfigError("noise.kind", "unknown noise law '" + kind + "'");
      if (n.contains("levels")) nc.levels = get_as<std::vector<double>>(n["levels"], "noise.levels");
      cfg.noise = nc;
    }
  }
  if (j.contains("seed")) cfg.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("output")) cfg.output = get_as<std::string>(j["output"], "output");
  if (j.contains("l2_degree")) cfg.l2_degree = get_as<int>(j["l2_degree"], "l2_degree");
  if (j.contains("l2_measure")) {
    const auto m = get_as<std::string>(j["l2_measure"], "l2_measure");
    if (m == "normalized")
      cfg.l2_measure = L2Measure::Normalized;
    else if (m == "surface")
      cfg.l2_measure = L2Measure::Surface;
    else
      throw ConfigError("l2_measure", "expected 'normalized' or 'surface'");
  }
  auto count = [&](const char* key, std::size_t& dst) {
    if (!j.contains(key)) return;
    const auto v = get_as<long long>(j[key], key);
    if (v < 1) throw ConfigError(key, "must be >= 1");
    dst = static_cast<std::size_t>(v);
  };
  count("trials", cfg.trials);
  count("eval_points", cfg.eval_points);
  count("timing_repeats", cfg.timing_repeats);
  count("timing_grid", cfg.timing_grid);
  if (j.contains("nu")) cfg.nu = get_as<double>(j["nu"], "nu");
  if (j.contains("h_mode")) {
    const auto m = get_as<std::string>(j["h_mode"], "h_mode");
    if (m == "nominal")
      cfg.h_mode = FillMode::Nominal;
    else if (m == "empirical")
      cfg.h_mode = FillMode::Empirical;
    else
      throw ConfigError("h_mode", "expected 'nominal' or 'empirical'");
  }
  if (j.contains("c_delta")) cfg.c_delta = get_as<double>(j["c_delta"], "c_delta");
  if (j.contains("filter_a")) cfg.filter_a = get_as<double>(j["filter_a"], "filter_a");
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  json k;
  k["family"] = cfg.kernel.family == KernelFamily::Gaussian ? "gaussian" : "wendland";
  k["order"] = cfg.kernel.order;
  if (cfg.kernel.wendland_l) k["l"] = *cfg.kernel.wendland_l;
  if (cfg.kernel.wendland_k) k["k"] = *cfg.kernel.wendland_k;
  j["kernel"] = k;
  j["orders"] = cfg.orders;
  j["point_kind"] = to_string(cfg.point_kind);
  j["point_files"] = cfg.point_files;
  j["n_grid"] = cfg.n_grid;
  json r;
  switch (cfg.rho_rule.kind) {
    case RhoRule::Kind::PowQMC: r["kind"] = "pow-qmc"; break;
    case RhoRule::Kind::PowMC: r["kind"] = "pow-mc"; break;
    case RhoRule::Kind::Explicit: r["kind"] = "explicit"; break;
  }
  r["exponent"] = cfg.rho_rule.exponent;
  r["constant"] = cfg.rho_rule.constant;
  r["values"] = cfg.rho_rule.values;
  j["rho_rule"] = r;
  if (cfg.target.kind == Target::Kind::Franke)
    j["target"] = {{"kind", "franke"}};
  else
    j["target"] = {{"kind", "harmonic"}, {"ell", cfg.target.ell}, {"k", cfg.target.k}};
  if (cfg.noise)
    j["noise"] = {{"kind", cfg.noise->kind == NoiseModel::Kind::GaussianStd ? "gaussian" : "uniform"},
                  {"levels", cfg.noise->levels}};
  else
    j["noise"] = nullptr;
  j["seed"] = cfg.seed;
  j["output"] = cfg.output.string();
  j["l2_degree"] = cfg.l2_degree;
  j["l2_measure"] = cfg.l2_measure == L2Measure::Surface ? "surface" : "normalized";
  j["trials"] = cfg.trials;
  j["eval_points"] = cfg.eval_points;
  j["nu"] = cfg.nu;
  j["h_mode"] = cfg.h_mode == FillMode::Nominal ? "nominal" : "empirical";
  j["c_delta"] = cfg.c_delta;
  j["filter_a"] = cfg.filter_a;
  j["timing_repeats"] = cfg.timing_repeats;
  j["timing_grid"] = cfg.timing_grid;
  return j.dump(2);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n_grid.empty()) throw ConfigError("n_grid", "must not be empty");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] < 1) throw ConfigError("n_grid", "entries must be >= 1");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1]) throw ConfigError("n_grid", "must be strictly increasing");
  }

  const auto& kc = cfg.kernel;
  if (kc.order < 2 || kc.order % 2 != 0) throw ConfigError("kernel.order", "must be an even integer >= 2");
  if (kc.family == KernelFamily::Wendland) {
    try {
      (void)kc.profile();
    } catch (const InvalidArgument& e) {
      throw ConfigError("kernel", e.what());
    }
  }
  for (int m : cfg.orders)
    if (m < 2 || m % 2 != 0) throw ConfigError("orders", "entries must be even integers >= 2");

  const bool loaded = cfg.point_kind == PointKind::TDesign || cfg.point_kind == PointKind::MaxDeterminant ||
                      cfg.point_kind == PointKind::Loaded;
  if (loaded && cfg.point_files.size() != cfg.n_grid.size())
    throw ConfigError("point_files", "need one file per n_grid entry for loaded point kinds");

  const auto& rr = cfg.rho_rule;
  if (rr.kind == RhoRule::Kind::Explicit) {
    if (rr.values.size() != cfg.n_grid.size()) throw ConfigError("rho_rule.values", "need one value per n_grid entry");
  } else {
    if (!(rr.exponent < 0.0)) throw ConfigError("rho_rule.exponent", "must be negative");
    if (!(rr.constant > 0.0)) throw ConfigError("rho_rule.constant", "must be positive");
  }
  if (cfg.experiment != Experiment::Multilevel) {
    for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
      const double rho = rr.rho(cfg.n_grid[i], i);
      if (!(rho > 0.0 && rho < 1.0))
        throw ConfigError("rho_rule", "rho = " + fmt(rho) + " at N = " + std::to_string(cfg.n_grid[i]) +
                                          " is outside (0,1)");
    }
  }

  if (cfg.target.kind == Target::Kind::Harmonic) {
    if (cfg.target.ell < 0) throw ConfigError("target.ell", "must be >= 0");
    if (cfg.target.k < 1 || cfg.target.k > 2 * cfg.target.ell + 1)
      throw ConfigError("target.k", "must lie in 1..2*ell+1");
  }
  if (cfg.noise)
    for (double s : cfg.noise->levels)
      if (!(s >= 0.0)) throw ConfigError("noise.levels", "noise levels must be >= 0");

  if (cfg.l2_degree < 0) throw ConfigError("l2_degree", "must be >= 0");
  if (!(cfg.filter_a > 1.0)) throw ConfigError("filter_a", "must be > 1");
  if (!(cfg.c_delta > 0.0 && cfg.c_delta <= 1.0)) throw ConfigError("c_delta", "must lie in (0,1]");

  if (cfg.experiment == Experiment::Multilevel) {
    if (cfg.n_grid.size() < 2) throw ConfigError("n_grid", "multilevel needs at least 2 levels");
    if (!(cfg.nu > 1.0)) throw ConfigError("nu", "must be > 1");
    if (cfg.h_mode == FillMode::Nominal) {
      const double rho = cfg.nu * std::pow(static_cast<double>(cfg.n_grid.front()), -0.25);
      if (!(rho < 1.0)) throw ConfigError("nu", "first-level rho = " + fmt(rho) + " is >= 1");
    }
  }
  if (cfg.experiment == Experiment::NoiseCompare || cfg.experiment == Experiment::Timing) {
    for (std::size_t n : cfg.n_grid)
      if (matched_degree(n, cfg.filter_a) < 0)
        throw ConfigError("n_grid", "no exact product rule for filtered hyperinterpolation fits N = " +
                                        std::to_string(n));
  }
}

PointSet make_points(const ExperimentConfig& cfg, std::size_t n, std::size_t index, std::uint64_t seed) {
  switch (cfg.point_kind) {
    case PointKind::Random: return random_points(n, 2, seed);
    case PointKind::Spiral: return spiral_points(n);
    default: break;
  }
  if (index >= cfg.point_files.size()) throw ConfigError("point_files", "missing file for grid entry");
  PointSet pts = load_points(cfg.point_files[index]);
  if (pts.size() != n)
    throw ConfigError("point_files", cfg.point_files[index] + " has " + std::to_string(pts.size()) +
                                         " points, n_grid expects " + std::to_string(n));
  return pts;
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
  validate(cfg);
  const SphereFunction f = cfg.target.function();
  const QuadratureRule rule = product_quadrature(cfg.l2_degree);
  const PointSet eval = random_points(cfg.eval_points, 2, derive_seed(cfg.seed, kEvalTag));
  const double scale = l2_scale(cfg);
  const bool mc = !deterministic(cfg.point_kind);
  std::optional<NoiseModel> noise;
  if (cfg.noise && !cfg.noise->levels.empty() && cfg.noise->levels.front() > 0.0)
    noise = NoiseModel{cfg.noise->kind, cfg.noise->levels.front(), 0};

  ConvergenceResult result;
  result.metric = mc ? "MMSE" : "L2";
  for (std::size_t idx = 0; idx < cfg.n_grid.size(); ++idx) {
    const std::size_t n = cfg.n_grid[idx];
    const double rho = cfg.rho_rule.rho(n, idx);
    const ZonalKernel kernel = cfg.kernel.make(rho);
    const std::uint64_t cell_seed = derive_seed(cfg.seed, idx);
    const auto t0 = std::chrono::steady_clock::now();

    auto build = [&](const PointSet& pts, std::uint64_t seed) {
      std::vector<double> values = sample(f, pts);
      if (noise) {
        NoiseModel m = *noise;
        m.seed = derive_seed(seed, kNoiseTag);
        values = add_noise(values, m);
      }
      return std::make_shared<const Approximant>(qi_qmc(pts, values, kernel));
    };

    ErrorReport rep;
    rep.n = n;
    if (mc) {
      std::vector<std::uint64_t> seeds(cfg.trials);
      for (std::size_t i = 0; i < cfg.trials; ++i) seeds[i] = derive_seed(cell_seed, kTrialTag + i);
      const SeededBuilder builder = [&](std::uint64_t s) { return wrap(build(random_points(n, 2, s), s)); };
      rep.mmse = mmse(builder, f, seeds, eval);
      const SphereFunction first = builder(seeds.front());
      rep.l2 = scale * l2_error(first, f, rule);
      rep.linf = linf_error(first, f, eval);
    } else {
      const PointSet pts = make_points(cfg, n, idx, derive_seed(cell_seed, kPointsTag));
      const SphereFunction q = wrap(build(pts, cell_seed));
      rep.l2 = scale * l2_error(q, f, rule);
      rep.linf = linf_error(q, f, eval);
    }
    rep.wall_time_s = seconds_since(t0);
    result.rows.push_back({rho, rep});
  }

  std::vector<double> ns, errs;
  for (const auto& row : result.rows) {
    ns.push_back(static_cast<double>(row.report.n));
    errs.push_back(mc ? *row.report.mmse : row.report.l2);
  }
  result.fit = ns.size() >= 2 ? fit_slope(ns, errs) : SlopeFit{std::nan(""), std::nan("")};

  if (!cfg.output.empty()) {
    std::filesystem::create_directories(cfg.output);
    auto out = open_csv(cfg.output / "convergence.csv");
    out << ErrorReport::csv_header() << ",rho\n";
    for (const auto& row : result.rows) out << row.report.csv_row() << ',' << fmt(row.rho) << '\n';
    out << "# fit metric=" << result.metric << " slope=" << fmt(result.fit.slope)
        << " intercept=" << fmt(result.fit.intercept) << '\n';
    write_manifest(cfg.output, "convergence", config_to_json(cfg), cfg.seed, {"convergence.csv"});
  }
  return result;
}

MultilevelResult run_multilevel_compare(const ExperimentConfig& cfg) {
  validate(cfg);
  const SphereFunction f = cfg.target.function();
  const RadialProfile profile = cfg.kernel.profile();
  const QuadratureRule rule = product_quadrature(cfg.l2_degree);
  const PointSet eval = random_points(cfg.eval_points, 2, derive_seed(cfg.seed, kEvalTag));
  const double scale = l2_scale(cfg);

  std::vector<PointSet> sets;
  for (std::size_t idx = 0; idx < cfg.n_grid.size(); ++idx)
    sets.push_back(make_points(cfg, cfg.n_grid[idx], idx, derive_seed(derive_seed(cfg.seed, idx), kPointsTag)));
  ScheduleOptions sopt;
  sopt.c_delta = cfg.c_delta;
  sopt.probe_seed = derive_seed(cfg.seed, kProbeTag);
  const LevelSchedule schedule = build_schedule(sets, cfg.nu, cfg.h_mode, sopt);

  MultilevelResult result;
  result.warnings = schedule.warnings;
  result.beta = contraction_factor(schedule, cfg.kernel.order);
  if (!(result.beta < 1.0))
    result.warnings.push_back("contraction factor beta = " + fmt(result.beta) + " is not below 1");

  std::vector<double> levels{0.0};
  if (cfg.noise)
    for (double s : cfg.noise->levels)
      if (s > 0.0) levels.push_back(s);

  std::vector<std::string> artifacts{"multilevel.csv"};
  for (std::size_t si = 0; si < levels.size(); ++si) {
    const double sigma = levels[si];
    MultilevelOptions opt;
    opt.order = cfg.kernel.order;
    if (sigma > 0.0) opt.noise = NoiseModel{cfg.noise->kind, sigma, derive_seed(cfg.seed, kNoiseTag + si)};
    opt.error_rule = &rule;
    opt.linf_points = &eval;
    std::vector<LevelLog> log;
    multilevel_approximate(schedule, f, profile, opt, &log);

    for (std::size_t j = 0; j < schedule.levels.size(); ++j) {
      const Level& level = schedule.levels[j];
      // Single level at the same size and scale, fed the same measurements.
      std::vector<double> values = sample(f, level.sites);
      if (opt.noise) {
        NoiseModel m = *opt.noise;
        m.seed = derive_seed(opt.noise->seed, j);
        values = add_noise(values, m);
      }
      const SphereFunction q = wrap(std::make_shared<const Approximant>(
          qi_qmc(level.sites, values, make_kernel(profile, level.rho, 2, cfg.kernel.order))));
      result.rows.push_back({sigma, j + 1, level.sites.size(), level.rho, scale * log[j].l2, log[j].linf,
                             scale * l2_error(q, f, rule), linf_error(q, f, eval)});
      log[j].l2 *= scale;
    }
    if (!cfg.output.empty()) {
      std::filesystem::create_directories(cfg.output);
      const std::string name = "levels_sigma" + fmt(sigma) + ".csv";
      write_level_log_csv(log, cfg.output / name);
      artifacts.push_back(name);
    }
  }

  if (!cfg.output.empty()) {
    auto out = open_csv(cfg.output / "multilevel.csv");
    out << "sigma,level,N,rho,ML_L2err,ML_Linferr,SL_L2err,SL_Linferr\n";
    for (const auto& r : result.rows)
      out << fmt(r.noise) << ',' << r.level << ',' << r.n << ',' << fmt(r.rho) << ',' << fmt(r.ml_l2) << ','
          << fmt(r.ml_linf) << ',' << fmt(r.sl_l2) << ',' << fmt(r.sl_linf) << '\n';
    write_manifest(cfg.output, "multilevel", config_to_json(cfg), cfg.seed, artifacts);
  }
  return result;
}

std::vector<double> NoiseCompareResult::l2_series(const std::string& method) const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.method == method) out.push_back(r.report.l2);
  return out;
}

std::vector<NoiseCompareResult> run_noise_compare(const ExperimentConfig& cfg) {
  validate(cfg);
  const SphereFunction f = cfg.target.function();
  const PointSet eval = random_points(cfg.eval_points, 2, derive_seed(cfg.seed, kEvalTag));
  const double scale = l2_scale(cfg);
  const std::vector<int> orders = cfg.orders.empty() ? std::vector<int>{cfg.kernel.order} : cfg.orders;
  const PointKind qmc_kind = deterministic(cfg.point_kind) ? cfg.point_kind : PointKind::Spiral;

  // One error rule for every method, exact enough for the largest FHI polynomial.
  int max_fhi = 0;
  for (std::size_t n : cfg.n_grid) max_fhi = std::max(max_fhi, filtered_degree(matched_degree(n, cfg.filter_a), cfg.filter_a));
  const QuadratureRule rule = product_quadrature(std::max(cfg.l2_degree, 2 * max_fhi));

  std::vector<double> levels;
  if (cfg.noise) levels = cfg.noise->levels;
  if (levels.empty()) levels.push_back(0.0);
  const NoiseModel::Kind law = cfg.noise ? cfg.noise->kind : NoiseModel::Kind::GaussianStd;

  std::vector<NoiseCompareResult> results;
  std::vector<std::string> artifacts;
  for (std::size_t si = 0; si < levels.size(); ++si) {
    NoiseCompareResult res{levels[si], {}};
    auto noisy = [&](std::vector<double> values, std::uint64_t seed) {
      if (levels[si] > 0.0) values = add_noise(values, NoiseModel{law, levels[si], seed});
      return values;
    };
    auto record = [&](const std::string& method, std::size_t n, std::size_t nodes, int degree,
                      const SphereFunction& approx, std::chrono::steady_clock::time_point t0) {
      ErrorReport rep;
      rep.n = n;
      rep.l2 = scale * l2_error(approx, f, rule);
      rep.linf = linf_error(approx, f, eval);
      rep.wall_time_s = seconds_since(t0);
      res.rows.push_back({method, n, nodes, degree, rep});
    };

    for (int m : orders) {
      KernelChoice kc = cfg.kernel;
      kc.order = m;
      for (std::size_t idx = 0; idx < cfg.n_grid.size(); ++idx) {
        const std::size_t n = cfg.n_grid[idx];
        const std::uint64_t cell = derive_seed(derive_seed(cfg.seed, kNoiseTag + si), idx);
        auto t0 = std::chrono::steady_clock::now();
        ExperimentConfig qcfg = cfg;
        qcfg.point_kind = qmc_kind;
        const PointSet pts = make_points(qcfg, n, idx, cell);
        const auto kq = kc.make(cfg.rho_rule.rho(n, idx));
        record("qmcqi_m" + std::to_string(m), n, n, -1,
               wrap(std::make_shared<const Approximant>(qi_qmc(pts, noisy(sample(f, pts), cell), kq))), t0);

        t0 = std::chrono::steady_clock::now();
        // Random sites follow the MC rate rule rho = c N^(-1/(2m)).
        const double rho_mc = cfg.rho_rule.kind == RhoRule::Kind::Explicit
                                  ? cfg.rho_rule.values[idx]
                                  : cfg.rho_rule.constant * std::pow(static_cast<double>(n), -1.0 / (2.0 * m));
        const PointSet rpts = random_points(n, 2, derive_seed(cell, kPointsTag));
        record("mcqi_m" + std::to_string(m), n, n, -1,
               wrap(std::make_shared<const Approximant>(
                   qi_qmc(rpts, noisy(sample(f, rpts), derive_seed(cell, 1)), kc.make(rho_mc)))),
               t0);
      }
    }
    for (std::size_t idx = 0; idx < cfg.n_grid.size(); ++idx) {
      const std::size_t n = cfg.n_grid[idx];
      const std::uint64_t cell = derive_seed(derive_seed(cfg.seed, kNoiseTag + si), idx);
      const auto t0 = std::chrono::steady_clock::now();
      const int L = matched_degree(n, cfg.filter_a);
      const QuadratureRule frule = product_quadrature(2 * filtered_degree(L, cfg.filter_a));
      const auto values = noisy(sample(f, frule.nodes), derive_seed(cell, 2));
      auto hyper = std::make_shared<const Hyperinterpolant>(filtered_hyperinterpolate(L, cfg.filter_a, frule, values));
      record("fhi", n, frule.size(), L, [hyper](PointRef x) { return hyper->evaluate(x); }, t0);
    }

    if (!cfg.output.empty()) {
      std::filesystem::create_directories(cfg.output);
      std::vector<std::string> methods;
      for (const auto& r : res.rows)
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
      for (const auto& method : methods) {
        const std::string name = method + "_sigma" + fmt(levels[si]) + ".csv";
        auto out = open_csv(cfg.output / name);
        out << ErrorReport::csv_header() << ",nodes,degree\n";
        for (const auto& r : res.rows)
          if (r.method == method) out << r.report.csv_row() << ',' << r.nodes << ',' << r.degree << '\n';
        artifacts.push_back(name);
      }
    }
    results.push_back(std::move(res));
  }
  if (!cfg.output.empty()) write_manifest(cfg.output, "noise-compare", config_to_json(cfg), cfg.seed, artifacts);
  return results;
}

std::vector<TimingRow> run_timing(const ExperimentConfig& cfg) {
  validate(cfg);
  const SphereFunction f = cfg.target.function();
  const PointSet grid = random_points(cfg.timing_grid, 2, derive_seed(cfg.seed, kEvalTag));
  std::vector<TimingRow> rows;

  auto median_time = [&](auto&& body) {
    std::vector<double> ts;
    for (std::size_t r = 0; r < cfg.timing_repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      body();
      ts.push_back(seconds_since(t0));
    }
    std::sort(ts.begin(), ts.end());
    return ts[ts.size() / 2];
  };
  volatile double sink = 0.0;
  auto consume = [&](const auto& approx) {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) s += approx(grid[i]);
    sink = sink + s;
  };

  for (std::size_t idx = 0; idx < cfg.n_grid.size(); ++idx) {
    const std::size_t n = cfg.n_grid[idx];
    const int L_hi = matched_degree(n, 1.0);
    rows.push_back({"hi", n, median_time([&] {
                      const QuadratureRule rule = product_quadrature(2 * L_hi);
                      consume(hyperinterpolate(L_hi, rule, sample(f, rule.nodes)));
                    })});
    const int L_fhi = matched_degree(n, cfg.filter_a);
    rows.push_back({"fhi", n, median_time([&] {
                      const QuadratureRule rule = product_quadrature(2 * filtered_degree(L_fhi, cfg.filter_a));
                      consume(filtered_hyperinterpolate(L_fhi, cfg.filter_a, rule, sample(f, rule.nodes)));
                    })});
    const double rho = cfg.rho_rule.rho(n, idx);
    rows.push_back({"qmcqi", n, median_time([&] {
                      const PointSet pts = make_points(cfg, n, idx, derive_seed(cfg.seed, idx));
                      consume(qi_qmc(pts, sample(f, pts), cfg.kernel.make(rho)));
                    })});
  }

  if (!cfg.output.empty()) {
    std::filesystem::create_directories(cfg.output);
    auto out = open_csv(cfg.output / "timing.csv");
    out << "method,N,time_s\n";
    for (const auto& r : rows) out << r.method << ',' << r.n << ',' << fmt(r.median_s) << '\n';
    write_manifest(cfg.output, "timing", config_to_json(cfg), cfg.seed, {"timing.csv"});
  }
  return rows;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command, const std::string& config_json,
                    std::uint64_t seed, const std::vector<std::string>& artifacts) {
  std::filesystem::create_directories(dir);
  json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["seed"] = seed;
  m["config"] = config_json.empty() ? json(nullptr) : json::parse(config_json);
  m["artifacts"] = artifacts;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
  out << m.dump(2) << '\n';
}

}  // namespace skqi
