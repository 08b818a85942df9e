#include <chrono>
#include <cstdio>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "skqi/harness.hpp"

using namespace skqi;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON experiment config");
  cmd->add_option("--seed", c.seed, "base seed (overrides the config)");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_flag("--paper-scale", c.paper_scale, "full-size runs (J=100 trials, M=50000 eval points)");
}

ExperimentConfig resolve(const Common& c, Experiment e) {
  ExperimentConfig cfg = c.config.empty() ? default_config(e) : load_config(c.config);
  if (cfg.experiment != e && !c.config.empty())
    throw ConfigError("experiment", "config is for '" + to_string(cfg.experiment) + "', command is '" +
                                        to_string(e) + "'");
  cfg.experiment = e;
  if (c.seed) cfg.seed = *c.seed;
  cfg.output = c.out;
  if (c.paper_scale) apply_paper_scale(cfg);
  validate(cfg);
  return cfg;
}

std::uint64_t seed_or(const Common& c, std::uint64_t fallback) { return c.seed.value_or(fallback); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scaled zonal kernel quasi-interpolation on the sphere"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // gen-points
  Common gp;
  std::string gp_kind = "spiral";
  std::size_t gp_n = 1024;
  int gp_dim = 2;
  auto* gen = app.add_subcommand("gen-points", "write a random or spiral point file");
  add_common(gen, gp);
  gen->add_option("--kind", gp_kind, "random | spiral")->check(CLI::IsMember({"random", "spiral"}));
  gen->add_option("--n", gp_n, "number of points")->check(CLI::PositiveNumber);
  gen->add_option("--dim", gp_dim, "sphere dimension d (random only)")->check(CLI::PositiveNumber);

  // spectrum
  Common sp;
  std::string sp_family = "wendland", sp_method = "quadrature";
  int sp_l = 3, sp_k = 1, sp_order = 2, sp_lmax = 50, sp_dim = 2;
  double sp_rho = 0.1;
  auto* spec = app.add_subcommand("spectrum", "Fourier-Legendre coefficients of a scaled kernel");
  add_common(spec, sp);
  spec->add_option("--family", sp_family)->check(CLI::IsMember({"gaussian", "wendland"}));
  spec->add_option("--l", sp_l, "Wendland exponent parameter");
  spec->add_option("--k", sp_k, "Wendland smoothness parameter");
  spec->add_option("--order", sp_order, "kernel order m");
  spec->add_option("--rho", sp_rho, "scale in (0,1)");
  spec->add_option("--lmax", sp_lmax, "largest degree");
  spec->add_option("--dim", sp_dim, "sphere dimension d");
  spec->add_option("--method", sp_method)->check(CLI::IsMember({"quadrature", "closed"}));

  // approx
  Common ap;
  std::optional<std::size_t> ap_n;
  std::string ap_points;
  bool ap_dump = false;
  auto* approx = app.add_subcommand("approx", "one quasi-interpolant from a convergence-style config");
  add_common(approx, ap);
  approx->add_option("--n", ap_n, "use this N (first grid entry otherwise)");
  approx->add_option("--points", ap_points, "point file to use instead of the configured kind");
  approx->add_flag("--dump-samples", ap_dump, "write the site samples as samples.csv");

  Common ml, cv, nc, tm;
  auto* multi = app.add_subcommand("multilevel", "multilevel vs single-level comparison");
  add_common(multi, ml);
  auto* conv = app.add_subcommand("convergence", "convergence study with fitted slope");
  add_common(conv, cv);
  auto* noise = app.add_subcommand("noise-compare", "QMC-QI, MCQI and FHI on noisy data");
  add_common(noise, nc);
  auto* timing = app.add_subcommand("timing", "wall-clock of HI, FHI and QMC-QI");
  add_common(timing, tm);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const std::uint64_t seed = seed_or(gp, 1);
      if (gp_kind == "spiral" && gp_dim != 2) throw InvalidArgument("spiral points exist on S^2 only");
      const PointSet pts = gp_kind == "random" ? random_points(gp_n, gp_dim, seed) : spiral_points(gp_n);
      std::filesystem::create_directories(gp.out);
      save_points(pts, std::filesystem::path(gp.out) / "points.txt");
      write_manifest(gp.out, "gen-points",
                     "{\"kind\": \"" + gp_kind + "\", \"n\": " + std::to_string(gp_n) +
                         ", \"dim\": " + std::to_string(gp_dim) + "}",
                     seed, {"points.txt"});
      std::cout << "wrote " << pts.size() << " points to " << gp.out << "/points.txt\n";
    } else if (spec->parsed()) {
      const RadialProfile profile =
          sp_family == "gaussian" ? RadialProfile::gaussian() : RadialProfile::wendland(sp_l, sp_k);
      const ZonalKernel kernel = make_kernel(profile, sp_rho, sp_dim, sp_order);
      const KernelSpectrum s = sp_method == "closed" ? spectrum_closed(kernel, sp_lmax)
                                                     : spectrum_quadrature(kernel, sp_lmax);
      std::filesystem::create_directories(sp.out);
      write_spectrum_csv(s, std::filesystem::path(sp.out) / "spectrum.csv");
      char cfg[256];
      std::snprintf(cfg, sizeof cfg,
                    "{\"family\": \"%s\", \"l\": %d, \"k\": %d, \"order\": %d, \"rho\": %.17g, \"lmax\": %d, "
                    "\"dim\": %d, \"method\": \"%s\"}",
                    sp_family.c_str(), sp_l, sp_k, sp_order, sp_rho, sp_lmax, sp_dim, sp_method.c_str());
      write_manifest(sp.out, "spectrum", cfg, seed_or(sp, 0), {"spectrum.csv"});
      if (s.L_max() >= static_cast<int>(1.0 / sp_rho)) {
        const auto rep = assumption_diagnostics(s, sp_order, 1.5);
        std::printf("ell_rho=%d low_degree_ratio=%.6g high_degree_max=%.6g decay[s=1.5]=[%.6g, %.6g]\n",
                    rep.ell_rho, rep.low_degree_ratio, rep.high_degree_max, rep.decay_min, rep.decay_max);
      }
      std::cout << "wrote " << s.coeffs.size() << " coefficients to " << sp.out << "/spectrum.csv\n";
    } else if (approx->parsed()) {
      ExperimentConfig cfg = ap.config.empty() ? default_config(Experiment::Convergence) : load_config(ap.config);
      if (ap.seed) cfg.seed = *ap.seed;
      if (ap.paper_scale) apply_paper_scale(cfg);
      const std::size_t n = ap_n.value_or(cfg.n_grid.front());
      const auto t0 = std::chrono::steady_clock::now();
      const PointSet pts = ap_points.empty() ? make_points(cfg, n, 0, derive_seed(cfg.seed, 0)) : load_points(ap_points);
      const double rho = cfg.rho_rule.kind == RhoRule::Kind::Explicit ? cfg.rho_rule.values.front()
                                                                      : cfg.rho_rule.rho(pts.size(), 0);
      const SphereFunction f = cfg.target.function();
      std::vector<double> values = sample(f, pts);
      if (cfg.noise && !cfg.noise->levels.empty() && cfg.noise->levels.front() > 0.0)
        values = add_noise(values, {cfg.noise->kind, cfg.noise->levels.front(), derive_seed(cfg.seed, 1)});
      const auto q = std::make_shared<const Approximant>(qi_qmc(pts, values, cfg.kernel.make(rho)));
      const SphereFunction qf = [q](PointRef x) { return q->evaluate(x); };
      ErrorReport rep;
      rep.n = pts.size();
      rep.l2 = l2_error(qf, f, product_quadrature(cfg.l2_degree));
      rep.linf = linf_error(qf, f, random_points(cfg.eval_points, 2, derive_seed(cfg.seed, 2)));
      rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const std::filesystem::path out = ap.out;
      std::filesystem::create_directories(out);
      {
        std::ofstream csv(out / "approx.csv");
        csv << ErrorReport::csv_header() << ",rho\n" << rep.csv_row() << ',' << rho << '\n';
      }
      std::vector<std::string> artifacts{"approx.csv"};
      if (ap_dump) {
        q->write_samples_csv(out / "samples.csv");
        artifacts.push_back("samples.csv");
      }
      write_manifest(out, "approx", config_to_json(cfg), cfg.seed, artifacts);
      std::cout << ErrorReport::csv_header() << '\n' << rep.csv_row() << '\n';
    } else if (multi->parsed()) {
      const auto cfg = resolve(ml, Experiment::Multilevel);
      const auto res = run_multilevel_compare(cfg);
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
      std::printf("sigma level N rho ML_L2 SL_L2\n");
      for (const auto& r : res.rows)
        std::printf("%g %zu %zu %.4f %.4e %.4e\n", r.noise, r.level, r.n, r.rho, r.ml_l2, r.sl_l2);
    } else if (conv->parsed()) {
      const auto cfg = resolve(cv, Experiment::Convergence);
      const auto res = run_convergence(cfg);
      std::cout << ErrorReport::csv_header() << '\n';
      for (const auto& r : res.rows) std::cout << r.report.csv_row() << '\n';
      std::printf("%s slope %.4f\n", res.metric.c_str(), res.fit.slope);
    } else if (noise->parsed()) {
      const auto cfg = resolve(nc, Experiment::NoiseCompare);
      for (const auto& res : run_noise_compare(cfg))
        for (const auto& r : res.rows)
          std::printf("sigma=%g %-10s N=%zu L2=%.4e\n", res.noise, r.method.c_str(), r.n, r.report.l2);
    } else if (timing->parsed()) {
      const auto cfg = resolve(tm, Experiment::Timing);
      for (const auto& r : run_timing(cfg)) std::printf("%-6s N=%zu %.4f s\n", r.method.c_str(), r.n, r.median_s);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
