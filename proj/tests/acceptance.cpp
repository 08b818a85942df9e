// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "skqi/harness.hpp"

using namespace skqi;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, double seconds) {
  std::printf("criterion %2d: %s  %s  [%.1f s]\n", id, ok ? "PASS" : "FAIL", what.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig config(const char* name) {
  ExperimentConfig cfg = load_config(std::string(SKQI_CONFIG_DIR) + "/" + name);
  cfg.output.clear();
  return cfg;
}

template <class F>
void run(int id, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string what;
  try {
    std::tie(ok, what) = body();
  } catch (const std::exception& e) {
    what = std::string("exception: ") + e.what();
  }
  report(id, ok, what, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

const RadialProfile kProfiles[] = {RadialProfile::gaussian(), RadialProfile::wendland(3, 1)};

}  // namespace

int main() {
  // 1. Funk-Hecke eigenvalue identity against direct surface integration.
  run(1, [] {
    const auto xs = random_points(20, 2, 2024);
    double worst = 0.0;
    for (const auto& p : kProfiles)
      for (double rho : {0.05, 0.1, 0.2}) {
        const auto k = make_kernel(p, rho, 2);
        const auto s = spectrum_quadrature(k, 10);
        std::vector<double> y;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          const auto conv = oracle::cap_moments(k, xs[i], 10, 4000);
          eval_harmonics_upto(10, xs[i], y);
          for (int ell = 0; ell <= 10; ++ell)
            for (int kk = 1; kk <= 2 * ell + 1; ++kk) {
              const std::size_t q = coeff_index(ell, kk);
              worst = std::max(worst, std::abs(conv[q] - s[ell] * y[q]));
            }
        }
      }
    return std::pair{worst < 1e-7, fmt("Funk-Hecke identity, max abs deviation %.2e (tol 1e-7)", worst)};
  });

  // 2. Closed-form Wendland spectrum vs quadrature.
  run(2, [] {
    double worst = 0.0;
    for (int k = 0; k <= 3; ++k)
      for (double rho : {0.05, 0.1, 0.2}) {
        const auto kernel = make_kernel(RadialProfile::wendland(k + 2, k), rho, 2);
        const auto a = spectrum_closed(kernel, 50);
        const auto b = spectrum_quadrature(kernel, 50);
        for (int ell = 0; ell <= 50; ++ell) worst = std::max(worst, std::abs(a[ell] - b[ell]));
      }
    return std::pair{worst < 1e-8, fmt("closed form vs quadrature, max abs deviation %.2e (tol 1e-8)", worst)};
  });

  // 3. Norm scaling in rho.
  run(3, [] {
    double worst_inf = 0.0, worst_2 = 0.0;
    for (const auto& p : kProfiles) {
      double lo_inf = 1e300, hi_inf = 0, lo_2 = 1e300, hi_2 = 0;
      for (double rho : {0.4, 0.2, 0.1, 0.05}) {
        const auto [sup, l2] = oracle::kernel_norms(make_kernel(p, rho, 2));
        lo_inf = std::min(lo_inf, sup * rho * rho);
        hi_inf = std::max(hi_inf, sup * rho * rho);
        lo_2 = std::min(lo_2, l2 * rho);
        hi_2 = std::max(hi_2, l2 * rho);
      }
      worst_inf = std::max(worst_inf, hi_inf / lo_inf);
      worst_2 = std::max(worst_2, hi_2 / lo_2);
    }
    return std::pair{worst_inf < 2.0 && worst_2 < 2.0,
                     fmt("max/min of sup*rho^2 = %.3f, of L2*rho = %.3f (limit 2)", worst_inf, worst_2)};
  });

  // 4. QMC slope on spiral points.
  run(4, [] {
    const auto res = run_convergence(config("convergence_gs.json"));
    const double s = res.fit.slope;
    return std::pair{std::abs(s + 0.96) <= 0.2, fmt("GS Gaussian m=4 Y_{6,4}: L2 slope %.3f (target -0.96 +- 0.2)", s)};
  });

  // 5. MMSE slope on random points.
  run(5, [] {
    const auto res = run_convergence(config("convergence_rd.json"));
    const double s = res.fit.slope;
    const bool ok = std::abs(s + 0.46) <= 0.2 && std::abs(s + 0.5) <= 0.2;
    return std::pair{ok, fmt("RD Gaussian m=2 MMSE slope %.3f (target -0.46 +- 0.2; rate exponent -0.5)", s)};
  });

  // 6. Multilevel vs single level with noise.
  run(6, [] {
    const auto res = run_multilevel_compare(config("multilevel_noisy.json"));
    auto last = [&](double sigma) {
      const MultilevelRow* r = nullptr;
      for (const auto& row : res.rows)
        if (row.noise == sigma && (!r || row.level > r->level)) r = &row;
      if (!r) throw std::runtime_error("missing noise level in results");
      return *r;
    };
    const auto a = last(0.01), b = last(0.1);
    auto within2 = [](double v, double ref) { return v >= ref / 2 && v <= ref * 2; };
    const bool ml_ok = within2(a.ml_l2, 6.82e-3);
    const bool sl_ok = within2(a.sl_l2, 2.55e-2);
    const bool gap1 = a.sl_l2 >= 2 * a.ml_l2;
    const bool gap2 = b.sl_l2 >= 2 * b.ml_l2;
    return std::pair{ml_ok && sl_ok && gap1 && gap2,
                     fmt("sigma=0.01: ML %.3e [%s] SL %.3e [%s] SL/ML %.2f [%s]; sigma=0.1: ML %.3e SL %.3e SL/ML %.2f [%s]",
                         a.ml_l2, ml_ok ? "ok" : "off", a.sl_l2, sl_ok ? "ok" : "off", a.sl_l2 / a.ml_l2,
                         gap1 ? "ok" : "<2", b.ml_l2, b.sl_l2, b.sl_l2 / b.ml_l2, gap2 ? "ok" : "<2")};
  });

  // 7. Multilevel invariants.
  run(7, [] {
    std::vector<PointSet> base;
    for (std::size_t n : {144u, 576u, 2304u}) base.push_back(spiral_points(n));
    const auto schedule = build_schedule(base, 2.8, FillMode::Nominal);
    const RadialProfile w = RadialProfile::wendland(3, 1);
    MultilevelOptions opt;
    opt.order = 2;
    const auto ml = multilevel_approximate(schedule, franke, w, opt);
    const std::size_t n = ml.levels();
    const PointSet& sites = schedule.levels.back().sites;
    double tele = 0.0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      // E_n = E_{n-1} - Q_n E_{n-1}, with E_{n-1} the stored residual at the final sites.
      const double e_n = ml.residuals(n - 1)[i] - ml.stage(n - 1)(sites[i]);
      tele = std::max(tele, std::abs(ml(sites[i]) + e_n - franke(sites[i])));
    }
    const auto probe = random_points(200, 2, 7);
    double expand = 0.0;
    for (std::size_t levels = 1; levels <= 3; ++levels) {
      std::vector<PointSet> sub(base.begin(), base.begin() + static_cast<long>(levels));
      const auto chk = expand_operators(build_schedule(sub, 2.8, FillMode::Nominal), franke, w, 2, probe);
      expand = std::max({expand, chk.max_diff_m, chk.max_diff_e});
    }
    return std::pair{tele < 1e-10 && expand < 1e-10,
                     fmt("telescoping max %.2e, expanded form max %.2e (tol 1e-10)", tele, expand)};
  });

  // 8. Noise robustness: QMC-QI keeps improving, FHI stalls.
  run(8, [] {
    auto cfg = config("noise_compare.json");
    cfg.noise->levels = {0.1};
    cfg.orders = {2};
    const auto res = run_noise_compare(cfg).front();
    const auto q = res.l2_series("qmcqi_m2");
    const auto f = res.l2_series("fhi");
    bool dec = true;
    for (std::size_t i = 1; i < q.size(); ++i) dec = dec && q[i] < q[i - 1];
    const std::size_t half = f.size() / 2;
    const bool stall = f.back() >= 0.95 * f[half];
    std::string qs, fs;
    for (double v : q) qs += fmt(" %.3e", v);
    for (double v : f) fs += fmt(" %.3e", v);
    return std::pair{dec && stall, "sigma=0.1 QMC-QI L2" + qs + (dec ? " (decreasing)" : " (NOT decreasing)") +
                                       "; FHI L2" + fs + (stall ? " (stalls)" : " (keeps decreasing)")};
  });

  // 9. Concentration: failure frequency does not grow with N.
  run(9, [] {
    const auto f = [](PointRef x) { return eval_harmonic({6, 4}, x); };
    const auto rule = product_quadrature(kDefaultL2Degree);
    const std::size_t grid[3] = {256, 1024, 4096};
    std::vector<std::vector<double>> errs(3);
    for (int g = 0; g < 3; ++g) {
      const auto kernel = make_kernel(RadialProfile::gaussian(), std::pow(double(grid[g]), -0.25), 2, 2);
      for (std::uint64_t s = 0; s < 200; ++s) {
        const auto q = qi_mc(grid[g], derive_seed(0xc0c0, 1000 * g + s), f, kernel);
        errs[g].push_back(l2_error([&](PointRef x) { return q(x); }, f, rule));
      }
    }
    // Errors concentrate tightly at each N, so eps from the smallest N is never reached at all;
    // the median at the largest N gives a non-trivial threshold.
    double med[3];
    for (int g = 0; g < 3; ++g) {
      auto e = errs[g];
      std::nth_element(e.begin(), e.begin() + 100, e.end());
      med[g] = e[100];
    }
    const double eps = 2.0 * med[2];
    double freq[3];
    for (int g = 0; g < 3; ++g)
      freq[g] = std::count_if(errs[g].begin(), errs[g].end(), [&](double e) { return e >= eps; }) / 200.0;
    const bool ok = freq[1] <= freq[0] && freq[2] <= freq[1];
    return std::pair{ok, fmt("medians %.3f %.3f %.3f, eps=%.3f, P{err>=eps} at N=256,1024,4096: %.3f %.3f %.3f", med[0], med[1],
                          med[2], eps, freq[0], freq[1], freq[2])};
  });

  // 10. Filter.
  run(10, [] {
    bool ok = true;
    for (int i = 0; i <= 1000; ++i) ok = ok && filter_h(i / 1000.0, 1.2) == 1.0;
    for (double x : {1.2, 1.3, 2.0, 100.0}) ok = ok && filter_h(x, 1.2) == 0.0;
    const bool flat = ok;
    double prev = 1.0;
    bool mono = true;
    for (int i = 0; i <= 10000; ++i) {
      const double v = filter_h(1.0 + 0.2 * i / 10000.0, 1.2);
      mono = mono && v <= prev;
      prev = v;
    }
    const double v = filter_h(1.1, 1.2);
    const double closed = std::exp(-4.0 * std::exp(-4.0));
    const bool value = std::abs(v - 0.929258) < 1e-6;
    return std::pair{flat && mono && value,
                     fmt("plateau/support %s, monotone %s, h(1.1)=%.7f vs stated 0.929258 (diff %.1e, tol 1e-6); "
                         "exp(-4e^-4)=%.7f (diff %.1e)",
                         flat ? "ok" : "bad", mono ? "ok" : "bad", v, std::abs(v - 0.929258), closed,
                         std::abs(v - closed))};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
