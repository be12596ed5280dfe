// Times the data-parallel kernels under both execution policies and
// verifies that the results agree bitwise, which the slot-parallel design
// guarantees regardless of thread count.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "oscavg/analysis.hpp"
#include "oscavg/models.hpp"
#include "oscavg/parallel.hpp"

using namespace oscavg;

namespace {

template <typename F>
double seconds(F&& work) {
  const auto t0 = std::chrono::steady_clock::now();
  work();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

bool report(const char* name, double serial_s, double parallel_s, bool match) {
  std::printf("%-22s %10.3fs %10.3fs %8.2fx   %s\n", name, serial_s, parallel_s,
              parallel_s > 0.0 ? serial_s / parallel_s : 0.0, match ? "bitwise match" : "MISMATCH");
  return match;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", max_threads());
  std::printf("%-22s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");
  bool all_match = true;

  {
    const OscillatoryModel b3 = make_bianchi3_model();
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> sd(-0.6, 0.6), od(0.05, 0.6), pd(-3.0, 3.0);
    std::vector<std::vector<double>> pts;
    while (pts.size() < 512) {
      const double sigma = sd(rng), omega = od(rng);
      if (!(1.0 - sigma * sigma - omega > 0.01)) continue;
      pts.push_back({sigma, omega, pd(rng)});
    }
    QuadratureConfig quad;
    std::vector<std::vector<double>> rs, rp;
    const double ts = seconds([&] { rs = period_average_batch(b3, pts, 0.0, quad, Exec::serial); });
    const double tp =
        seconds([&] { rp = period_average_batch(b3, pts, 0.0, quad, Exec::parallel); });
    all_match &= report("batch quadrature", ts, tp, rs == rp);
  }

  {
    const OscillatoryModel b3 = make_bianchi3_model();
    double es = 0.0, ep = 0.0;
    const double ts = seconds([&] {
      es = estimate_lipschitz(b3, b3.default_lipschitz_region, 1 << 16, 20250817, Exec::serial);
    });
    const double tp = seconds([&] {
      ep = estimate_lipschitz(b3, b3.default_lipschitz_region, 1 << 16, 20250817, Exec::parallel);
    });
    all_match &= report("Lipschitz sampling", ts, tp, es == ep);
  }

  {
    const OscillatoryModel vdp = make_vdp_model();
    RunConfig cfg;
    cfg.initial = vdp.default_initial;
    cfg.window_samples = 4096;
    ComparisonRun rs, rp;
    cfg.exec = Exec::serial;
    const double ts = seconds([&] { rs = compare(vdp, cfg, 0.0, 0.5, 2.0); });
    cfg.exec = Exec::parallel;
    const double tp = seconds([&] { rp = compare(vdp, cfg, 0.0, 0.5, 2.0); });
    const bool match = rs.times == rp.times && rs.err_xy == rp.err_xy && rs.err_xz == rp.err_xz &&
                       rs.err_yz == rp.err_yz;
    all_match &= report("window comparison", ts, tp, match);
  }

  {
    const OscillatoryModel b3 = make_bianchi3_model();
    RunConfig cfg;
    cfg.initial = b3.default_initial;
    cfg.window_samples = 512;
    const std::vector<double> levels{0.2, 0.1, 0.05, 0.025};
    ScalingReport rs, rp;
    cfg.exec = Exec::serial;
    const double ts = seconds([&] { rs = scaling_experiment(b3, cfg, levels, 0.5, 1.0); });
    cfg.exec = Exec::parallel;
    const double tp = seconds([&] { rp = scaling_experiment(b3, cfg, levels, 0.5, 1.0); });
    const bool match = rs.fitted_exponent == rp.fitted_exponent && rs.sup_errors == rp.sup_errors;
    all_match &= report("drive-level sweep", ts, tp, match);
  }

  if (!all_match) {
    std::printf("FAILURE: serial and parallel kernels disagree\n");
    return 1;
  }
  return 0;
}
