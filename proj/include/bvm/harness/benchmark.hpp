// Estimator comparison experiment: for every (N, kappa1, kappa2, rho) cell,
// draw replicate samples from the true model and fit them with ML, MAP1,
// MAP2, MAP3 and MML.
//
// Reported per method and cell:
//   bias_sq   sum over the five coordinates of (mean error)^2
//   mse       sum over the five coordinates of mean squared error
//   kl_mean   mean KL(truth || estimate)
//   kl_win_pct_mapX   percent of replicates in which the method's KL is
//             below MAPX's (ties count half)
//   lrt_stat_mean, p_gt_0.01_frac   likelihood-ratio test of the estimate
//             against the ML fit of the same sample
// Angular errors are wrapped differences.

#ifndef BVM_HARNESS_BENCHMARK_HPP_
#define BVM_HARNESS_BENCHMARK_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "bvm/errors.hpp"
#include "bvm/estimators.hpp"
#include "bvm/kl.hpp"
#include "bvm/params.hpp"
#include "bvm/sampler.hpp"
#include "bvm/stats.hpp"

namespace bvm {

struct BenchmarkConfig {
  std::vector<int> sample_sizes{10, 100, 1000};
  std::vector<double> kappa1{1.0};
  std::vector<double> kappa2{10.0};
  std::vector<double> rho{0.1, 0.5, 0.9};
  double mu1 = kPi / 2.0;
  double mu2 = kPi / 2.0;
  int replicates = 100;
  std::uint64_t seed = 1;

  void validate() const {
    if (sample_sizes.empty() || kappa1.empty() || kappa2.empty() || rho.empty())
      throw InputError("benchmark: every grid axis needs at least one value");
    for (int n : sample_sizes)
      if (n < 5) throw InputError("benchmark: sample sizes must be >= 5");
    for (double k : kappa1)
      if (!(k > 0.0)) throw InputError("benchmark: kappa1 values must be > 0");
    for (double k : kappa2)
      if (!(k > 0.0)) throw InputError("benchmark: kappa2 values must be > 0");
    for (double r : rho)
      if (!(std::abs(r) < 1.0)) throw InputError("benchmark: rho values must lie in (-1, 1)");
    if (replicates < 1) throw InputError("benchmark: replicates must be >= 1");
  }
};

inline constexpr std::array<Method, 5> kBenchmarkMethods{Method::ML, Method::MAP1, Method::MAP2, Method::MAP3,
                                                          Method::MML};

struct BenchmarkRow {
  Method method = Method::ML;
  int n = 0;
  double kappa1 = 0.0, kappa2 = 0.0, rho = 0.0;
  double bias_sq = 0.0;
  double mse = 0.0;
  double kl_mean = 0.0;
  double kl_win_pct_map1 = 0.0, kl_win_pct_map2 = 0.0, kl_win_pct_map3 = 0.0;
  double lrt_stat_mean = 0.0;
  double p_gt_001_frac = 0.0;
  int replicates = 0;  // successful fits
  int failures = 0;
  std::array<double, 5> coord_bias_sq{};  // (mu1, mu2, kappa1, kappa2, lambda)
  std::array<double, 5> coord_mse{};
  double max_abs_diff_vs_ml = 0.0;  // largest coordinate gap to the ML fit
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
};

namespace detail {

inline std::array<double, 5> coordinate_errors(const BvmSineParams& est, const BvmSineParams& truth) {
  return {angular_difference(est.mu1(), truth.mu1()), angular_difference(est.mu2(), truth.mu2()),
          est.kappa1() - truth.kappa1(), est.kappa2() - truth.kappa2(), est.lambda() - truth.lambda()};
}

inline std::uint64_t cell_seed(std::uint64_t seed, std::size_t cell, int replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(replicate)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return static_cast<std::uint64_t>(out[0]) << 32 | out[1];
}

// Two fits whose KL to the truth agree to optimizer precision split the win.
inline constexpr double kKlTieRelative = 1e-4;

inline bool kl_tie(double a, double b) {
  return std::abs(a - b) <= kKlTieRelative * std::max(std::abs(a), std::abs(b)) + 1e-9;
}

}  // namespace detail

inline BenchmarkResult run_estimator_benchmark(const BenchmarkConfig& cfg, const EstimatorOptions& base = {}) {
  cfg.validate();
  BenchmarkResult result;
  std::size_t cell = 0;
  for (int n : cfg.sample_sizes) {
    for (double k1 : cfg.kappa1) {
      for (double k2 : cfg.kappa2) {
        for (double rho : cfg.rho) {
          const BvmSineParams truth = BvmSineParams::from_rho(cfg.mu1, cfg.mu2, k1, k2, rho);
          constexpr std::size_t M = kBenchmarkMethods.size();
          struct Acc {
            std::array<double, 5> sum{}, sum_sq{};
            double kl = 0.0, wins[3] = {0, 0, 0}, lrt = 0.0, p_ok = 0.0, max_diff = 0.0;
            int ok = 0, failed = 0;
          };
          std::array<Acc, M> acc{};
          for (int r = 0; r < cfg.replicates; ++r) {
            const auto data = sample(truth, n, detail::cell_seed(cfg.seed, cell, r));
            const TorusStats stats = TorusStats::from(data);
            std::array<std::optional<EstimatorReport>, M> fit;
            for (std::size_t m = 0; m < M; ++m) {
              try {
                EstimatorOptions opt = base;
                opt.variant = Variant::Sine;
                fit[m] = estimate(stats, kBenchmarkMethods[m], opt);
              } catch (const std::exception&) {
                ++acc[m].failed;
              }
            }
            std::array<double, M> kl{};
            kl.fill(std::numeric_limits<double>::quiet_NaN());
            for (std::size_t m = 0; m < M; ++m)
              if (fit[m]) {
                try {
                  kl[m] = kl_sine(truth, fit[m]->params_hat);
                } catch (const std::exception&) {
                }
              }
            for (std::size_t m = 0; m < M; ++m) {
              if (!fit[m] || std::isnan(kl[m])) continue;
              Acc& a = acc[m];
              const auto e = detail::coordinate_errors(fit[m]->params_hat, truth);
              for (std::size_t c = 0; c < 5; ++c) {
                a.sum[c] += e[c];
                a.sum_sq[c] += e[c] * e[c];
              }
              a.kl += kl[m];
              for (std::size_t v = 0; v < 3; ++v) {
                const double other = kl[v + 1];  // MAP1..MAP3
                if (std::isnan(other)) continue;
                a.wins[v] += detail::kl_tie(kl[m], other) ? 0.5 : (kl[m] < other ? 1.0 : 0.0);
              }
              if (fit[0]) {
                const auto lr = likelihood_ratio_test(stats, fit[0]->params_hat, fit[m]->params_hat);
                a.lrt += lr.statistic;
                a.p_ok += lr.p_value > 0.01 ? 1.0 : 0.0;
                const auto d = detail::coordinate_errors(fit[m]->params_hat, fit[0]->params_hat);
                for (double x : d) a.max_diff = std::max(a.max_diff, std::abs(x));
              }
              ++a.ok;
            }
          }
          for (std::size_t m = 0; m < M; ++m) {
            const Acc& a = acc[m];
            BenchmarkRow row;
            row.method = kBenchmarkMethods[m];
            row.n = n;
            row.kappa1 = k1;
            row.kappa2 = k2;
            row.rho = rho;
            row.replicates = a.ok;
            row.failures = a.failed;
            if (a.ok > 0) {
              const double cnt = a.ok;
              for (std::size_t c = 0; c < 5; ++c) {
                const double mean = a.sum[c] / cnt;
                row.coord_bias_sq[c] = mean * mean;
                row.coord_mse[c] = a.sum_sq[c] / cnt;
                row.bias_sq += row.coord_bias_sq[c];
                row.mse += row.coord_mse[c];
              }
              row.kl_mean = a.kl / cnt;
              row.kl_win_pct_map1 = 100.0 * a.wins[0] / cnt;
              row.kl_win_pct_map2 = 100.0 * a.wins[1] / cnt;
              row.kl_win_pct_map3 = 100.0 * a.wins[2] / cnt;
              row.lrt_stat_mean = a.lrt / cnt;
              row.p_gt_001_frac = a.p_ok / cnt;
              row.max_abs_diff_vs_ml = a.max_diff;
            }
            result.rows.push_back(row);
          }
          ++cell;
        }
      }
    }
  }
  return result;
}

inline void write_benchmark_csv(std::ostream& os, const BenchmarkResult& r) {
  os << "method,N,kappa1,kappa2,rho,bias_sq,mse,kl_mean,kl_win_pct_map1,kl_win_pct_map2,kl_win_pct_map3,"
        "lrt_stat_mean,p_gt_0.01_frac\n";
  const auto old = os.precision(10);
  for (const auto& row : r.rows) {
    os << to_string(row.method) << ',' << row.n << ',' << row.kappa1 << ',' << row.kappa2 << ',' << row.rho << ','
       << row.bias_sq << ',' << row.mse << ',' << row.kl_mean << ',' << row.kl_win_pct_map1 << ','
       << row.kl_win_pct_map2 << ',' << row.kl_win_pct_map3 << ',' << row.lrt_stat_mean << ','
       << row.p_gt_001_frac << '\n';
  }
  os.precision(old);
}

}  // namespace bvm

#endif  // BVM_HARNESS_BENCHMARK_HPP_
