#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "bvm.hpp"
#include "bvm/harness/benchmark.hpp"
#include "bvm/harness/contour.hpp"
#include "bvm/harness/ingest.hpp"
#include "bvm/harness/null_model.hpp"
#include "bvm/harness/report.hpp"

using namespace bvm;
namespace fs = std::filesystem;

namespace {

// Even-odd rule in the plane; the caller works in an unwrapped chart.
bool inside(const std::vector<std::pair<double, double>>& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto [xi, yi] = poly[i];
    const auto [xj, yj] = poly[j];
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("bvm_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(BVM_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_points(const fs::path& p, const std::vector<TorusPoint>& pts) {
  std::ofstream out(p);
  out << "phi,psi\n";
  out.precision(17);
  for (const auto& x : pts) out << radians_to_degrees(x.theta1()) << ',' << radians_to_degrees(x.theta2()) << '\n';
}

}  // namespace

TEST(Ingest, Examples) {
  const auto a = ingest_string("180,\xE2\x88\x92" "180\n", AngleUnit::Degrees);
  ASSERT_EQ(a.n(), 1u);
  EXPECT_DOUBLE_EQ(a.points[0].theta1(), -kPi);
  EXPECT_DOUBLE_EQ(a.points[0].theta2(), -kPi);
  const auto b = ingest_string("0,0\n", AngleUnit::Radians);
  EXPECT_EQ(b.points[0].theta1(), 0.0);
  const auto c = ingest_string("phi,psi\n1,2\n\n3,4\n-60,-45\n", AngleUnit::Degrees);
  EXPECT_EQ(c.n(), 3u);
  EXPECT_NEAR(c.points[2].theta1(), degrees_to_radians(-60.0), 1e-15);
  EXPECT_EQ(parse_unit("radians"), AngleUnit::Radians);
  EXPECT_THROW(parse_unit("grad"), InputError);
}

TEST(Ingest, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    try {
      ingest_string(text, AngleUnit::Degrees);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("1,2\n3,x\n").find(":2"), std::string::npos);
  EXPECT_NE(message("1,2\n3,4\nnan,1\n").find(":3"), std::string::npos);
  EXPECT_NE(message("1,2,3\n").find(":1"), std::string::npos);
  EXPECT_NE(message("1,2\nphi,psi\n").find(":2"), std::string::npos);
  EXPECT_THROW(ingest_string("", AngleUnit::Degrees), InputError);
  EXPECT_THROW(ingest_string("phi,psi\n", AngleUnit::Degrees), InputError);
  EXPECT_THROW(ingest("/nonexistent/file.csv", AngleUnit::Degrees), InputError);
}

TEST(NullModel, Uniform) {
  const auto r = uniform_null_bits(1000);
  EXPECT_NEAR(r.bits_per_point, 25.2346, 5e-5);
  EXPECT_DOUBLE_EQ(r.total_bits, 1000 * r.bits_per_point);
  EXPECT_NEAR(uniform_null_bits(7, kTwoPi).bits_per_point, 0.0, 1e-12);
  EXPECT_THROW(uniform_null_bits(1, 0.0), DomainError);
  MixtureModel m;
  m.message.total = 500.0;
  const auto mix = mixture_null_report(m, 100);
  EXPECT_EQ(mix.bits_per_point, 5.0);
}

TEST(Contour, EnclosesEightyPercent) {
  const BvmSineParams p(0.5, -1.0, 20, 8, 6);
  Rng rng(4);
  const auto c = component_contour(p, 0, rng);
  ASSERT_FALSE(c.paths.empty());
  const auto& ring = c.paths.front();
  EXPECT_TRUE(ring.closed);
  Rng fresh(99);
  int in_level = 0, in_poly = 0;
  const int n = 100000;
  const double m1 = radians_to_degrees(p.mu1()), m2 = radians_to_degrees(p.mu2());
  for (int i = 0; i < n; ++i) {
    const auto x = sample_one(p, fresh);
    if (log_kernel(x, p) >= c.log_kernel_level) ++in_level;
    const double u = m1 + radians_to_degrees(angular_difference(x.theta1(), p.mu1()));
    const double v = m2 + radians_to_degrees(angular_difference(x.theta2(), p.mu2()));
    if (inside(ring.vertices_deg, u, v)) ++in_poly;
  }
  EXPECT_NEAR(in_level / double(n), 0.80, 0.02);
  EXPECT_NEAR(in_poly / double(n), 0.80, 0.02);
}

TEST(Contour, IsotropicComponentGivesCircle) {
  const BvmSineParams p(1.0, 2.0, 40, 40, 0);
  Rng rng(1);
  const auto c = component_contour(p, 3, rng);
  ASSERT_EQ(c.paths.size(), 1u);
  const double m1 = radians_to_degrees(1.0), m2 = radians_to_degrees(2.0);
  double lo = 1e9, hi = 0, cx = 0, cy = 0;
  for (const auto& [x, y] : c.paths[0].vertices_deg) {
    const double r = std::hypot(x - m1, y - m2);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    cx += x;
    cy += y;
  }
  const double k = static_cast<double>(c.paths[0].vertices_deg.size());
  EXPECT_NEAR(cx / k, m1, 0.5);
  EXPECT_NEAR(cy / k, m2, 0.5);
  EXPECT_LT(hi / lo, 1.05);
  // -2 ln(0.2) / kappa in radians^2 from the limiting Gaussian.
  EXPECT_NEAR(0.5 * (lo + hi), radians_to_degrees(std::sqrt(-2 * std::log(0.2) / 40)), 1.0);
}

TEST(Benchmark, SchemaAndTies) {
  BenchmarkConfig cfg;
  cfg.sample_sizes = {20};
  cfg.rho = {0.5};
  cfg.replicates = 6;
  const auto r = run_estimator_benchmark(cfg);
  ASSERT_EQ(r.rows.size(), 5u);
  std::ostringstream os;
  write_benchmark_csv(os, r);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  EXPECT_EQ(header,
            "method,N,kappa1,kappa2,rho,bias_sq,mse,kl_mean,kl_win_pct_map1,kl_win_pct_map2,kl_win_pct_map3,"
            "lrt_stat_mean,p_gt_0.01_frac");
  int lines = 0;
  for (std::string l; std::getline(is, l);) {
    ++lines;
    EXPECT_EQ(std::count(l.begin(), l.end(), ','), 12);
  }
  EXPECT_EQ(lines, 5);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.replicates + row.failures, 6);
    EXPECT_LE(row.bias_sq, row.mse + 1e-12);
    // Every method ties with itself.
    if (row.method == Method::MAP1) EXPECT_GE(row.kl_win_pct_map1, 50.0 - 1e-9);
  }
  EXPECT_NEAR(r.rows[0].lrt_stat_mean, 0.0, 1e-12);
  EXPECT_NEAR(r.rows[0].kl_win_pct_map3, 50.0, 1e-9);
  const auto again = run_estimator_benchmark(cfg);
  std::ostringstream os2;
  write_benchmark_csv(os2, again);
  EXPECT_EQ(os.str(), os2.str());
  cfg.replicates = 0;
  EXPECT_THROW(cfg.validate(), InputError);
}

TEST(Report, JsonAndCsv) {
  MixtureModel m;
  m.components = {BvmSineParams(0.1, 0.2, 3, 4, 1), BvmSineParams(-1, 1, 2, 2, 0)};
  m.weights = {0.25, 0.75};
  m.message = {10, 20, 30};
  const auto j = mixture_json(m, 40);
  EXPECT_EQ(j["K"], 2);
  EXPECT_EQ(j["variant"], "sine");
  EXPECT_DOUBLE_EQ(j["components"][1]["weight"].get<double>(), 0.75);
  EXPECT_NEAR(j["components"][0]["mu1_deg"].get<double>(), radians_to_degrees(0.1), 1e-12);
  EXPECT_DOUBLE_EQ(j["message"]["total_bits"].get<double>(), 30.0);
  std::ostringstream t;
  write_trace_csv(t, {{0, 1, "initial", 1, 2, 3}, {1, 2, "split", 2, 0.5, 2.5}});
  EXPECT_EQ(t.str(), "iteration,K,first_part_bits,second_part_bits,total_bits\n0,1,1,2,3\n1,2,2,0.5,2.5\n");
  std::ostringstream c;
  ComponentContour cc;
  cc.component = 1;
  cc.paths = {ContourPath{{{1, 2}, {3, 4}}, false}, ContourPath{{{5, 6}}, false}};
  write_contour_csv(c, {cc});
  EXPECT_EQ(c.str(), "component_id,vertex_index,phi_deg,psi_deg\n1,0,1,2\n1,1,3,4\n1,0,5,6\n");
}

TEST(Cli, NullVerb) {
  const auto dir = scratch("null");
  ASSERT_EQ(run_cli("null --n 1000", dir / "out.txt"), 0);
  const auto j = nlohmann::json::parse(slurp(dir / "out.txt"));
  EXPECT_NEAR(j["bits_per_point"].get<double>(), 25.2346, 5e-5);
  EXPECT_EQ(run_cli("null --n 10 --epsilon -1", dir / "bad.txt"), 1);
}

TEST(Cli, FitVerbAndExitCodes) {
  const auto dir = scratch("fit");
  write_points(dir / "d.csv", sample(BvmSineParams(1, -1, 5, 3, 2), 200, 1));
  ASSERT_EQ(run_cli("fit --input " + (dir / "d.csv").string() + " --method mml", dir / "out.txt"), 0);
  const auto j = nlohmann::json::parse(slurp(dir / "out.txt"));
  EXPECT_NEAR(j["params"]["kappa1"].get<double>(), 5.0, 1.5);
  EXPECT_EQ(run_cli("fit --input " + (dir / "missing.csv").string(), dir / "e1.txt"), 1);
  EXPECT_EQ(run_cli("fit --input " + (dir / "d.csv").string() + " --method map9", dir / "e2.txt"), 1);
  EXPECT_EQ(run_cli("frobnicate", dir / "e3.txt"), 1);
  {
    std::ofstream bad(dir / "bad.csv");
    bad << "1,2\n3,oops\n";
  }
  EXPECT_EQ(run_cli("fit --input " + (dir / "bad.csv").string(), dir / "e4.txt"), 1);
  EXPECT_NE(slurp(dir / "e4.txt").find(":2"), std::string::npos);
  write_points(dir / "same.csv", std::vector<TorusPoint>(30, TorusPoint(0.5, 0.5)));
  EXPECT_EQ(run_cli("fit --input " + (dir / "same.csv").string(), dir / "e5.txt"), 2);
}

TEST(Cli, MixtureVerbIsDeterministic) {
  const auto dir = scratch("mix");
  std::mt19937_64 rng(2);
  auto pts = sample(BvmSineParams(-1.5, -1.5, 20, 20, 5), 250, rng);
  const auto more = sample(BvmSineParams(1.5, 1.5, 20, 20, -5), 250, rng);
  pts.insert(pts.end(), more.begin(), more.end());
  write_points(dir / "d.csv", pts);
  for (const char* run : {"a", "b"})
    ASSERT_EQ(run_cli("mixture --input " + (dir / "d.csv").string() + " --seed 3 --out-dir " + (dir / run).string(),
                      dir / (std::string(run) + ".log")),
              0);
  for (const char* f : {"model.json", "trace.csv", "contours.csv", "null.json"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  const auto model = nlohmann::json::parse(slurp(dir / "a" / "model.json"));
  EXPECT_EQ(model["K"], 2);
  const auto null = nlohmann::json::parse(slurp(dir / "a" / "null.json"));
  EXPECT_LT(null[1]["bits_per_point"].get<double>(), null[0]["bits_per_point"].get<double>());
  EXPECT_EQ(null[0]["model"], "uniform");
  EXPECT_EQ(slurp(dir / "a" / "contours.csv").rfind("component_id,vertex_index,phi_deg,psi_deg\n", 0), 0u);
}

TEST(Cli, BenchmarkVerb) {
  const auto dir = scratch("bench");
  {
    std::ofstream cfg(dir / "b.toml");
    cfg << "sample_sizes = [15]\nrho = [0.5]\nreplicates = 3\nseed = 4\n";
    std::ofstream bad(dir / "bad.toml");
    bad << "replicates = 'many'\n";
  }
  ASSERT_EQ(run_cli("benchmark --config " + (dir / "b.toml").string() + " --output " + (dir / "b.csv").string(),
                    dir / "log.txt"),
            0);
  const auto csv = slurp(dir / "b.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_EQ(run_cli("benchmark --config " + (dir / "bad.toml").string(), dir / "e.txt"), 1);
}
