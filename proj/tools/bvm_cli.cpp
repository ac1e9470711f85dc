// bvm: command-line front end.
//
//   bvm fit       --input FILE [--unit degrees|radians] [--method ml|map1|map2|map3|mml] [--variant ...]
//   bvm mixture   --input FILE [--unit ...] [--variant sine|independent] [--seed S] [--max-iterations M]
//                 [--out-dir DIR]
//   bvm benchmark --config FILE.toml [--output FILE.csv]
//   bvm null      (--n N | --input FILE) [--epsilon E] [--R R] [--r r]
//
// Exit status: 0 success, 1 input error, 2 numerical or convergence error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <toml.hpp>

#include "bvm.hpp"
#include "bvm/harness/benchmark.hpp"
#include "bvm/harness/contour.hpp"
#include "bvm/harness/ingest.hpp"
#include "bvm/harness/null_model.hpp"
#include "bvm/harness/report.hpp"

namespace {

constexpr int kExitInput = 1;
constexpr int kExitNumeric = 2;

bvm::Variant parse_variant(const std::string& s) {
  if (s == "sine") return bvm::Variant::Sine;
  if (s == "independent") return bvm::Variant::Independent;
  throw bvm::InputError("unknown variant '" + s + "'");
}

template <typename T>
std::vector<T> toml_list(const toml::table& t, std::string_view key, std::vector<T> fallback) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  std::vector<T> out;
  auto push = [&](const toml::node& n) {
    if (auto v = n.value<T>()) {
      out.push_back(*v);
    } else {
      throw bvm::InputError("config: '" + std::string(key) + "' has a non-numeric entry");
    }
  };
  if (const auto* arr = node->as_array()) {
    for (const auto& n : *arr) push(n);
  } else {
    push(*node);
  }
  return out;
}

template <typename T>
T toml_scalar(const toml::table& t, std::string_view key, T fallback) {
  const auto* node = t.get(key);
  if (!node) return fallback;
  if (auto v = node->value<T>()) return *v;
  throw bvm::InputError("config: '" + std::string(key) + "' must be a number");
}

bool known_key(std::string_view k) {
  for (std::string_view known : {"sample_sizes", "kappa1", "kappa2", "rho", "mu1", "mu2", "replicates", "seed"})
    if (k == known) return true;
  return false;
}

bvm::BenchmarkConfig load_benchmark_config(const std::string& path) {
  toml::table t;
  try {
    t = toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    throw bvm::InputError(path + ": " + std::string(e.description()));
  }
  bvm::BenchmarkConfig cfg;
  cfg.sample_sizes = toml_list<int>(t, "sample_sizes", cfg.sample_sizes);
  cfg.kappa1 = toml_list<double>(t, "kappa1", cfg.kappa1);
  cfg.kappa2 = toml_list<double>(t, "kappa2", cfg.kappa2);
  cfg.rho = toml_list<double>(t, "rho", cfg.rho);
  cfg.mu1 = toml_scalar<double>(t, "mu1", cfg.mu1);
  cfg.mu2 = toml_scalar<double>(t, "mu2", cfg.mu2);
  cfg.replicates = toml_scalar<int>(t, "replicates", cfg.replicates);
  const auto seed = toml_scalar<std::int64_t>(t, "seed", static_cast<std::int64_t>(cfg.seed));
  if (seed < 0) throw bvm::InputError("config: 'seed' must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  for (const auto& [key, node] : t)
    if (!known_key(key.str())) throw bvm::InputError("config: unknown key '" + std::string(key.str()) + "'");
  cfg.validate();
  return cfg;
}

int run_fit(const std::string& input, const std::string& unit, const std::string& method,
            const std::string& variant) {
  const auto ds = bvm::ingest(input, bvm::parse_unit(unit));
  const auto m = bvm::parse_method(method);
  bvm::EstimatorOptions opt;
  opt.variant = parse_variant(variant);
  const auto rep = bvm::estimate(bvm::TorusStats::from(ds.points), m, opt);
  nlohmann::ordered_json out{{"method", bvm::to_string(rep.method)},
                             {"variant", bvm::to_string(opt.variant)},
                             {"n", ds.n()},
                             {"params", bvm::params_json(rep.params_hat)},
                             {"objective", rep.objective_value},
                             {"optimizer_evals", rep.optimizer_evals},
                             {"converged", rep.converged}};
  if (m == bvm::Method::MML || m == bvm::Method::ML) {
    const auto ml = bvm::message_length(ds.points, rep.params_hat, opt.variant);
    out["message"] = bvm::message_json(ml);
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_mixture(const std::string& input, const std::string& unit, const std::string& variant,
                std::uint64_t seed, int max_iterations, double epsilon, const std::string& out_dir) {
  const auto ds = bvm::ingest(input, bvm::parse_unit(unit));
  bvm::MixtureOptions opt;
  opt.max_search_iterations = max_iterations;
  opt.mml.epsilon = epsilon;
  const auto result = bvm::search_optimal_mixture(ds.points, parse_variant(variant), seed, opt);

  bvm::Rng rng(seed);
  std::vector<bvm::ComponentContour> contours;
  for (std::size_t j = 0; j < result.model.size(); ++j)
    contours.push_back(bvm::component_contour(result.model.components[j], j, rng));

  const auto uniform = bvm::uniform_null_bits(ds.n(), epsilon);
  const auto mixture = bvm::mixture_null_report(result.model, ds.n());
  nlohmann::ordered_json nulls = nlohmann::ordered_json::array({bvm::null_json(uniform), bvm::null_json(mixture)});

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  std::ofstream(dir / "model.json") << bvm::mixture_json(result.model, ds.n()).dump(2) << '\n';
  {
    std::ofstream trace(dir / "trace.csv");
    bvm::write_trace_csv(trace, result.trace);
  }
  {
    std::ofstream contour(dir / "contours.csv");
    bvm::write_contour_csv(contour, contours);
  }
  std::ofstream(dir / "null.json") << nulls.dump(2) << '\n';

  std::cout << "K = " << result.model.size() << ", total = " << result.model.message.total << " bits ("
            << mixture.bits_per_point << " bits/point; uniform " << uniform.bits_per_point << ")\n"
            << "wrote " << (dir / "model.json").string() << ", trace.csv, contours.csv, null.json\n";
  return 0;
}

int run_benchmark(const std::string& config, const std::string& output) {
  const auto cfg = load_benchmark_config(config);
  const auto result = bvm::run_estimator_benchmark(cfg);
  if (output.empty() || output == "-") {
    bvm::write_benchmark_csv(std::cout, result);
  } else {
    std::ofstream os(output);
    if (!os) throw bvm::InputError("cannot write '" + output + "'");
    bvm::write_benchmark_csv(os, result);
  }
  return 0;
}

int run_null(long long n, const std::string& input, const std::string& unit, double epsilon, double big_r,
             double small_r) {
  std::size_t count = 0;
  if (!input.empty()) {
    count = bvm::ingest(input, bvm::parse_unit(unit)).n();
  } else {
    if (n < 1) throw bvm::InputError("null: give --n >= 1 or --input");
    count = static_cast<std::size_t>(n);
  }
  const auto rep = bvm::uniform_null_bits(count, epsilon, big_r, small_r);
  std::cout << bvm::null_json(rep).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bivariate von Mises estimation and mixture modelling on the torus"};
  app.require_subcommand(1);

  std::string input, unit = "degrees", method = "mml", variant = "sine", config, output, out_dir = "mixture_out";
  std::uint64_t seed = 1;
  int max_iterations = 50;
  double epsilon = 1e-3, big_r = 1.0, small_r = 1.0;
  long long n = 0;

  auto* fit = app.add_subcommand("fit", "Estimate a single component");
  fit->add_option("--input", input, "CSV file of phi,psi pairs")->required();
  fit->add_option("--unit", unit, "Angle unit of the input")->check(CLI::IsMember({"degrees", "radians"}));
  fit->add_option("--method", method, "Estimator")->check(CLI::IsMember({"ml", "map1", "map2", "map3", "mml"}));
  fit->add_option("--variant", variant, "Model variant")->check(CLI::IsMember({"sine", "independent"}));

  auto* mix = app.add_subcommand("mixture", "Search for the optimal mixture");
  mix->add_option("--input", input, "CSV file of phi,psi pairs")->required();
  mix->add_option("--unit", unit, "Angle unit of the input")->check(CLI::IsMember({"degrees", "radians"}));
  mix->add_option("--variant", variant, "Component variant")->check(CLI::IsMember({"sine", "independent"}));
  mix->add_option("--seed", seed, "Random seed");
  mix->add_option("--max-iterations", max_iterations, "Search iteration limit")->check(CLI::PositiveNumber);
  mix->add_option("--epsilon", epsilon, "Data resolution in radians")->check(CLI::PositiveNumber);
  mix->add_option("--out-dir", out_dir, "Directory for model.json, trace.csv, contours.csv, null.json");

  auto* bench = app.add_subcommand("benchmark", "Compare estimators on simulated data");
  bench->add_option("--config", config, "TOML experiment description")->required();
  bench->add_option("--output", output, "CSV destination (default stdout)");

  auto* null = app.add_subcommand("null", "Uniform null-model message length");
  null->add_option("--n", n, "Number of points");
  null->add_option("--input", input, "Count points from this CSV instead");
  null->add_option("--unit", unit, "Angle unit of the input")->check(CLI::IsMember({"degrees", "radians"}));
  null->add_option("--epsilon", epsilon, "Data resolution in radians")->check(CLI::PositiveNumber);
  null->add_option("--R", big_r, "Range scale R")->check(CLI::PositiveNumber);
  null->add_option("--r", small_r, "Range scale r")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*fit) return run_fit(input, unit, method, variant);
    if (*mix) return run_mixture(input, unit, variant, seed, max_iterations, epsilon, out_dir);
    if (*bench) return run_benchmark(config, output);
    if (*null) return run_null(n, input, unit, epsilon, big_r, small_r);
  } catch (const bvm::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const bvm::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
