// Finite mixtures of BVM components fitted by EM with an MML M-step, the
// mixture message length, and the split / delete / merge search over the
// number of components.
//
// Mixture message length, in bits:
//
//   first  = log2*(K) + (K-1)/2 log2 N - 1/2 sum_j log2 w_j - log2 (K-1)!
//            + sum_j (first part of component j with sample size n_j)
//   second = -sum_i log2 sum_j w_j f_j(x_i) + K d / (2 ln 2) - 2 N log2 eps
//
// where n_j = sum_i r_ij. Every routine accepts per-point base weights so the
// local EM inside a split can run on one component's responsibility mass.

#ifndef BVM_MIXTURE_HPP_
#define BVM_MIXTURE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "bvm/errors.hpp"
#include "bvm/estimators.hpp"
#include "bvm/fisher_mml.hpp"
#include "bvm/kl.hpp"
#include "bvm/norm_constant.hpp"
#include "bvm/params.hpp"
#include "bvm/stats.hpp"

namespace bvm {

struct MixtureModel {
  Variant variant = Variant::Sine;
  std::vector<double> weights;
  std::vector<BvmSineParams> components;
  MessageLength message;

  std::size_t size() const { return components.size(); }

  void validate() const {
    if (components.empty()) throw DomainError("MixtureModel: no components");
    if (weights.size() != components.size())
      throw DomainError("MixtureModel: weights and components differ in length");
    double sum = 0.0;
    for (double w : weights) {
      if (!(w > 0.0)) throw DomainError("MixtureModel: weights must be positive");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw DomainError("MixtureModel: weights must sum to 1");
    if (variant == Variant::Independent)
      for (const auto& c : components)
        if (c.lambda() != 0.0) throw DomainError("MixtureModel: Independent components need lambda = 0");
  }
};

struct Responsibilities {
  Eigen::MatrixXd r;            // N x K, rows sum to 1
  Eigen::VectorXd log_mixture;  // ln sum_j w_j f_j(x_i)
};

struct MixtureOptions {
  MmlSettings mml{};
  SeriesConfig series = kPreciseSeries;
  int max_em_iterations = 100;
  double em_tolerance = 1e-6;  // relative change in total message length
  int local_em_iterations = 10;
  int max_search_iterations = 50;
  NelderMeadOptions optimizer{1e-10, 1e-12, 1e-7, 3000, 1};
  std::uint64_t seed = 1;
};

// A data set prepared for repeated mixture evaluations.
class MixtureData {
public:
  explicit MixtureData(std::span<const TorusPoint> data)
      : features_(data), base_(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(data.size()))) {}
  MixtureData(const TrigFeatures& features, Eigen::VectorXd base) : features_(features), base_(std::move(base)) {
    if (base_.size() != features_.size()) throw DomainError("MixtureData: weights and data differ in length");
  }

  const TrigFeatures& features() const { return features_; }
  const Eigen::VectorXd& base() const { return base_; }
  double n() const { return base_.sum(); }
  Eigen::Index points() const { return features_.size(); }

private:
  TrigFeatures features_;
  Eigen::VectorXd base_;
};

namespace detail {

// Rissanen's universal code length for a positive integer, in bits.
inline double log2_star(int k) {
  double bits = std::log2(2.865064);
  double x = static_cast<double>(k);
  while (true) {
    x = std::log2(x);
    if (!(x > 0.0)) break;
    bits += x;
  }
  return bits;
}

inline double log2_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0) / kLn2; }

inline EstimatorOptions component_options(Variant variant, const MixtureOptions& opt) {
  EstimatorOptions e;
  e.variant = variant;
  e.optimizer = opt.optimizer;
  e.series = opt.series;
  e.mml = opt.mml;
  e.step_scale = 0.25;
  e.restart_seed = opt.seed;
  return e;
}

}  // namespace detail

inline Responsibilities e_step(const MixtureData& data, const MixtureModel& model,
                               const SeriesConfig& cfg = kPreciseSeries) {
  const Eigen::Index n = data.points();
  const auto k = static_cast<Eigen::Index>(model.size());
  Eigen::MatrixXd logp(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& c = model.components[static_cast<std::size_t>(j)];
    const double shift = std::log(model.weights[static_cast<std::size_t>(j)]) - log_norm_constant(c, cfg);
    logp.col(j) = data.features().kernels(c).array() + shift;
  }
  Responsibilities out;
  out.r.resize(n, k);
  out.log_mixture.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = logp.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (logp.row(i).array() - m).exp();
    const double s = e.sum();
    out.r.row(i) = e / s;
    out.log_mixture[i] = m + std::log(s);
  }
  return out;
}

// Effective sample size of every component.
inline Eigen::VectorXd effective_counts(const MixtureData& data, const Responsibilities& resp) {
  return resp.r.transpose() * data.base();
}

inline MessageLength mixture_message_length(const MixtureData& data, const MixtureModel& model,
                                            const Responsibilities& resp, const MmlSettings& mml = {},
                                            const SeriesConfig& cfg = kPreciseSeries) {
  const int k = static_cast<int>(model.size());
  const double n = data.n();
  const double d = free_parameters(model.variant);
  const Eigen::VectorXd nj = effective_counts(data, resp);
  double first = detail::log2_star(k) + 0.5 * (k - 1) * std::log2(n) - detail::log2_factorial(k - 1);
  for (int j = 0; j < k; ++j) {
    first -= 0.5 * std::log2(model.weights[static_cast<std::size_t>(j)]);
    first += parameter_cost_nats(model.components[static_cast<std::size_t>(j)], model.variant, nj[j], nullptr, cfg) / kLn2;
  }
  const double nll = -data.base().dot(resp.log_mixture);
  const double second = (nll + 0.5 * d * k - 2.0 * n * std::log(mml.epsilon)) / kLn2;
  return {first, second, first + second};
}

inline MessageLength mixture_message_length(std::span<const TorusPoint> data, const MixtureModel& model,
                                            const MmlSettings& mml = {},
                                            const SeriesConfig& cfg = kPreciseSeries) {
  if (data.empty()) throw DomainError("mixture_message_length: empty data");
  model.validate();
  const MixtureData md(data);
  return mixture_message_length(md, model, e_step(md, model, cfg), mml, cfg);
}

inline double mixture_log_density(const MixtureModel& model, const TorusPoint& x,
                                  const SeriesConfig& cfg = kPreciseSeries) {
  double acc = detail::kNegInf;
  for (std::size_t j = 0; j < model.size(); ++j)
    acc = detail::log_add(acc, std::log(model.weights[j]) + log_density(x, model.components[j], cfg));
  return acc;
}

struct EmResult {
  MixtureModel model;
  Responsibilities resp;
  int iterations = 0;
  int starved = 0;  // components dropped for lack of support
  bool converged = false;
};

// Components with effective support below d + 1 points cannot pay for their
// parameters; em_fit drops them and keeps iterating.
inline double starvation_threshold(Variant v) { return free_parameters(v) + 1.0; }

inline EmResult em_fit(const MixtureData& data, const MixtureModel& initial, const MixtureOptions& opt = {}) {
  initial.validate();
  const double n = data.n();
  if (n < 5.0 * static_cast<double>(initial.size()))
    throw DomainError("em_fit: need at least 5 points per component");
  const EstimatorOptions est = detail::component_options(initial.variant, opt);

  EmResult out;
  out.model = initial;
  out.resp = e_step(data, out.model, opt.series);
  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opt.max_em_iterations; ++it) {
    out.iterations = it;
    Eigen::VectorXd nj = effective_counts(data, out.resp);

    if (out.model.size() > 1) {
      std::vector<std::size_t> keep;
      for (std::size_t j = 0; j < out.model.size(); ++j)
        if (nj[static_cast<Eigen::Index>(j)] >= starvation_threshold(initial.variant)) keep.push_back(j);
      if (keep.empty()) keep.push_back(static_cast<std::size_t>(std::max_element(nj.begin(), nj.end()) - nj.begin()));
      if (keep.size() < out.model.size()) {
        out.starved += static_cast<int>(out.model.size() - keep.size());
        MixtureModel reduced;
        reduced.variant = out.model.variant;
        double total = 0.0;
        for (auto j : keep) total += out.model.weights[j];
        for (auto j : keep) {
          reduced.components.push_back(out.model.components[j]);
          reduced.weights.push_back(out.model.weights[j] / total);
        }
        out.model = reduced;
        out.resp = e_step(data, out.model, opt.series);
        nj = effective_counts(data, out.resp);
        previous = std::numeric_limits<double>::infinity();
      }
    }

    const double k = static_cast<double>(out.model.size());
    for (std::size_t j = 0; j < out.model.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      out.model.weights[j] = (nj[jj] + 0.5) / (n + 0.5 * k);
      const auto& c = out.model.components[j];
      const TorusStats s = data.features().stats(out.resp.r.col(jj).cwiseProduct(data.base()), c.mu1(), c.mu2());
      out.model.components[j] = estimate(s, Method::MML, est, c).params_hat;
    }
    out.resp = e_step(data, out.model, opt.series);
    out.model.message = mixture_message_length(data, out.model, out.resp, opt.mml, opt.series);
    const double total = out.model.message.total;
    if (std::abs(previous - total) <= opt.em_tolerance * std::abs(total)) {
      out.converged = true;
      break;
    }
    previous = total;
  }
  return out;
}

inline EmResult em_fit(std::span<const TorusPoint> data, const MixtureModel& initial,
                       const MixtureOptions& opt = {}) {
  return em_fit(MixtureData(data), initial, opt);
}

// --------------------------------------------------------- perturbations

namespace detail {

inline MixtureModel without(const MixtureModel& m, std::size_t j) {
  MixtureModel out;
  out.variant = m.variant;
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (i != j) total += m.weights[i];
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i == j) continue;
    out.components.push_back(m.components[i]);
    out.weights.push_back(m.weights[i] / total);
  }
  return out;
}

}  // namespace detail

// Split direction: principal axis of the weighted covariance of the wrapped
// deviations about the component mean, and the standard deviation along it.
struct SplitAxis {
  Eigen::Vector2d direction;
  double sd = 0.0;
};

inline SplitAxis split_axis(const MixtureData& data, const Eigen::VectorXd& weights, const BvmSineParams& c) {
  const double cm1 = std::cos(c.mu1()), sm1 = std::sin(c.mu1());
  const double cm2 = std::cos(c.mu2()), sm2 = std::sin(c.mu2());
  const auto& f = data.features();
  const double wsum = weights.sum();
  Eigen::MatrixXd dev(data.points(), 2);
  // Columns 0..3 of the feature matrix are cos x, sin x, cos y, sin y.
  for (Eigen::Index i = 0; i < data.points(); ++i) {
    const auto row = f.row(i);
    dev(i, 0) = std::atan2(row[1] * cm1 - row[0] * sm1, row[0] * cm1 + row[1] * sm1);
    dev(i, 1) = std::atan2(row[3] * cm2 - row[2] * sm2, row[2] * cm2 + row[3] * sm2);
  }
  const Eigen::Vector2d mean = dev.transpose() * weights / wsum;
  const Eigen::MatrixXd centered = dev.rowwise() - mean.transpose();
  const Eigen::Matrix2d cov = centered.transpose() * weights.asDiagonal() * centered / wsum;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const Eigen::Vector2d ev = eig.eigenvalues();
  SplitAxis axis;
  axis.sd = std::sqrt(std::max(ev[1], 0.0));
  if (ev[1] - ev[0] <= 1e-9 * std::max(std::abs(ev[1]), 1e-300)) {
    axis.direction = Eigen::Vector2d(1.0, 0.0);
  } else {
    axis.direction = eig.eigenvectors().col(1);
    if (axis.direction[0] < 0.0 || (axis.direction[0] == 0.0 && axis.direction[1] < 0.0))
      axis.direction = -axis.direction;
  }
  return axis;
}

inline std::optional<EmResult> split(const MixtureData& data, const EmResult& fit, std::size_t j,
                                     const MixtureOptions& opt = {}) {
  const MixtureModel& model = fit.model;
  if (j >= model.size()) throw DomainError("split: component index out of range");
  const auto jj = static_cast<Eigen::Index>(j);
  const Eigen::VectorXd mass = fit.resp.r.col(jj).cwiseProduct(data.base());
  if (mass.sum() < 2.0 * starvation_threshold(model.variant)) return std::nullopt;

  const BvmSineParams& parent = model.components[j];
  const SplitAxis axis = split_axis(data, mass, parent);
  auto child = [&](double sign) {
    return BvmSineParams(parent.mu1() + sign * axis.sd * axis.direction[0],
                         parent.mu2() + sign * axis.sd * axis.direction[1], parent.kappa1(), parent.kappa2(),
                         parent.lambda());
  };
  MixtureModel local;
  local.variant = model.variant;
  local.components = {child(1.0), child(-1.0)};
  local.weights = {0.5, 0.5};
  MixtureOptions local_opt = opt;
  local_opt.max_em_iterations = opt.local_em_iterations;
  const EmResult children = em_fit(MixtureData(data.features(), mass), local, local_opt);
  if (children.model.size() != 2) return std::nullopt;

  MixtureModel next;
  next.variant = model.variant;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (i == j) {
      for (std::size_t c = 0; c < 2; ++c) {
        next.components.push_back(children.model.components[c]);
        next.weights.push_back(model.weights[j] * children.model.weights[c]);
      }
    } else {
      next.components.push_back(model.components[i]);
      next.weights.push_back(model.weights[i]);
    }
  }
  EmResult out = em_fit(data, next, opt);
  if (out.model.size() != model.size() + 1) return std::nullopt;
  return out;
}

inline EmResult remove_component(const MixtureData& data, const EmResult& fit, std::size_t j,
                                 const MixtureOptions& opt = {}) {
  if (fit.model.size() < 2) throw DomainError("delete: mixture has a single component");
  if (j >= fit.model.size()) throw DomainError("delete: component index out of range");
  return em_fit(data, detail::without(fit.model, j), opt);
}

// Index of the component closest to j in KL(component_j || component_i).
inline std::size_t merge_partner(const MixtureModel& model, std::size_t j, const SeriesConfig& cfg = kPreciseSeries) {
  if (model.size() < 2) throw DomainError("merge: mixture has a single component");
  std::size_t best = j == 0 ? 1 : 0;
  double best_kl = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (i == j) continue;
    const double d = kl_sine(model.components[j], model.components[i], cfg);
    if (d < best_kl) {
      best_kl = d;
      best = i;
    }
  }
  return best;
}

inline EmResult merge(const MixtureData& data, const EmResult& fit, std::size_t j, const MixtureOptions& opt = {}) {
  const MixtureModel& model = fit.model;
  if (model.size() < 2) throw DomainError("merge: mixture has a single component");
  if (j >= model.size()) throw DomainError("merge: component index out of range");
  const std::size_t i = merge_partner(model, j, opt.series);
  const Eigen::VectorXd pooled =
      (fit.resp.r.col(static_cast<Eigen::Index>(j)) + fit.resp.r.col(static_cast<Eigen::Index>(i)))
          .cwiseProduct(data.base());
  const TorusStats s = data.features().stats(pooled);
  const EstimatorOptions est = detail::component_options(model.variant, opt);
  const BvmSineParams merged = estimate(s, Method::MML, est, moment_init(s, model.variant)).params_hat;

  MixtureModel next;
  next.variant = model.variant;
  const std::size_t lo = std::min(i, j), hi = std::max(i, j);
  for (std::size_t k = 0; k < model.size(); ++k) {
    if (k == hi) continue;
    next.components.push_back(k == lo ? merged : model.components[k]);
    next.weights.push_back(k == lo ? model.weights[i] + model.weights[j] : model.weights[k]);
  }
  return em_fit(data, next, opt);
}

// ----------------------------------------------------------------- search

struct SearchTraceEntry {
  int iteration = 0;
  int components = 0;
  std::string operation;  // initial, split, delete, merge
  double first_part = 0.0;
  double second_part = 0.0;
  double total = 0.0;
};

struct SearchResult {
  MixtureModel model;
  std::vector<SearchTraceEntry> trace;
};

inline SearchResult search_optimal_mixture(std::span<const TorusPoint> points, Variant variant,
                                           std::uint64_t seed, MixtureOptions opt = {}) {
  if (points.size() < 20) throw DomainError("search_optimal_mixture: need at least 20 points");
  opt.seed = seed;
  const MixtureData data(points);

  MixtureModel start;
  start.variant = variant;
  start.weights = {1.0};
  const TorusStats all = data.features().stats(data.base());
  const EstimatorOptions est = detail::component_options(variant, opt);
  start.components = {estimate(all, Method::MML, est).params_hat};
  EmResult incumbent = em_fit(data, start, opt);

  SearchResult out;
  auto record = [&](int it, const char* op) {
    const auto& m = incumbent.model.message;
    out.trace.push_back({it, static_cast<int>(incumbent.model.size()), op, m.first_part, m.second_part, m.total});
  };
  record(0, "initial");

  for (int it = 1; it <= opt.max_search_iterations; ++it) {
    std::optional<EmResult> best;
    const char* best_op = "";
    auto consider = [&](std::optional<EmResult> cand, const char* op) {
      if (cand && (!best || cand->model.message.total < best->model.message.total)) {
        best = std::move(cand);
        best_op = op;
      }
    };
    auto attempt = [&](auto&& fn, const char* op) {
      try {
        consider(fn(), op);
      } catch (const std::exception&) {
        // An infeasible perturbation is simply not a candidate.
      }
    };
    const std::size_t k = incumbent.model.size();
    std::vector<std::pair<std::size_t, std::size_t>> merged_pairs;
    for (std::size_t j = 0; j < k; ++j) {
      attempt([&] { return split(data, incumbent, j, opt); }, "split");
      if (k < 2) continue;
      attempt([&] { return std::optional<EmResult>(remove_component(data, incumbent, j, opt)); }, "delete");
      attempt(
          [&]() -> std::optional<EmResult> {
            const std::size_t i = merge_partner(incumbent.model, j, opt.series);
            const std::pair<std::size_t, std::size_t> pair{std::min(i, j), std::max(i, j)};
            if (std::find(merged_pairs.begin(), merged_pairs.end(), pair) != merged_pairs.end()) return std::nullopt;
            merged_pairs.emplace_back(pair);
            return merge(data, incumbent, j, opt);
          },
          "merge");
    }
    if (!best || !(best->model.message.total < incumbent.model.message.total)) break;
    incumbent = std::move(*best);
    record(it, best_op);
  }
  out.model = incumbent.model;
  return out;
}

}  // namespace bvm

#endif  // BVM_MIXTURE_HPP_
