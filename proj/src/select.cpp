#include "mkmmd/select.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace mkmmd {

BandwidthGrid::BandwidthGrid(std::vector<double> gammas) : gammas_(std::move(gammas)) {
  if (gammas_.empty()) throw ConfigError("bandwidth grid must be nonempty");
  for (std::size_t i = 0; i < gammas_.size(); ++i) {
    if (!(gammas_[i] > 0.0) || !std::isfinite(gammas_[i])) throw ConfigError("bandwidth grid values must be positive and finite");
    if (i > 0 && !(gammas_[i] > gammas_[i - 1])) throw ConfigError("bandwidth grid must be strictly increasing");
  }
}

BandwidthGrid BandwidthGrid::default_grid() {
  std::vector<double> g;
  for (int e = -20; e <= 3; ++e) g.push_back(std::pow(10.0, e));
  return BandwidthGrid(std::move(g));
}

BandwidthGrid BandwidthGrid::log_spaced(double lo, double hi, Index count) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo)) throw ConfigError("invalid log-spaced grid");
  if (count == 1) return BandwidthGrid({lo});
  std::vector<double> g;
  const double a = std::log10(lo), b = std::log10(hi);
  for (Index i = 0; i < count; ++i) g.push_back(std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1)));
  return BandwidthGrid(std::move(g));
}

std::vector<BaseKernel> BandwidthGrid::kernels(KernelFamily family) const {
  std::vector<BaseKernel> out;
  out.reserve(gammas_.size());
  for (double g : gammas_) out.push_back(BaseKernel::from_gamma(family, g));
  return out;
}

namespace {

PipelineConfig single_kernel_config(const SelectionConfig& cfg, const BaseKernel& k) {
  PipelineConfig p;
  p.kernels = {k};
  p.draws = cfg.draws;
  p.train = cfg.train;
  p.mmd = cfg.mmd;
  p.standardize = false;
  p.seed = cfg.seed;
  return p;
}

double accuracy_on(const SvmModel& model, const LabeledDataset& ds) { return evaluate(model, ds).accuracy; }

/// First index of the maximum, so ties go to the smaller gamma.
Index first_argmax(const std::vector<double>& v) {
  Index best = 0;
  for (Index i = 1; i < static_cast<Index>(v.size()); ++i) {
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

CvSelection cv_bandwidth_select(const LabeledDataset& ds, const BandwidthGrid& grid, const SelectionConfig& cfg) {
  validate(ds);
  const auto folds = kfold_split(ds, cfg.folds, cfg.seed);
  std::vector<LabeledDataset> train_parts, val_parts;
  for (const auto& f : folds) {
    train_parts.push_back(subset(ds, f.train));
    val_parts.push_back(subset(ds, f.validation));
  }
  CvSelection out;
  for (const BaseKernel& k : grid.kernels(cfg.family)) {
    const PipelineConfig p = single_kernel_config(cfg, k);
    std::vector<double> acc;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const SvmModel model = fit_with_weights(train_parts[f], p, MixtureWeights::uniform(1));
      acc.push_back(accuracy_on(model, val_parts[f]));
    }
    const double mean = std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(acc.size());
    double ss = 0.0;
    for (double a : acc) ss += (a - mean) * (a - mean);
    out.mean_accuracy.push_back(mean);
    out.std_accuracy.push_back(acc.size() > 1 ? std::sqrt(ss / static_cast<double>(acc.size() - 1)) : 0.0);
  }
  out.best_index = first_argmax(out.mean_accuracy);
  out.best_gamma = grid[out.best_index];
  return out;
}

MmdSelection mmd_bandwidth_select(const LabeledDataset& ds, const BandwidthGrid& grid, const MmdOptions& options) {
  validate(ds);
  const auto split = split_by_label(ds);
  MmdSelection out;
  std::vector<double> values;
  const ClassDistances dist = ClassDistances::compute(split.positives, split.negatives);
  for (const BaseKernel& k : grid.kernels(KernelFamily::gaussian)) {
    out.scores.push_back(mmd_score(k, dist, options));
    values.push_back(out.scores.back().value);
  }
  out.degenerate = std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
  out.best_index = first_argmax(values);
  out.best_gamma = grid[out.best_index];
  return out;
}

SelectionReport compare_selection(const LabeledDataset& ds, const BandwidthGrid& grid, const SelectionConfig& cfg) {
  validate(ds);
  const Fold holdout = holdout_split(ds, cfg.test_fraction, cfg.seed);
  const LabeledDataset train_part = subset(ds, holdout.train);
  const LabeledDataset test_part = subset(ds, holdout.validation);

  auto start = std::chrono::steady_clock::now();
  const CvSelection cv = cv_bandwidth_select(train_part, grid, cfg);
  const double cv_seconds = seconds_since(start);
  start = std::chrono::steady_clock::now();
  const MmdSelection mmd = mmd_bandwidth_select(train_part, grid, cfg.mmd);
  const double mmd_seconds = seconds_since(start);

  SelectionReport r;
  r.gammas = grid.gammas();
  r.cv_mean = cv.mean_accuracy;
  r.cv_std = cv.std_accuracy;
  for (const auto& s : mmd.scores) r.mmd_score.push_back(s.value);
  r.cv_index = cv.best_index;
  r.mmd_index = mmd.best_index;
  r.agreement = std::abs(cv.best_index - mmd.best_index) <= 1;
  r.mmd_degenerate = mmd.degenerate;
  r.cv_seconds = cv_seconds;
  r.mmd_seconds = mmd_seconds;

  const auto kernels = grid.kernels(cfg.family);
  const auto single = [&](Index i) {
    return accuracy_on(fit_with_weights(train_part, single_kernel_config(cfg, kernels[static_cast<std::size_t>(i)]),
                                        MixtureWeights::uniform(1)),
                       test_part);
  };
  r.cv_model_test_accuracy = single(cv.best_index);
  r.mmd_model_test_accuracy = single(mmd.best_index);

  PipelineConfig mix;
  mix.kernels = kernels;
  mix.draws = cfg.draws;
  mix.train = cfg.train;
  mix.mmd = cfg.mmd;
  mix.standardize = false;
  mix.seed = cfg.seed;
  const PipelineResult fitted = fit_multiple_kernel_svm(train_part, mix);
  r.mixture_weights = fitted.weights.weights;
  r.mixture_test_accuracy = accuracy_on(fitted.model, test_part);
  return r;
}

void write_selection_csv(std::ostream& out, const SelectionReport& report) {
  out << "gamma,cv_mean,cv_std,mmd_score\n";
  char buf[128];
  for (std::size_t i = 0; i < report.gammas.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", report.gammas[i], report.cv_mean[i], report.cv_std[i],
                  report.mmd_score[i]);
    out << buf;
  }
}

Eigen::VectorXd project_capped_box(const Eigen::VectorXd& v, double cap) {
  if (!(cap >= 0.0)) throw ConfigError("projection cap must be nonnegative");
  auto clipped = [&](double tau) { return (v.array() - tau).cwiseMax(0.0).cwiseMin(1.0).matrix().eval(); };
  Eigen::VectorXd w = clipped(0.0);
  if (w.sum() <= cap) return w;
  // sum of clipped(tau) is continuous and nonincreasing in tau; it reaches 0 at tau = max(v).
  double lo = 0.0, hi = v.maxCoeff();
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (clipped(mid).sum() > cap) lo = mid; else hi = mid;
  }
  return clipped(hi);
}

RelaxedFeatureObjective::RelaxedFeatureObjective(Eigen::MatrixXd X, const Labels& y, std::vector<BaseKernel> kernels,
                                                 MixtureWeights weights, const FeatureSelectConfig& cfg)
    : X_(std::move(X)), y_(y.cast<double>()), kernels_(std::move(kernels)), weights_(std::move(weights)), mode_(cfg.mode) {
  const Index n = X_.rows();
  if (n < 2 || y_.size() != n) throw DataError("feature selection needs at least two labelled rows");
  if (kernels_.empty() || static_cast<Index>(kernels_.size()) != weights_.size())
    throw ConfigError("feature selection kernels and weights disagree");
  const double eps = cfg.epsilon > 0.0 ? cfg.epsilon : 0.001 / static_cast<double>(n);
  ridge_ = eps * static_cast<double>(n);
  if (mode_ == FeatureSelectMode::random_features) bank_ = FeatureBank::generate(kernels_, weights_, cfg.draws, X_.cols(), cfg.seed);
}

ObjectiveValue RelaxedFeatureObjective::evaluate(const Eigen::VectorXd& omega, bool with_gradient) const {
  if (omega.size() != X_.cols()) throw std::invalid_argument("feature weight dimension mismatch");
  return mode_ == FeatureSelectMode::exact_kernel ? evaluate_exact(omega, with_gradient)
                                                  : evaluate_random_features(omega, with_gradient);
}

namespace {

Eigen::MatrixXd center_rows(Eigen::MatrixXd A) {
  A.rowwise() -= A.colwise().mean();
  return A;
}

Eigen::VectorXd center(const Eigen::VectorXd& v) { return (v.array() - v.mean()).matrix(); }

}  // namespace

ObjectiveValue RelaxedFeatureObjective::evaluate_exact(const Eigen::VectorXd& omega, bool with_gradient) const {
  const Index n = X_.rows(), d = X_.cols();
  const Eigen::MatrixXd Z = X_ * omega.asDiagonal();
  const Eigen::MatrixXd sq = squared_distances(Z, Z);
  std::vector<Eigen::MatrixXd> grams;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t l = 0; l < kernels_.size(); ++l) {
    grams.push_back(kernel_from_squared(kernels_[l], sq));
    K += weights_[static_cast<Index>(l)] * grams.back();
  }
  // H K H as double centering.
  Eigen::MatrixXd G = center_rows(K);
  G = center_rows(G.transpose().eval()).transpose();
  G.diagonal().array() += ridge_;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  const Eigen::VectorXd a = ldlt.solve(y_);
  ObjectiveValue out;
  out.value = y_.dot(a);
  if (!with_gradient) return out;
  const Eigen::VectorXd u = center(a);
  // dJ = -u^T dK u.
  out.gradient = Eigen::VectorXd::Zero(d);
  const Eigen::MatrixXd uu = u * u.transpose();
  const Eigen::MatrixXd dist = sq.cwiseSqrt();
  for (std::size_t l = 0; l < kernels_.size(); ++l) {
    const BaseKernel& k = kernels_[l];
    const double rho2 = k.bandwidth() * k.bandwidth();
    Eigen::MatrixXd coeff = weights_[static_cast<Index>(l)] * uu.cwiseProduct(grams[l]);
    if (k.family() == KernelFamily::laplacian) {
      coeff = (coeff.array() / (k.bandwidth() * dist.array())).matrix();
      coeff = coeff.unaryExpr([](double v) { return std::isfinite(v) ? v : 0.0; });
    } else {
      coeff /= rho2;
    }
    // sum_ij C_ij (x_ic - x_jc)^2 = 2 (sum_i r_i x_ic^2 - x^T C x) for symmetric C with row sums r.
    const Eigen::VectorXd rows = coeff.rowwise().sum();
    for (Index c = 0; c < d; ++c) {
      const Eigen::VectorXd col = X_.col(c);
      const double s = 2.0 * (rows.dot(col.cwiseAbs2()) - col.dot(coeff * col));
      out.gradient(c) += omega(c) * s;
    }
  }
  return out;
}

ObjectiveValue RelaxedFeatureObjective::evaluate_random_features(const Eigen::VectorXd& omega, bool with_gradient) const {
  const Index n = X_.rows(), d = X_.cols();
  const Index D = bank_.draws_per_kernel(), m = bank_.kernel_count();
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(D));
  const Eigen::MatrixXd Z = X_ * omega.asDiagonal();
  Eigen::MatrixXd theta(n, m * D);
  Eigen::MatrixXd xi(m * D, d);
  Eigen::VectorXd scale(m * D);
  for (Index l = 0; l < m; ++l) {
    const auto& block = bank_.block(l);
    Eigen::MatrixXd arg = Z * block.frequencies.transpose();
    arg.rowwise() += block.phases.transpose();
    theta.middleCols(l * D, D) = arg;
    xi.middleRows(l * D, D) = block.frequencies;
    scale.segment(l * D, D).setConstant(std::sqrt(2.0 * bank_.weights()[l]) * inv_sqrt_d);
  }
  const Eigen::MatrixXd V = center_rows((theta.array().cos().matrix() * scale.asDiagonal()).eval());
  const Eigen::VectorXd s = V.transpose() * y_;
  Eigen::MatrixXd M = V.transpose() * V;
  M.diagonal().array() += ridge_;
  const Eigen::VectorXd z = Eigen::LDLT<Eigen::MatrixXd>(M).solve(s);
  ObjectiveValue out;
  out.value = (y_.squaredNorm() - s.dot(z)) / ridge_;
  if (!with_gradient) return out;
  const Eigen::VectorXd hr = center(y_ - V * z);
  // dV_ij/domega_k = -H [scale_j sin(theta_ij) x_ik xi_jk]; dJ = -(2/c) r^T dV z.
  const Eigen::MatrixXd P = hr.asDiagonal() * (theta.array().sin().matrix() * (scale.cwiseProduct(z)).asDiagonal());
  const Eigen::MatrixXd XtP = X_.transpose() * P;  // d x mD
  out.gradient = (2.0 / ridge_) * XtP.cwiseProduct(xi.transpose()).rowwise().sum();
  return out;
}

FeatureMask kernel_feature_select(const Eigen::MatrixXd& X, const Labels& y, std::vector<BaseKernel> kernels,
                                  MixtureWeights weights, const FeatureSelectConfig& cfg) {
  const Index d = X.cols();
  if (cfg.target < 1 || cfg.target > d) throw ConfigError("feature selection target must lie in [1, d]");
  if (cfg.steps < 0) throw ConfigError("feature selection steps must be nonnegative");
  const RelaxedFeatureObjective objective(X, y, std::move(kernels), std::move(weights), cfg);
  const double cap = static_cast<double>(cfg.target);
  Eigen::VectorXd omega = Eigen::VectorXd::Constant(d, cap / static_cast<double>(d));
  ObjectiveValue current = objective.evaluate(omega);
  FeatureMask out;
  out.initial_objective = current.value;
  double step = 0.0;
  int it = 0;
  for (; it < cfg.steps; ++it) {
    const double gmax = current.gradient.cwiseAbs().maxCoeff();
    if (!(gmax > 0.0) || !std::isfinite(gmax)) break;
    if (step == 0.0) step = 0.5 / gmax;
    bool accepted = false;
    Eigen::VectorXd trial;
    double trial_value = 0.0;
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      trial = project_capped_box(omega - step * current.gradient, cap);
      trial_value = objective.evaluate(trial, false).value;
      if (trial_value <= current.value - 1e-4 * current.gradient.dot(omega - trial)) {
        accepted = true;
        break;
      }
    }
    if (!accepted || (trial - omega).cwiseAbs().maxCoeff() < 1e-12) break;
    omega = trial;
    current = objective.evaluate(omega);
    step *= 2.0;
  }
  out.iterations = it;
  out.relaxed = omega;
  out.objective = current.value;
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return omega(a) > omega(b); });
  out.mask = Eigen::VectorXi::Zero(d);
  for (Index i = 0; i < cfg.target; ++i) out.mask(order[static_cast<std::size_t>(i)]) = 1;
  return out;
}

FeatureMask kernel_feature_select(const Eigen::MatrixXd& X, const Labels& y, const BaseKernel& kernel,
                                  const FeatureSelectConfig& cfg) {
  return kernel_feature_select(X, y, {kernel}, MixtureWeights::uniform(1), cfg);
}

}  // namespace mkmmd
