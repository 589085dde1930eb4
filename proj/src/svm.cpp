#include "mkmmd/svm.hpp"

#include "mkmmd/rng.hpp"

#include <numeric>

namespace mkmmd {

std::string_view to_string(StepSchedule s) {
  switch (s) {
    case StepSchedule::constant:
      return "constant";
    case StepSchedule::inverse_sqrt:
      return "inverse_sqrt";
    case StepSchedule::inverse_linear:
      return "inverse_linear";
  }
  return "unknown";
}

StepSchedule parse_step_schedule(std::string_view name) {
  if (name == "constant") return StepSchedule::constant;
  if (name == "inverse_sqrt") return StepSchedule::inverse_sqrt;
  if (name == "inverse_linear") return StepSchedule::inverse_linear;
  throw ConfigError("unknown step schedule '" + std::string(name) + "'");
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.radius > 0.0) || !std::isfinite(cfg.radius)) throw ConfigError("radius R must be positive");
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) throw ConfigError("lambda must be nonnegative");
  if (cfg.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (cfg.batch_size < 0) throw ConfigError("batch size must be nonnegative");
  if (!(cfg.step > 0.0)) throw ConfigError("step size must be positive");
  if (cfg.schedule == StepSchedule::inverse_linear && cfg.lambda == 0.0) {
    throw ConfigError("the inverse_linear schedule needs lambda > 0");
  }
}

Eigen::VectorXd LinearSvm::decisions(const FeatureMatrix& phi) const {
  if (phi.cols() != beta.size()) throw std::invalid_argument("decisions: feature dimension mismatch");
  return (phi.values * beta / std::sqrt(static_cast<double>(draws_per_kernel))).array() + offset;
}

double svm_objective(const FeatureMatrix& phi, const Labels& y, const Eigen::VectorXd& beta, double offset, double lambda) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(phi.draws_per_kernel));
  const Eigen::ArrayXd margins = y.cast<double>().array() * ((phi.values * beta).array() * scale + offset);
  const double hinge = (1.0 - margins).max(0.0).sum() / static_cast<double>(phi.rows());
  return hinge + 0.5 * lambda * beta.squaredNorm();
}

Subgradient svm_subgradient(const FeatureMatrix& phi, const Labels& y, const Eigen::VectorXd& beta, double offset,
                            double lambda) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(phi.draws_per_kernel));
  const Eigen::ArrayXd yd = y.cast<double>().array();
  const Eigen::ArrayXd margins = yd * ((phi.values * beta).array() * scale + offset);
  // d/df of the hinge term is -y_i on active samples.
  const Eigen::VectorXd coeff = ((margins < 1.0).cast<double>() * -yd / static_cast<double>(phi.rows())).matrix();
  return {phi.values.transpose() * coeff * scale + lambda * beta, coeff.sum()};
}

namespace {

double step_size(const TrainConfig& cfg, std::int64_t t) {
  switch (cfg.schedule) {
    case StepSchedule::constant:
      return cfg.step;
    case StepSchedule::inverse_sqrt:
      return cfg.step / std::sqrt(static_cast<double>(t));
    case StepSchedule::inverse_linear:
      return cfg.step / (cfg.lambda * static_cast<double>(t));
  }
  return cfg.step;
}

void project_onto_ball(Eigen::VectorXd& beta, double limit) {
  const double norm = beta.norm();
  if (norm > limit) beta *= limit / norm;
}

}  // namespace

LinearSvm train(const FeatureMatrix& phi, const Labels& y, const TrainConfig& cfg) {
  validate(cfg);
  const Index n = phi.rows();
  if (y.size() != n) throw std::invalid_argument("train: label count does not match feature rows");
  if (n == 0) throw DataError("train: empty training set");
  if (!phi.values.allFinite()) throw DataError("train: non-finite features");
  if ((y.array() == 1).count() == 0 || (y.array() == -1).count() == 0) throw DataError("train: both classes must be present");

  const double limit = ball_radius(cfg.radius, phi.kernel_count, phi.draws_per_kernel);
  const double scale = 1.0 / std::sqrt(static_cast<double>(phi.draws_per_kernel));
  // Every decision value lies in [-B, B] on the ball, so an optimal offset lies in [-(1+B), 1+B].
  const double offset_limit = 1.0 + limit * scale * phi.values.rowwise().norm().maxCoeff();
  const Index batch = cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);
  const Index steps_per_epoch = (n + batch - 1) / batch;
  const Eigen::ArrayXd yd = y.cast<double>().array();

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(phi.cols());
  double offset = 0.0;
  Eigen::VectorXd avg_beta = beta;
  double avg_offset = 0.0;

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  auto rng = CounterRng::stream(cfg.seed, 0x737667ULL);

  LinearSvm model;
  model.draws_per_kernel = phi.draws_per_kernel;
  model.kernel_count = phi.kernel_count;
  model.radius = cfg.radius;
  model.lambda = cfg.lambda;
  model.epochs = cfg.epochs;
  model.seed = cfg.seed;

  std::int64_t t = 0;
  Eigen::VectorXd grad(phi.cols());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (batch < n) rng.shuffle(order.begin(), order.end());
    for (Index s = 0; s < steps_per_epoch; ++s) {
      ++t;
      const Index begin = s * batch;
      const Index end = std::min(n, begin + batch);
      grad.setZero();
      double grad_offset = 0.0;
      for (Index r = begin; r < end; ++r) {
        const Index i = batch < n ? order[static_cast<std::size_t>(r)] : r;
        const double margin = yd(i) * (phi.values.row(i).dot(beta) * scale + offset);
        if (margin < 1.0) {
          grad.noalias() -= yd(i) * scale * phi.values.row(i).transpose();
          grad_offset -= yd(i);
        }
      }
      const double inv = 1.0 / static_cast<double>(end - begin);
      grad *= inv;
      grad_offset *= inv;
      grad += cfg.lambda * beta;

      const double eta = step_size(cfg, t);
      beta -= eta * grad;
      project_onto_ball(beta, limit);
      if (cfg.fit_offset) offset = std::clamp(offset - eta * grad_offset, -offset_limit, offset_limit);
      if (cfg.on_step) cfg.on_step(beta, offset);

      const double rho = 2.0 / static_cast<double>(t + 1);
      avg_beta = (1.0 - rho) * avg_beta + rho * beta;
      avg_offset = (1.0 - rho) * avg_offset + rho * offset;
    }
    const Eigen::ArrayXd f = (phi.values * avg_beta).array() * scale + avg_offset;
    const double accuracy = static_cast<double>(((f >= 0.0).cast<int>() * 2 - 1 == y.array()).count()) / static_cast<double>(n);
    model.history.push_back({epoch, svm_objective(phi, y, avg_beta, avg_offset, cfg.lambda), accuracy});
  }
  project_onto_ball(avg_beta, limit);
  model.beta = std::move(avg_beta);
  model.offset = avg_offset;
  model.final_objective = model.history.back().objective;
  return model;
}

namespace {

Eigen::VectorXd prepare_input(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.bank.input_dim()) throw std::invalid_argument("model input dimension mismatch");
  if (!model.standardization) return x;
  const auto& st = *model.standardization;
  Eigen::VectorXd z = x - st.mean;
  for (Index c = 0; c < z.size(); ++c) z(c) = st.stddev(c) > 0.0 ? z(c) / st.stddev(c) : 0.0;
  return z;
}

}  // namespace

double decision_value(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return model.linear.decision(model.bank.features(prepare_input(model, x)));
}

Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& X) {
  if (X.rows() == 0) return Eigen::VectorXd();
  if (X.cols() != model.bank.input_dim()) throw std::invalid_argument("model input dimension mismatch");
  const Eigen::MatrixXd Z = model.standardization ? apply_standardization(X, *model.standardization) : X;
  return model.linear.decisions(build_feature_matrix(Z, model.bank));
}

int predict(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) { return sign_label(decision_value(model, x)); }

double logistic(double f) {
  constexpr double lo = 1e-15;
  const double p = f >= 0.0 ? 1.0 / (1.0 + std::exp(-f)) : std::exp(f) / (1.0 + std::exp(f));
  return std::clamp(p, lo, 1.0 - lo);
}

double soft_output(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) { return logistic(decision_value(model, x)); }

Metrics metrics_from_decisions(const Eigen::VectorXd& decisions, const Labels& y) {
  if (decisions.size() != y.size()) throw std::invalid_argument("metrics: size mismatch");
  Metrics m;
  const Index n = y.size();
  double hinge = 0.0;
  for (Index i = 0; i < n; ++i) {
    const int pred = sign_label(decisions(i));
    if (y(i) > 0) {
      (pred > 0 ? m.true_positive : m.false_negative)++;
    } else {
      (pred < 0 ? m.true_negative : m.false_positive)++;
    }
    hinge += std::max(0.0, 1.0 - y(i) * decisions(i));
  }
  if (n > 0) {
    m.accuracy = static_cast<double>(m.true_positive + m.true_negative) / static_cast<double>(n);
    m.error_rate = 1.0 - m.accuracy;
    m.hinge_loss = hinge / static_cast<double>(n);
  }
  return m;
}

Metrics evaluate(const SvmModel& model, const LabeledDataset& ds) {
  return metrics_from_decisions(decision_values(model, ds.features), ds.labels);
}

}  // namespace mkmmd
