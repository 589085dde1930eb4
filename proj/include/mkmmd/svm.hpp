#ifndef MKMMD_SVM_HPP
#define MKMMD_SVM_HPP

#include "mkmmd/data.hpp"
#include "mkmmd/rff.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace mkmmd {

enum class StepSchedule {
  constant,       // c
  inverse_sqrt,   // c / sqrt(t)
  inverse_linear  // c / (lambda t)
};

std::string_view to_string(StepSchedule s);
StepSchedule parse_step_schedule(std::string_view name);

struct TrainConfig {
  /// Ball parameter R; coefficients are kept in |beta|_2 <= R / sqrt(mD).
  double radius = 1.0;
  double lambda = 1.0;
  int epochs = 50;
  /// Samples per step; 0 means full batch (one deterministic step per epoch).
  Index batch_size = 0;
  StepSchedule schedule = StepSchedule::inverse_linear;
  double step = 1.0;
  std::uint64_t seed = 0;
  bool fit_offset = true;
  /// Called with the raw (projected) iterate after every step.
  std::function<void(const Eigen::VectorXd& beta, double offset)> on_step;
};

void validate(const TrainConfig& cfg);

/// R / sqrt(mD).
inline double ball_radius(double radius, Index kernel_count, Index draws_per_kernel) {
  return radius / std::sqrt(static_cast<double>(kernel_count * draws_per_kernel));
}

struct EpochRecord {
  int epoch = 0;
  double objective = 0.0;
  double train_accuracy = 0.0;
};

/// Coefficients of f(x) = beta^T phi^w(x) / sqrt(D) + offset on a fixed feature layout.
struct LinearSvm {
  Eigen::VectorXd beta;
  double offset = 0.0;
  Index draws_per_kernel = 1;
  Index kernel_count = 1;
  double radius = 1.0;
  double lambda = 1.0;
  int epochs = 0;
  std::uint64_t seed = 0;
  double final_objective = 0.0;
  std::vector<EpochRecord> history;

  double decision(const Eigen::Ref<const Eigen::VectorXd>& features) const {
    return beta.dot(features) / std::sqrt(static_cast<double>(draws_per_kernel)) + offset;
  }
  Eigen::VectorXd decisions(const FeatureMatrix& phi) const;
};

/// (1/n) sum_i [1 - y_i (beta^T Phi_i / sqrt(D) + b)]_+ + (lambda/2) |beta|^2.
double svm_objective(const FeatureMatrix& phi, const Labels& y, const Eigen::VectorXd& beta, double offset, double lambda);

struct Subgradient {
  Eigen::VectorXd beta;
  double offset = 0.0;
};

/// Subgradient of svm_objective; exact gradient wherever no margin sits on the hinge kink.
Subgradient svm_subgradient(const FeatureMatrix& phi, const Labels& y, const Eigen::VectorXd& beta, double offset, double lambda);

/**
 * Projected stochastic subgradient descent. Every step projects beta onto the
 * ball |beta| <= R/sqrt(mD); the offset is unconstrained and unregularized.
 * The returned coefficients are the running weighted average
 *   avg_t = (1 - 2/(t+1)) avg_{t-1} + 2/(t+1) iterate_t,
 * which stays inside the ball.
 */
LinearSvm train(const FeatureMatrix& phi, const Labels& y, const TrainConfig& cfg);

/// A trained model together with everything needed to featurize raw inputs.
struct SvmModel {
  FeatureBank bank;
  LinearSvm linear;
  std::optional<DatasetStats> standardization;
};

double decision_value(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
/// Decision values for every row of X.
Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& X);

/// sign(f), with f = 0 mapped to +1.
inline int sign_label(double f) { return f >= 0.0 ? 1 : -1; }
int predict(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Logistic of f, kept inside [1e-15, 1 - 1e-15].
double logistic(double f);
double soft_output(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

struct Metrics {
  double accuracy = 0.0;
  double error_rate = 0.0;
  double hinge_loss = 0.0;
  Index true_positive = 0;
  Index true_negative = 0;
  Index false_positive = 0;
  Index false_negative = 0;
};

Metrics metrics_from_decisions(const Eigen::VectorXd& decisions, const Labels& y);
Metrics evaluate(const SvmModel& model, const LabeledDataset& ds);

}  // namespace mkmmd

#endif  // MKMMD_SVM_HPP
