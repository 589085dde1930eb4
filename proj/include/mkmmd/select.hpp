#ifndef MKMMD_SELECT_HPP
#define MKMMD_SELECT_HPP

#include "mkmmd/pipeline.hpp"

#include <ostream>

namespace mkmmd {

/// Candidate RBF bandwidths gamma, strictly increasing and positive.
class BandwidthGrid {
 public:
  explicit BandwidthGrid(std::vector<double> gammas);

  /// 10^-20, 10^-19, ..., 10^3.
  static BandwidthGrid default_grid();
  /// `count` log-spaced values from lo to hi inclusive.
  static BandwidthGrid log_spaced(double lo, double hi, Index count);

  const std::vector<double>& gammas() const { return gammas_; }
  Index size() const { return static_cast<Index>(gammas_.size()); }
  double operator[](Index i) const { return gammas_[static_cast<std::size_t>(i)]; }
  std::vector<BaseKernel> kernels(KernelFamily family = KernelFamily::gaussian) const;

 private:
  std::vector<double> gammas_;
};

struct SelectionConfig {
  int folds = 5;
  /// Random features per kernel for every trained model.
  Index draws = 256;
  TrainConfig train;
  KernelFamily family = KernelFamily::gaussian;
  MmdOptions mmd;
  /// Held-out share used by compare_selection for final test accuracies.
  double test_fraction = 0.25;
  std::uint64_t seed = 0;
};

struct CvSelection {
  Index best_index = 0;
  double best_gamma = 0.0;
  std::vector<double> mean_accuracy;
  std::vector<double> std_accuracy;
};

/// k-fold CV accuracy of a single-kernel RFF SVM per gamma; argmax with ties toward smaller gamma.
CvSelection cv_bandwidth_select(const LabeledDataset& ds, const BandwidthGrid& grid, const SelectionConfig& cfg);

struct MmdSelection {
  Index best_index = 0;
  double best_gamma = 0.0;
  std::vector<MmdScore> scores;
  /// Every score was zero.
  bool degenerate = false;
};

/// Classifier-free selection: argmax of the per-gamma MMD value between the two classes.
MmdSelection mmd_bandwidth_select(const LabeledDataset& ds, const BandwidthGrid& grid, const MmdOptions& options = {});

struct SelectionReport {
  std::vector<double> gammas;
  std::vector<double> cv_mean;
  std::vector<double> cv_std;
  std::vector<double> mmd_score;
  Index cv_index = 0;
  Index mmd_index = 0;
  /// Selected indices differ by at most one grid step.
  bool agreement = false;
  bool mmd_degenerate = false;
  MixtureWeights mixture_weights;
  double cv_model_test_accuracy = 0.0;
  double mmd_model_test_accuracy = 0.0;
  double mixture_test_accuracy = 0.0;
  double cv_seconds = 0.0;
  double mmd_seconds = 0.0;
};

/**
 * Runs both selectors on a training split, then fits single-kernel models at
 * each selected gamma and the MMD-weighted mixture over the whole grid, and
 * scores all three on the held-out split.
 */
SelectionReport compare_selection(const LabeledDataset& ds, const BandwidthGrid& grid, const SelectionConfig& cfg);

/// Columns gamma,cv_mean,cv_std,mmd_score.
void write_selection_csv(std::ostream& out, const SelectionReport& report);

enum class FeatureSelectMode { exact_kernel, random_features };

struct FeatureSelectConfig {
  /// Number of features to keep.
  Index target = 1;
  /// Ridge epsilon; the added diagonal is epsilon * n. 0 selects 0.001 / n.
  double epsilon = 0.0;
  int steps = 200;
  /// Random features per kernel in random_features mode.
  Index draws = 256;
  FeatureSelectMode mode = FeatureSelectMode::random_features;
  std::uint64_t seed = 0;
};

struct ObjectiveValue {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

/**
 * Relaxed selection objective y^T (G_w + c I)^{-1} y over feature weights
 * w in [0,1]^d, where G_w = H K(w . X) H is the centered Gram matrix on
 * masked inputs and c = epsilon * n. In random_features mode the inverse is
 * replaced by (1/c)(I - V (V^T V + c I)^{-1} V^T) with V = H Phi(w . X) / sqrt(D),
 * the frequencies being drawn once and held fixed.
 */
class RelaxedFeatureObjective {
 public:
  RelaxedFeatureObjective(Eigen::MatrixXd X, const Labels& y, std::vector<BaseKernel> kernels, MixtureWeights weights,
                          const FeatureSelectConfig& cfg);

  ObjectiveValue evaluate(const Eigen::VectorXd& omega, bool with_gradient = true) const;
  double ridge() const { return ridge_; }
  Index dim() const { return X_.cols(); }

 private:
  ObjectiveValue evaluate_exact(const Eigen::VectorXd& omega, bool with_gradient) const;
  ObjectiveValue evaluate_random_features(const Eigen::VectorXd& omega, bool with_gradient) const;

  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  std::vector<BaseKernel> kernels_;
  MixtureWeights weights_;
  FeatureSelectMode mode_;
  double ridge_;
  FeatureBank bank_;
};

/// Euclidean projection onto {w : 0 <= w_i <= 1, sum w <= cap}.
Eigen::VectorXd project_capped_box(const Eigen::VectorXd& v, double cap);

struct FeatureMask {
  Eigen::VectorXi mask;
  Eigen::VectorXd relaxed;
  double objective = 0.0;
  double initial_objective = 0.0;
  int iterations = 0;
};

/// Projected gradient descent from the uniform point (target/d) 1, then keeps the `target` largest weights.
FeatureMask kernel_feature_select(const Eigen::MatrixXd& X, const Labels& y, std::vector<BaseKernel> kernels,
                                  MixtureWeights weights, const FeatureSelectConfig& cfg);
FeatureMask kernel_feature_select(const Eigen::MatrixXd& X, const Labels& y, const BaseKernel& kernel,
                                  const FeatureSelectConfig& cfg);

}  // namespace mkmmd

#endif  // MKMMD_SELECT_HPP
