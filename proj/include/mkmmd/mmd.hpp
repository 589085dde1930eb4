#ifndef MKMMD_MMD_HPP
#define MKMMD_MMD_HPP

#include "mkmmd/kernels.hpp"
#include "mkmmd/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace mkmmd {

enum class Estimator { biased, unbiased_balanced };

std::string_view to_string(Estimator e);

struct MmdScore {
  /// Signed estimate of the squared discrepancy.
  double squared = 0.0;
  /// sqrt(max(squared, 0)).
  double value = 0.0;
  Estimator estimator = Estimator::biased;
  Index n_plus = 0;
  Index n_minus = 0;
};

inline MmdScore make_score(double squared, Estimator estimator, Index n_plus, Index n_minus) {
  return {squared, std::sqrt(std::max(squared, 0.0)), estimator, n_plus, n_minus};
}

namespace detail {

inline constexpr Index kTileRows = 256;

/// sum_{i,j} k(a_i, b_j), accumulated tile by tile in row order.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar block_sum(const BaseKernel& k, const Eigen::MatrixBase<DerivedA>& A,
                                    const Eigen::MatrixBase<DerivedB>& B) {
  using Scalar = typename DerivedA::Scalar;
  Scalar total(0);
  for (Index start = 0; start < A.rows(); start += kTileRows) {
    const Index rows = std::min(kTileRows, A.rows() - start);
    total += cross_gram(k, A.middleRows(start, rows), B).sum();
  }
  return total;
}

/// sum_{i != j} k(a_i, a_j); the diagonal of every built-in kernel is exactly 1.
template <typename Derived>
typename Derived::Scalar offdiagonal_sum(const BaseKernel& k, const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  return block_sum(k, A, A) - static_cast<Scalar>(A.rows());
}

}  // namespace detail

/**
 * Three-term estimate: two within-class U-statistics minus twice the
 * cross-class sample average. Requires at least two samples per class.
 */
template <typename DerivedP, typename DerivedN>
MmdScore mmd_biased(const BaseKernel& k, const Eigen::MatrixBase<DerivedP>& pos, const Eigen::MatrixBase<DerivedN>& neg) {
  const Index np = pos.rows();
  const Index nn = neg.rows();
  if (np < 2 || nn < 2) throw DataError("MMD estimate needs at least two samples per class");
  if (pos.cols() != neg.cols()) throw std::invalid_argument("mmd_biased: dimension mismatch");
  const double within_pos = static_cast<double>(detail::offdiagonal_sum(k, pos)) / static_cast<double>(np * (np - 1));
  const double within_neg = static_cast<double>(detail::offdiagonal_sum(k, neg)) / static_cast<double>(nn * (nn - 1));
  const double cross = static_cast<double>(detail::block_sum(k, pos, neg)) / static_cast<double>(np * nn);
  return make_score(within_pos + within_neg - 2.0 * cross, Estimator::biased, np, nn);
}

/**
 * Single U-statistic over paired draws z_i = (pos_i, neg_i):
 *   h(z_i, z_j) = k(x_i,x_j) + k(y_i,y_j) - k(x_i,y_j) - k(x_j,y_i),
 * averaged over ordered pairs i != j. Requires equal class sizes.
 */
template <typename DerivedP, typename DerivedN>
MmdScore mmd_unbiased_balanced(const BaseKernel& k, const Eigen::MatrixBase<DerivedP>& pos,
                               const Eigen::MatrixBase<DerivedN>& neg) {
  const Index n = pos.rows();
  if (neg.rows() != n) throw DataError("unbiased MMD requires balanced classes; use the biased estimator");
  if (n < 2) throw DataError("MMD estimate needs at least two samples per class");
  if (pos.cols() != neg.cols()) throw std::invalid_argument("mmd_unbiased_balanced: dimension mismatch");
  double paired = 0.0;
  for (Index i = 0; i < n; ++i) paired += static_cast<double>(eval_kernel(k, pos.row(i), neg.row(i)));
  const double within = static_cast<double>(detail::offdiagonal_sum(k, pos)) + static_cast<double>(detail::offdiagonal_sum(k, neg));
  const double cross = static_cast<double>(detail::block_sum(k, pos, neg)) - paired;
  return make_score((within - 2.0 * cross) / static_cast<double>(n * (n - 1)), Estimator::unbiased_balanced, n, n);
}

struct MmdOptions {
  /// Balanced classes use the single U-statistic unless this is false.
  bool prefer_unbiased = true;
  /// When set, negatives are shuffled with this seed before pairing.
  std::optional<std::uint64_t> pairing_seed;
};

/// Estimator routing: unbiased for balanced classes (by default), biased otherwise.
MmdScore mmd_score(const BaseKernel& k, const Eigen::MatrixXd& pos, const Eigen::MatrixXd& neg, const MmdOptions& options = {});

/// Squared distances within and across the two class samples, reusable across bandwidths.
struct ClassDistances {
  Eigen::MatrixXd pos_pos;
  Eigen::MatrixXd neg_neg;
  Eigen::MatrixXd pos_neg;

  static ClassDistances compute(const Eigen::MatrixXd& pos, const Eigen::MatrixXd& neg);
};

/// mmd_score from precomputed distances; same routing and pairing.
MmdScore mmd_score(const BaseKernel& k, const ClassDistances& dist, const MmdOptions& options = {});

struct WeightResult {
  MixtureWeights weights;
  std::vector<MmdScore> scores;
  /// All scores were zero and the weights fell back to uniform.
  bool degenerate = false;
};

/// w_l = D_l / sum D_l over the MMD values (not squares) of each base kernel.
WeightResult mixing_weights(std::span<const BaseKernel> kernels, const Eigen::MatrixXd& pos, const Eigen::MatrixXd& neg,
                            const MmdOptions& options = {});

/// Normalizes nonnegative scores onto the simplex; all-zero input gives uniform weights.
WeightResult weights_from_scores(std::vector<MmdScore> scores);

/// Which sigma^2 coefficients to use in the Gaussian-measure closed form.
enum class ClosedFormVariant {
  /// 2 (rho^2/(rho^2+2 s^2))^{d/2} (1 - exp(-|dmu|^2/(2 rho^2 + 4 s^2))), from convolving the two Gaussians.
  convolution,
  /// 2 (rho^2/(rho^2+s^2))^{d/2} (1 - exp(-|dmu|^2/(2 rho^2 + s^2))), an alternative set of coefficients.
  printed,
};

/// Variant confirmed by the Monte-Carlo check in the test suite.
inline constexpr ClosedFormVariant kValidatedClosedForm = ClosedFormVariant::convolution;

/// Population squared MMD between N(muP, s^2 I) and N(muQ, s^2 I) under a Gaussian kernel of bandwidth rho.
double gaussian_mmd_squared_closed_form(const Eigen::VectorXd& mu_p, const Eigen::VectorXd& mu_q, double variance,
                                        double bandwidth, ClosedFormVariant variant = kValidatedClosedForm);

double gaussian_mmd_closed_form(const Eigen::VectorXd& mu_p, const Eigen::VectorXd& mu_q, double variance, double bandwidth,
                                ClosedFormVariant variant = kValidatedClosedForm);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Monte-Carlo estimate of E h(z, z') for the population squared MMD of two isotropic Gaussians.
MonteCarloEstimate gaussian_mmd_squared_monte_carlo(const Eigen::VectorXd& mu_p, const Eigen::VectorXd& mu_q, double variance,
                                                    const BaseKernel& k, Index draws, std::uint64_t seed);

/// Draws n rows from a distribution.
using Sampler = std::function<Eigen::MatrixXd(Index n, CounterRng& rng)>;

Sampler isotropic_gaussian_sampler(Eigen::VectorXd mean, double stddev);

struct ConvergenceRow {
  Index n = 0;
  double mean_abs_error = 0.0;
  double standard_error = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log(mean error) against log(n).
  double slope = 0.0;
};

/**
 * For each n, draws `trials` independent pairs of n-samples, scores them with
 * the routing rule and records |value - population_value|.
 */
ConvergenceReport mmd_convergence_probe(const Sampler& p, const Sampler& q, const BaseKernel& k, const std::vector<Index>& ns,
                                        Index trials, std::uint64_t seed, double population_value);

struct NullSummary {
  Index n0 = 0;
  Index trials = 0;
  double mean_squared = 0.0;
  double std_squared = 0.0;
  /// |mean| <= 3 std / sqrt(trials).
  bool mean_consistent_with_zero = false;
  /// Skewness, excess kurtosis and Jarque-Bera statistic of sqrt(n0) * squared estimates.
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double jarque_bera = 0.0;
};

/// Balanced-estimator draws under P = Q.
NullSummary mmd_null_distribution_probe(const Sampler& sampler, const BaseKernel& k, Index n0, Index trials, std::uint64_t seed);

/// Slope of the least-squares line through (log x, log y).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace mkmmd

#endif  // MKMMD_MMD_HPP
