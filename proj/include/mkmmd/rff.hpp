#ifndef MKMMD_RFF_HPP
#define MKMMD_RFF_HPP

#include "mkmmd/kernels.hpp"
#include "mkmmd/mixture_weights.hpp"

#include <cstdint>
#include <numbers>
#include <vector>

namespace mkmmd {

/// Bochner dual of a base kernel.
enum class SpectralLaw {
  /// N(0, I / rho^2); dual of the Gaussian and ANOVA kernels.
  gaussian,
  /// Multivariate Cauchy with scale 1/rho (each coordinate Cauchy(0, 1/rho)); dual of the Laplacian kernel.
  cauchy,
};

SpectralLaw spectral_law(KernelFamily family);

/// E|xi|^2 of the spectral law in dimension d; infinite for the Cauchy law.
double spectral_second_moment(const BaseKernel& k, Index d);

/// D frequencies (rows) and their phases.
struct FrequencyDraw {
  Eigen::MatrixXd frequencies;  // D x d
  Eigen::VectorXd phases;       // D, each in [0, 2 pi)

  Index size() const { return frequencies.rows(); }
};

/// Draws D frequencies from the kernel's spectral law and D uniform phases on stream (seed, stream).
FrequencyDraw sample_frequencies(const BaseKernel& k, Index draws, Index dim, std::uint64_t seed, std::uint64_t stream = 0);

/// sqrt(2) cos(<x, xi> + b).
template <typename DerivedX, typename DerivedF>
typename DerivedX::Scalar feature_map(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedF>& frequency,
                                      typename DerivedX::Scalar phase) {
  using Scalar = typename DerivedX::Scalar;
  using std::cos;
  if (x.size() != frequency.size()) throw std::invalid_argument("feature_map: dimension mismatch");
  const Scalar arg = x.derived().reshaped().dot(frequency.derived().reshaped().template cast<Scalar>()) + phase;
  return std::numbers::sqrt2_v<Scalar> * cos(arg);
}

/// Unweighted random features sqrt(2) cos(X xi^T + b), n x D.
template <typename Derived>
Matrix<typename Derived::Scalar> random_features(const Eigen::MatrixBase<Derived>& X, const FrequencyDraw& draw) {
  using Scalar = typename Derived::Scalar;
  if (X.cols() != draw.frequencies.cols()) throw std::invalid_argument("random_features: dimension mismatch");
  Matrix<Scalar> arg = X * draw.frequencies.transpose().template cast<Scalar>();
  arg.rowwise() += draw.phases.transpose().template cast<Scalar>();
  return (std::numbers::sqrt2_v<Scalar> * arg.array().cos()).matrix();
}

/// (1/D) sum_j phi(x; xi_j) phi(y; xi_j), an unbiased estimate of k(x, y).
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar kernel_approx(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y,
                                        const FrequencyDraw& draw) {
  using Scalar = typename DerivedX::Scalar;
  if (draw.size() < 1) throw std::invalid_argument("kernel_approx: empty frequency draw");
  Scalar total(0);
  for (Index j = 0; j < draw.size(); ++j) {
    total += feature_map(x, draw.frequencies.row(j), static_cast<Scalar>(draw.phases(j))) *
             feature_map(y, draw.frequencies.row(j), static_cast<Scalar>(draw.phases(j)));
  }
  return total / static_cast<Scalar>(draw.size());
}

/**
 * Frequencies for a set of m base kernels, D per kernel, on per-kernel RNG
 * streams derived from one seed. Together with the mixture weights this
 * defines the concatenated map
 *   phi^w(x) = (sqrt(w_1) phi^1(x, xi^1_1..D), ..., sqrt(w_m) phi^m(x, xi^m_1..D)).
 * Fully determined by (kernels, weights, D, d, seed).
 */
class FeatureBank {
 public:
  FeatureBank() = default;

  static FeatureBank generate(std::vector<BaseKernel> kernels, MixtureWeights weights, Index draws_per_kernel, Index input_dim,
                              std::uint64_t seed);

  const std::vector<BaseKernel>& kernels() const { return kernels_; }
  const MixtureWeights& weights() const { return weights_; }
  Index draws_per_kernel() const { return draws_; }
  Index input_dim() const { return dim_; }
  Index kernel_count() const { return static_cast<Index>(kernels_.size()); }
  Index feature_dim() const { return kernel_count() * draws_; }
  std::uint64_t seed() const { return seed_; }
  const FrequencyDraw& block(Index l) const { return blocks_[static_cast<std::size_t>(l)]; }

  /// phi^w(x), length mD.
  Eigen::VectorXd features(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  std::vector<BaseKernel> kernels_;
  MixtureWeights weights_;
  Index draws_ = 0;
  Index dim_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<FrequencyDraw> blocks_;
};

/// Phi = [phi^w(x_i)], n x mD, together with the shape parameters needed downstream.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  Index draws_per_kernel = 1;
  Index kernel_count = 1;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  /// Wraps plain features (D = cols, m = 1).
  static FeatureMatrix plain(Eigen::MatrixXd values) {
    const Index cols = values.cols();
    return {std::move(values), cols, 1};
  }
};

FeatureMatrix build_feature_matrix(const Eigen::MatrixXd& X, const FeatureBank& bank);

struct MixtureDraw {
  FrequencyDraw draw;
  /// Component index chosen for each frequency.
  std::vector<Index> components;
};

/// Draws from the frequency mixture sum_l w_l mu^l (features then enter unweighted).
MixtureDraw sample_mixture_frequencies(std::span<const BaseKernel> kernels, const MixtureWeights& w, Index total_draws,
                                       Index dim, std::uint64_t seed);

}  // namespace mkmmd

#endif  // MKMMD_RFF_HPP
