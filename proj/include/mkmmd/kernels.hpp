#ifndef MKMMD_KERNELS_HPP
#define MKMMD_KERNELS_HPP

#include "mkmmd/mixture_weights.hpp"
#include "mkmmd/types.hpp"

#include <cmath>
#include <span>
#include <string>
#include <string_view>

namespace mkmmd {

enum class KernelFamily { gaussian, laplacian, anova };

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/**
 * Shift-invariant base kernel with bandwidth rho > 0:
 *   gaussian   exp(-|x-y|^2 / (2 rho^2))
 *   laplacian  exp(-|x-y| / rho)
 *   anova      prod_k exp(-(x_k-y_k)^2 / (2 rho^2))
 * All three are bounded by k(x, x) = 1.
 */
class BaseKernel {
 public:
  BaseKernel(KernelFamily family, double bandwidth) : family_(family), bandwidth_(bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw ConfigError("kernel bandwidth must be positive and finite");
  }

  /// gamma = 1 / (2 rho^2).
  static BaseKernel from_gamma(KernelFamily family, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("kernel gamma must be positive and finite");
    return BaseKernel(family, std::sqrt(0.5 / gamma));
  }

  KernelFamily family() const { return family_; }
  double bandwidth() const { return bandwidth_; }
  double gamma() const { return 0.5 / (bandwidth_ * bandwidth_); }
  /// sup |k|.
  static constexpr double bound() { return 1.0; }

  /// Kernel value from the squared distance between the two points.
  template <typename Scalar>
  Scalar from_squared_distance(Scalar sq) const {
    using std::exp;
    using std::sqrt;
    const Scalar rho = static_cast<Scalar>(bandwidth_);
    if (family_ == KernelFamily::laplacian) return exp(-sqrt(sq) / rho);
    return exp(-sq / (Scalar(2) * rho * rho));
  }

  friend bool operator==(const BaseKernel&, const BaseKernel&) = default;

 private:
  KernelFamily family_;
  double bandwidth_;
};

std::string describe(const BaseKernel& k);

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar eval_kernel(const BaseKernel& k, const Eigen::MatrixBase<DerivedX>& x,
                                      const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw std::invalid_argument("eval_kernel: dimension mismatch");
  if (k.family() == KernelFamily::anova) {
    using std::exp;
    const Scalar denom = Scalar(2) * static_cast<Scalar>(k.bandwidth() * k.bandwidth());
    Scalar prod(1);
    for (Index i = 0; i < x.size(); ++i) {
      const Scalar diff = x.derived().coeff(i) - y.derived().coeff(i);
      prod *= exp(-diff * diff / denom);
    }
    return prod;
  }
  return k.from_squared_distance<Scalar>((x.derived().reshaped() - y.derived().reshaped()).squaredNorm());
}

/// Exact pairwise squared distances between rows of A and rows of B.
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> squared_distances(const Eigen::MatrixBase<DerivedA>& A,
                                                    const Eigen::MatrixBase<DerivedB>& B) {
  using Scalar = typename DerivedA::Scalar;
  if (A.cols() != B.cols()) throw std::invalid_argument("squared_distances: dimension mismatch");
  Matrix<Scalar> sq = Matrix<Scalar>::Zero(A.rows(), B.rows());
  for (Index c = 0; c < A.cols(); ++c) {
    sq.array() += (A.col(c).replicate(1, B.rows()).rowwise() - B.col(c).transpose()).array().square();
  }
  return sq;
}

/// Applies the kernel profile to a matrix of squared distances.
template <typename Derived>
Matrix<typename Derived::Scalar> kernel_from_squared(const BaseKernel& k, const Eigen::MatrixBase<Derived>& sq) {
  using Scalar = typename Derived::Scalar;
  const Scalar rho = static_cast<Scalar>(k.bandwidth());
  if (k.family() == KernelFamily::laplacian) return (-sq.array().sqrt() / rho).exp().matrix();
  return (-sq.array() / (Scalar(2) * rho * rho)).exp().matrix();
}

/// Cross kernel matrix [k(a_i, b_j)].
template <typename DerivedA, typename DerivedB>
Matrix<typename DerivedA::Scalar> cross_gram(const BaseKernel& k, const Eigen::MatrixBase<DerivedA>& A,
                                             const Eigen::MatrixBase<DerivedB>& B) {
  return kernel_from_squared(k, squared_distances(A, B));
}

/// Symmetric Gram matrix; each off-diagonal entry is evaluated once and mirrored.
template <typename Derived>
Matrix<typename Derived::Scalar> gram_matrix(const BaseKernel& k, const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  const Index n = X.rows();
  Matrix<Scalar> K(n, n);
  for (Index j = 0; j < n; ++j) {
    K(j, j) = eval_kernel(k, X.row(j), X.row(j));
    for (Index i = 0; i < j; ++i) {
      K(i, j) = eval_kernel(k, X.row(i), X.row(j));
      K(j, i) = K(i, j);
    }
  }
  return K;
}

/// K^w = sum_l w_l K^l.
template <typename Derived>
Matrix<typename Derived::Scalar> mixture_gram(std::span<const BaseKernel> kernels, const MixtureWeights& w,
                                              const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  if (kernels.empty() || static_cast<Index>(kernels.size()) != w.size()) {
    throw std::invalid_argument("mixture_gram: kernel count and weight count differ");
  }
  Matrix<Scalar> K = Matrix<Scalar>::Zero(X.rows(), X.rows());
  for (std::size_t l = 0; l < kernels.size(); ++l) {
    if (w[static_cast<Index>(l)] == 0.0) continue;
    K += static_cast<Scalar>(w[static_cast<Index>(l)]) * gram_matrix(kernels[l], X);
  }
  return K;
}

/// Frobenius inner product <A, B> = Tr(A B^T).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar frobenius_inner(const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B) {
  return A.cwiseProduct(B).sum();
}

/// Empirical kernel alignment <K1,K2> / sqrt(<K1,K1><K2,K2>).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar alignment(const Eigen::MatrixBase<DerivedA>& K1, const Eigen::MatrixBase<DerivedB>& K2) {
  using std::sqrt;
  if (K1.rows() != K2.rows() || K1.cols() != K2.cols()) throw std::invalid_argument("alignment: dimension mismatch");
  const auto n11 = frobenius_inner(K1, K1);
  const auto n22 = frobenius_inner(K2, K2);
  if (n11 == 0 || n22 == 0) throw std::invalid_argument("alignment: zero-norm kernel matrix");
  return frobenius_inner(K1, K2) / sqrt(n11 * n22);
}

/// Alignment with the ideal label kernel y y^T: <K, y y^T> / (n |K|_F).
template <typename Derived>
typename Derived::Scalar target_alignment(const Eigen::MatrixBase<Derived>& K, const Labels& y) {
  using Scalar = typename Derived::Scalar;
  if (K.rows() != y.size() || K.cols() != y.size()) throw std::invalid_argument("target_alignment: dimension mismatch");
  const Vector<Scalar> yv = y.cast<Scalar>();
  const Scalar norm = K.norm();
  if (norm == Scalar(0)) throw std::invalid_argument("target_alignment: zero-norm kernel matrix");
  return yv.dot(K * yv) / (static_cast<Scalar>(y.size()) * norm);
}

}  // namespace mkmmd

#endif  // MKMMD_KERNELS_HPP
