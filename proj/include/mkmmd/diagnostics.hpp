#ifndef MKMMD_DIAGNOSTICS_HPP
#define MKMMD_DIAGNOSTICS_HPP

#include "mkmmd/rff.hpp"

#include <ostream>
#include <vector>

namespace mkmmd {

/// Complexity upper bounds for the ball-constrained class over a fixed feature matrix.
struct ComplexityReport {
  Index n = 0;
  Index draws = 0;
  Index kernel_count = 0;
  double radius = 0.0;
  double frobenius_norm = 0.0;
  double spectral_norm = 0.0;
  /// Tr((Phi Phi^T)^2), the squared Frobenius norm of the Gram matrix.
  double gram_trace_squared = 0.0;
  /// (R / (n D sqrt m)) sqrt(pi/192) |||Phi|||_2 erfc(sqrt(192) |Phi|_F / |||Phi|||_2).
  double erfc_bound = 0.0;
  /// (R / (n D)) sqrt(pi/192) |||Phi|||_2 erfc(sqrt(192 D)), the simplified form.
  double erfc_bound_display = 0.0;
  /// (R / (n D sqrt m)) sqrt(23/44) |Phi|_F.
  double khintchine_bound = 0.0;
  /// Gaussian complexity bound.
  double gaussian_bound = 0.0;

  /// erfc_bound <= khintchine_bound.
  bool ordering_holds() const { return erfc_bound <= khintchine_bound; }
};

/// Throws DataError on a zero matrix.
ComplexityReport complexity_bounds(const FeatureMatrix& phi, double radius);

struct ConcentrationReport {
  Index draws = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> deviations;
  double max_deviation = 0.0;
  double mean_deviation = 0.0;
};

/**
 * Relative deviation |‖Phi‖_F^2 - D Tr(K^w)| / (D Tr(K^w)) of the mixture feature
 * matrix, one bank per seed.
 */
ConcentrationReport frobenius_concentration(const Eigen::MatrixXd& X, const std::vector<BaseKernel>& kernels,
                                            const MixtureWeights& w, Index draws, const std::vector<std::uint64_t>& seeds);

/// Relative deviation ||||Phi|||_2^2 - D |||K^w|||_2| / (D |||K^w|||_2) via dense symmetric eigensolves.
ConcentrationReport spectral_concentration(const Eigen::MatrixXd& X, const std::vector<BaseKernel>& kernels,
                                           const MixtureWeights& w, Index draws, const std::vector<std::uint64_t>& seeds);

inline constexpr Index kSpectralRowLimit = 2000;

/// Largest eigenvalue of a symmetric positive semidefinite matrix.
double spectral_norm_psd(const Eigen::MatrixXd& S);

/// Spectral scale sigma_p of a kernel's frequency law, sqrt(E|xi|^2); infinite for the Cauchy law.
double spectral_scale(const BaseKernel& k, Index dim);

/// min(1, 2^8 (sigma_p diam / eps)^2 exp(-D eps^2 / (4 (d + 2)))). Throws ConfigError for infinite sigma_p.
double pointwise_error_bound(double epsilon, Index draws, Index dim, double sigma_p, double diam);

/// Smallest D at which the unclamped pointwise bound drops to delta.
Index required_draws(double epsilon, double delta, Index dim, double sigma_p, double diam);

/// max over random row pairs of |kernel_approx - eval_kernel| with one shared frequency draw.
double empirical_sup_error(const BaseKernel& k, Index draws, const Eigen::MatrixXd& sample, Index pairs, std::uint64_t seed);

/// As above, for explicit (i, j) row pairs.
double empirical_sup_error(const BaseKernel& k, const FrequencyDraw& draw, const Eigen::MatrixXd& sample,
                           const std::vector<std::pair<Index, Index>>& pairs);

/// Columns: n,D,m,R,frobenius_norm,spectral_norm,gram_trace_squared,erfc_bound,erfc_bound_display,khintchine_bound,gaussian_bound.
void write_complexity_csv_header(std::ostream& out);
void write_complexity_csv_row(std::ostream& out, const ComplexityReport& r);

/// Columns: kind,D,seed,deviation.
void write_concentration_csv_header(std::ostream& out);
void write_concentration_csv_rows(std::ostream& out, std::string_view kind, const ConcentrationReport& r);

}  // namespace mkmmd

#endif  // MKMMD_DIAGNOSTICS_HPP
