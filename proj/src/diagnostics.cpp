#include "mkmmd/diagnostics.hpp"

#include "mkmmd/parallel.hpp"
#include "mkmmd/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace mkmmd {

double spectral_norm_psd(const Eigen::MatrixXd& S) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver failed");
  return std::max(0.0, solver.eigenvalues().maxCoeff());
}

ComplexityReport complexity_bounds(const FeatureMatrix& phi, double radius) {
  if (!(radius > 0.0)) throw ConfigError("radius must be positive");
  const Eigen::MatrixXd& P = phi.values;
  if (P.size() == 0 || P.cwiseAbs().maxCoeff() == 0.0) throw DataError("feature matrix is zero");
  ComplexityReport r;
  r.n = P.rows();
  r.draws = phi.draws_per_kernel;
  r.kernel_count = phi.kernel_count;
  r.radius = radius;
  const Eigen::MatrixXd gram = P * P.transpose();
  r.frobenius_norm = P.norm();
  r.spectral_norm = std::sqrt(spectral_norm_psd(gram));
  r.gram_trace_squared = gram.squaredNorm();

  const double n = static_cast<double>(r.n), D = static_cast<double>(r.draws), m = static_cast<double>(r.kernel_count);
  const double fro = r.frobenius_norm, spec = r.spectral_norm;
  const double c = std::sqrt(std::numbers::pi / 192.0);
  r.erfc_bound = radius / (n * D * std::sqrt(m)) * c * spec * std::erfc(std::sqrt(192.0) * fro / spec);
  r.erfc_bound_display = radius / (n * D) * c * spec * std::erfc(std::sqrt(192.0 * D));
  r.khintchine_bound = radius / (n * D * std::sqrt(m)) * std::sqrt(23.0 / 44.0) * fro;
  const double tr = r.gram_trace_squared;
  r.gaussian_bound = radius / (n * D) *
                     (2.0 * std::sqrt(std::numbers::pi * tr) / fro +
                      fro / (2.0 * spec * spec) * std::exp(-std::pow(fro, 4) / (4.0 * tr)));
  return r;
}

namespace {

template <typename Deviation>
ConcentrationReport concentration(const Eigen::MatrixXd& X, const std::vector<BaseKernel>& kernels, const MixtureWeights& w,
                                  Index draws, const std::vector<std::uint64_t>& seeds, Deviation deviation) {
  if (draws < 1) throw ConfigError("number of random features must be at least 1");
  if (kernels.empty() || static_cast<Index>(kernels.size()) != w.size()) throw ConfigError("kernels and weights disagree");
  ConcentrationReport r;
  r.draws = draws;
  r.seeds = seeds;
  r.deviations.assign(seeds.size(), 0.0);
  parallel_for(static_cast<Index>(seeds.size()), [&](Index s) {
    const FeatureBank bank = FeatureBank::generate(kernels, w, draws, X.cols(), seeds[static_cast<std::size_t>(s)]);
    r.deviations[static_cast<std::size_t>(s)] = deviation(build_feature_matrix(X, bank).values);
  });
  if (!r.deviations.empty()) {
    r.max_deviation = *std::max_element(r.deviations.begin(), r.deviations.end());
    double total = 0.0;
    for (double v : r.deviations) total += v;
    r.mean_deviation = total / static_cast<double>(r.deviations.size());
  }
  return r;
}

}  // namespace

ConcentrationReport frobenius_concentration(const Eigen::MatrixXd& X, const std::vector<BaseKernel>& kernels,
                                            const MixtureWeights& w, Index draws, const std::vector<std::uint64_t>& seeds) {
  const Eigen::MatrixXd K = mixture_gram(kernels, w, X);
  const double target = static_cast<double>(draws) * K.trace();
  return concentration(X, kernels, w, draws, seeds,
                       [&](const Eigen::MatrixXd& phi) { return std::abs(phi.squaredNorm() - target) / target; });
}

ConcentrationReport spectral_concentration(const Eigen::MatrixXd& X, const std::vector<BaseKernel>& kernels,
                                           const MixtureWeights& w, Index draws, const std::vector<std::uint64_t>& seeds) {
  if (X.rows() > kSpectralRowLimit) throw ConfigError("spectral concentration is limited to 2000 rows");
  const Eigen::MatrixXd K = mixture_gram(kernels, w, X);
  const double target = static_cast<double>(draws) * spectral_norm_psd(K);
  return concentration(X, kernels, w, draws, seeds, [&](const Eigen::MatrixXd& phi) {
    const Eigen::MatrixXd gram = phi * phi.transpose();
    return std::abs(spectral_norm_psd(gram) - target) / target;
  });
}

double spectral_scale(const BaseKernel& k, Index dim) { return std::sqrt(spectral_second_moment(k, dim)); }

double pointwise_error_bound(double epsilon, Index draws, Index dim, double sigma_p, double diam) {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!std::isfinite(sigma_p)) throw ConfigError("pointwise bound needs a finite spectral scale (unsupported for Cauchy frequencies)");
  if (draws < 1 || dim < 1 || sigma_p < 0.0 || diam < 0.0) throw ConfigError("invalid pointwise bound arguments");
  const double ratio = sigma_p * diam / epsilon;
  const double bound = 256.0 * ratio * ratio *
                       std::exp(-static_cast<double>(draws) * epsilon * epsilon / (4.0 * static_cast<double>(dim + 2)));
  return std::min(1.0, bound);
}

Index required_draws(double epsilon, double delta, Index dim, double sigma_p, double diam) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  pointwise_error_bound(epsilon, 1, dim, sigma_p, diam);
  const double ratio = sigma_p * diam / epsilon;
  const double lead = 256.0 * ratio * ratio;
  if (lead <= delta) return 1;
  const double D = 4.0 * static_cast<double>(dim + 2) / (epsilon * epsilon) * std::log(lead / delta);
  return std::max<Index>(1, static_cast<Index>(std::ceil(D)));
}

double empirical_sup_error(const BaseKernel& k, const FrequencyDraw& draw, const Eigen::MatrixXd& sample,
                           const std::vector<std::pair<Index, Index>>& pairs) {
  if (pairs.empty()) throw ConfigError("at least one pair is required");
  double worst = 0.0;
  for (const auto& [i, j] : pairs) {
    const double approx = kernel_approx(sample.row(i), sample.row(j), draw);
    worst = std::max(worst, std::abs(approx - eval_kernel(k, sample.row(i), sample.row(j))));
  }
  return worst;
}

double empirical_sup_error(const BaseKernel& k, Index draws, const Eigen::MatrixXd& sample, Index pairs, std::uint64_t seed) {
  if (pairs < 1) throw ConfigError("at least one pair is required");
  if (sample.rows() < 1) throw DataError("sample is empty");
  const FrequencyDraw draw = sample_frequencies(k, draws, sample.cols(), seed, 0);
  CounterRng rng = CounterRng::stream(seed, 1);
  std::vector<std::pair<Index, Index>> chosen;
  const auto rows = static_cast<std::uint64_t>(sample.rows());
  for (Index p = 0; p < pairs; ++p)
    chosen.emplace_back(static_cast<Index>(rng.below(rows)), static_cast<Index>(rng.below(rows)));
  return empirical_sup_error(k, draw, sample, chosen);
}

void write_complexity_csv_header(std::ostream& out) {
  out << "n,D,m,R,frobenius_norm,spectral_norm,gram_trace_squared,erfc_bound,erfc_bound_display,khintchine_bound,gaussian_bound\n";
}

void write_complexity_csv_row(std::ostream& out, const ComplexityReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                static_cast<long long>(r.n), static_cast<long long>(r.draws), static_cast<long long>(r.kernel_count), r.radius,
                r.frobenius_norm, r.spectral_norm, r.gram_trace_squared, r.erfc_bound, r.erfc_bound_display,
                r.khintchine_bound, r.gaussian_bound);
  out << buf;
}

void write_concentration_csv_header(std::ostream& out) { out << "kind,D,seed,deviation\n"; }

void write_concentration_csv_rows(std::ostream& out, std::string_view kind, const ConcentrationReport& r) {
  char buf[256];
  for (std::size_t i = 0; i < r.seeds.size(); ++i) {
    std::snprintf(buf, sizeof buf, ",%lld,%llu,%.17g\n", static_cast<long long>(r.draws),
                  static_cast<unsigned long long>(r.seeds[i]), r.deviations[i]);
    out << kind << buf;
  }
}

}  // namespace mkmmd
