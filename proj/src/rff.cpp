#include "mkmmd/rff.hpp"

#include "mkmmd/rng.hpp"

#include <limits>

namespace mkmmd {

namespace {

void draw_frequency(SpectralLaw law, double bandwidth, CounterRng& rng, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) {
  for (Index c = 0; c < out.size(); ++c) out(c) = rng.normal();
  if (law == SpectralLaw::gaussian) {
    out /= bandwidth;
  } else {
    // Multivariate t with one degree of freedom: Z / |W|.
    out /= bandwidth * std::abs(rng.normal());
  }
}

}  // namespace

SpectralLaw spectral_law(KernelFamily family) {
  return family == KernelFamily::laplacian ? SpectralLaw::cauchy : SpectralLaw::gaussian;
}

double spectral_second_moment(const BaseKernel& k, Index d) {
  if (spectral_law(k.family()) == SpectralLaw::cauchy) return std::numeric_limits<double>::infinity();
  return static_cast<double>(d) / (k.bandwidth() * k.bandwidth());
}

FrequencyDraw sample_frequencies(const BaseKernel& k, Index draws, Index dim, std::uint64_t seed, std::uint64_t stream) {
  if (draws < 1) throw ConfigError("number of random features must be at least 1");
  if (dim < 1) throw ConfigError("input dimension must be at least 1");
  FrequencyDraw out{Eigen::MatrixXd(draws, dim), Eigen::VectorXd(draws)};
  auto rng = CounterRng::stream(seed, stream);
  const auto law = spectral_law(k.family());
  for (Index j = 0; j < draws; ++j) {
    draw_frequency(law, k.bandwidth(), rng, out.frequencies.row(j));
    out.phases(j) = 2.0 * std::numbers::pi * rng.uniform();
  }
  return out;
}

FeatureBank FeatureBank::generate(std::vector<BaseKernel> kernels, MixtureWeights weights, Index draws_per_kernel,
                                  Index input_dim, std::uint64_t seed) {
  if (kernels.empty()) throw ConfigError("feature bank needs at least one kernel");
  if (static_cast<Index>(kernels.size()) != weights.size()) throw ConfigError("feature bank: kernel and weight counts differ");
  FeatureBank bank;
  bank.kernels_ = std::move(kernels);
  bank.weights_ = std::move(weights);
  bank.draws_ = draws_per_kernel;
  bank.dim_ = input_dim;
  bank.seed_ = seed;
  for (std::size_t l = 0; l < bank.kernels_.size(); ++l) {
    bank.blocks_.push_back(sample_frequencies(bank.kernels_[l], draws_per_kernel, input_dim, seed, l));
  }
  return bank;
}

Eigen::VectorXd FeatureBank::features(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != dim_) throw std::invalid_argument("feature bank: input dimension mismatch");
  Eigen::VectorXd out(feature_dim());
  for (Index l = 0; l < kernel_count(); ++l) {
    const auto& b = block(l);
    const double scale = std::sqrt(2.0 * weights_[l]);
    out.segment(l * draws_, draws_) = scale * ((b.frequencies * x + b.phases).array().cos()).matrix();
  }
  return out;
}

FeatureMatrix build_feature_matrix(const Eigen::MatrixXd& X, const FeatureBank& bank) {
  if (X.cols() != bank.input_dim()) throw std::invalid_argument("build_feature_matrix: dimension mismatch");
  const Index D = bank.draws_per_kernel();
  FeatureMatrix phi{Eigen::MatrixXd(X.rows(), bank.feature_dim()), D, bank.kernel_count()};
  for (Index l = 0; l < bank.kernel_count(); ++l) {
    const double w = bank.weights()[l];
    if (w == 0.0) {
      phi.values.middleCols(l * D, D).setZero();
      continue;
    }
    phi.values.middleCols(l * D, D) = std::sqrt(w) * random_features(X, bank.block(l));
  }
  return phi;
}

MixtureDraw sample_mixture_frequencies(std::span<const BaseKernel> kernels, const MixtureWeights& w, Index total_draws,
                                       Index dim, std::uint64_t seed) {
  if (kernels.empty() || static_cast<Index>(kernels.size()) != w.size()) {
    throw ConfigError("mixture sampler: kernel and weight counts differ");
  }
  if (total_draws < 1 || dim < 1) throw ConfigError("mixture sampler: draws and dimension must be positive");
  MixtureDraw out{{Eigen::MatrixXd(total_draws, dim), Eigen::VectorXd(total_draws)}, {}};
  out.components.reserve(static_cast<std::size_t>(total_draws));
  auto rng = CounterRng::stream(seed, 0x6d6978ULL);
  const Index m = w.size();
  for (Index j = 0; j < total_draws; ++j) {
    const double u = rng.uniform();
    Index comp = 0;
    double acc = 0.0;
    for (Index l = 0; l < m; ++l) {
      if (w[l] == 0.0) continue;
      acc += w[l];
      comp = l;
      if (u < acc) break;
    }
    out.components.push_back(comp);
    const auto& k = kernels[static_cast<std::size_t>(comp)];
    draw_frequency(spectral_law(k.family()), k.bandwidth(), rng, out.draw.frequencies.row(j));
    out.draw.phases(j) = 2.0 * std::numbers::pi * rng.uniform();
  }
  return out;
}

}  // namespace mkmmd
