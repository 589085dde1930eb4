#include "support.hpp"

#include "mkmmd/rff.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

using namespace mkmmd;

namespace {

double quantile(std::vector<double> v, double q) {
  const auto k = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

}  // namespace

TEST_SUITE("rff") {

TEST_CASE("spectral laws") {
  CHECK(spectral_law(KernelFamily::gaussian) == SpectralLaw::gaussian);
  CHECK(spectral_law(KernelFamily::anova) == SpectralLaw::gaussian);
  CHECK(spectral_law(KernelFamily::laplacian) == SpectralLaw::cauchy);
  CHECK(spectral_second_moment(BaseKernel(KernelFamily::gaussian, 2.0), 3) == doctest::Approx(0.75));
  CHECK(std::isinf(spectral_second_moment(BaseKernel(KernelFamily::laplacian, 1.0), 3)));
}

TEST_CASE("gaussian frequencies have variance 1/rho^2") {
  for (double rho : {1.0, 0.5}) {
    const FrequencyDraw f = sample_frequencies(BaseKernel(KernelFamily::gaussian, rho), 100000, 2, 7);
    for (Index c = 0; c < 2; ++c) {
      const Eigen::VectorXd col = f.frequencies.col(c);
      const double var = (col.array() - col.mean()).square().sum() / static_cast<double>(col.size() - 1);
      CHECK(std::abs(var * rho * rho - 1.0) <= 0.05);
    }
  }
}

TEST_CASE("laplacian frequencies have Cauchy quantiles") {
  const FrequencyDraw f = sample_frequencies(BaseKernel(KernelFamily::laplacian, 1.0), 100000, 2, 7);
  for (Index c = 0; c < 2; ++c) {
    std::vector<double> v(f.frequencies.col(c).data(), f.frequencies.col(c).data() + f.size());
    CHECK(std::abs(quantile(v, 0.5)) <= 0.02);
    const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
    CHECK(std::abs(iqr - 2.0) <= 0.1);
  }
}

TEST_CASE("phases are uniform on [0, 2 pi)") {
  const FrequencyDraw f = sample_frequencies(BaseKernel(KernelFamily::gaussian, 1.0), 50000, 1, 3);
  CHECK(f.phases.minCoeff() >= 0.0);
  CHECK(f.phases.maxCoeff() < 2.0 * std::numbers::pi);
  CHECK(f.phases.mean() == doctest::Approx(std::numbers::pi).epsilon(0.01));
}

TEST_CASE("draws are deterministic per seed and stream") {
  const BaseKernel k(KernelFamily::laplacian, 1.5);
  const FrequencyDraw a = sample_frequencies(k, 64, 3, 11), b = sample_frequencies(k, 64, 3, 11);
  CHECK(a.frequencies == b.frequencies);
  CHECK(a.phases == b.phases);
  CHECK(a.frequencies != sample_frequencies(k, 64, 3, 12).frequencies);
  CHECK(a.frequencies != sample_frequencies(k, 64, 3, 11, 1).frequencies);
}

TEST_CASE("feature map examples") {
  const double s2 = std::sqrt(2.0);
  CHECK(feature_map(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 3), 0.0) == doctest::Approx(s2));
  CHECK(std::abs(feature_map(Eigen::Vector2d(1, 0), Eigen::Vector2d(std::numbers::pi / 4, 5), std::numbers::pi / 4)) <= 1e-12);
  CHECK(feature_map(Eigen::Vector2d(1, 0), Eigen::Vector2d(std::numbers::pi, 0), 0.0) == doctest::Approx(-s2));
}

TEST_CASE("a single draw gives the product of two cosines") {
  const FrequencyDraw f = sample_frequencies(BaseKernel(KernelFamily::gaussian, 1.0), 1, 2, 5);
  const Eigen::Vector2d x(0.2, -0.4), y(1.0, 0.3);
  const double ax = x.dot(f.frequencies.row(0).transpose()) + f.phases(0);
  const double ay = y.dot(f.frequencies.row(0).transpose()) + f.phases(0);
  CHECK(kernel_approx(x, y, f) == doctest::Approx(2.0 * std::cos(ax) * std::cos(ay)).epsilon(1e-14));
}

TEST_CASE("kernel approximation at x = y") {
  const FrequencyDraw f = sample_frequencies(BaseKernel(KernelFamily::gaussian, 1.0), 4096, 2, 1);
  const Eigen::Vector2d x(0.5, 0.5);
  CHECK(std::abs(kernel_approx(x, x, f) - 1.0) <= 0.05);
}

TEST_CASE("kernel approximation is unbiased") {
  for (KernelFamily fam : {KernelFamily::gaussian, KernelFamily::laplacian}) {
    const BaseKernel k(fam, 1.0);
    const Eigen::Vector2d x(0.1, 0.4), y(0.8, -0.2);
    std::vector<double> diff;
    for (std::uint64_t s = 0; s < 100; ++s) diff.push_back(kernel_approx(x, y, sample_frequencies(k, 64, 2, s)) - eval_kernel(k, x, y));
    const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / 100.0;
    double var = 0.0;
    for (double d : diff) var += (d - mean) * (d - mean);
    const double sd = std::sqrt(var / 99.0);
    CHECK(std::abs(mean) <= 3.0 * sd / 10.0);
  }
}

TEST_CASE("feature bank layout and weighting") {
  const std::vector<BaseKernel> ks{BaseKernel(KernelFamily::gaussian, 1.0), BaseKernel(KernelFamily::laplacian, 2.0)};
  const FeatureBank bank = FeatureBank::generate(ks, MixtureWeights(Eigen::Vector2d(0.25, 0.75)), 16, 3, 9);
  CHECK(bank.feature_dim() == 32);
  CHECK(bank.kernel_count() == 2);
  const Eigen::MatrixXd X = testing::normal_matrix(5, 3, 1);
  const FeatureMatrix phi = build_feature_matrix(X, bank);
  CHECK(phi.rows() == 5);
  CHECK(phi.cols() == 32);
  CHECK(phi.draws_per_kernel == 16);
  CHECK(phi.kernel_count == 2);
  const Eigen::MatrixXd block0 = random_features(X, bank.block(0)) * 0.5;
  CHECK((phi.values.leftCols(16) - block0).cwiseAbs().maxCoeff() <= 1e-14);
  const Eigen::VectorXd row = bank.features(X.row(2).transpose());
  CHECK((row.transpose() - phi.values.row(2)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(phi.values.cwiseAbs().maxCoeff() <= std::sqrt(2.0 * 0.75) + 1e-15);
  const FeatureBank again = FeatureBank::generate(ks, MixtureWeights(Eigen::Vector2d(0.25, 0.75)), 16, 3, 9);
  CHECK(build_feature_matrix(X, again).values == phi.values);
}

TEST_CASE("single kernel bank is the plain feature matrix") {
  const std::vector<BaseKernel> ks{BaseKernel(KernelFamily::gaussian, 1.0)};
  const FeatureBank bank = FeatureBank::generate(ks, MixtureWeights::uniform(1), 32, 2, 4);
  const FeatureMatrix phi = build_feature_matrix(testing::normal_matrix(6, 2, 2), bank);
  CHECK(phi.values.cwiseAbs().maxCoeff() <= std::sqrt(2.0) + 1e-15);
}

TEST_CASE("zero-weight blocks vanish") {
  const std::vector<BaseKernel> ks{BaseKernel(KernelFamily::gaussian, 1.0), BaseKernel(KernelFamily::gaussian, 3.0)};
  const FeatureBank bank = FeatureBank::generate(ks, MixtureWeights(Eigen::Vector2d(1, 0)), 8, 2, 4);
  const FeatureMatrix phi = build_feature_matrix(testing::normal_matrix(6, 2, 2), bank);
  CHECK(phi.values.rightCols(8).isZero(0.0));
  CHECK_FALSE(phi.values.leftCols(8).isZero(0.0));
}

TEST_CASE("scaled feature products approximate the mixture gram") {
  const std::vector<BaseKernel> ks{BaseKernel(KernelFamily::gaussian, 1.0), BaseKernel(KernelFamily::laplacian, 2.0)};
  const MixtureWeights w(Eigen::Vector2d(0.4, 0.6));
  const Eigen::MatrixXd X = testing::normal_matrix(20, 2, 3, 0.5);
  const FeatureMatrix phi = build_feature_matrix(X, FeatureBank::generate(ks, w, 4096, 2, 5));
  const Eigen::MatrixXd approx = phi.values * phi.values.transpose() / 4096.0;
  CHECK((approx - mixture_gram(std::span(ks), w, X)).cwiseAbs().maxCoeff() <= 0.1);
}

TEST_CASE("mixture frequency sampling") {
  const std::vector<BaseKernel> one{BaseKernel(KernelFamily::gaussian, 1.0)};
  const MixtureDraw single = sample_mixture_frequencies(std::span(one), MixtureWeights::uniform(1), 200, 2, 3);
  CHECK(std::all_of(single.components.begin(), single.components.end(), [](Index c) { return c == 0; }));

  const std::vector<BaseKernel> two{BaseKernel(KernelFamily::gaussian, 1.0), BaseKernel(KernelFamily::gaussian, 0.01)};
  const MixtureDraw first = sample_mixture_frequencies(std::span(two), MixtureWeights(Eigen::Vector2d(1, 0)), 500, 1, 3);
  CHECK(std::all_of(first.components.begin(), first.components.end(), [](Index c) { return c == 0; }));
  CHECK(first.draw.frequencies.cwiseAbs().maxCoeff() < 10.0);

  const std::vector<BaseKernel> three{BaseKernel(KernelFamily::gaussian, 1.0), BaseKernel(KernelFamily::gaussian, 2.0),
                                      BaseKernel(KernelFamily::laplacian, 1.0)};
  const Eigen::Vector3d p(0.2, 0.3, 0.5);
  const Index n = 100000;
  const MixtureDraw mix = sample_mixture_frequencies(std::span(three), MixtureWeights(p), n, 2, 8);
  REQUIRE(static_cast<Index>(mix.components.size()) == n);
  for (Index l = 0; l < 3; ++l) {
    const double count = static_cast<double>(std::count(mix.components.begin(), mix.components.end(), l));
    const double expected = static_cast<double>(n) * p(l);
    CHECK(std::abs(count - expected) <= 3.0 * std::sqrt(expected * (1.0 - p(l))));
  }
}

}  // TEST_SUITE
