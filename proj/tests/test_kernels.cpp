#include "support.hpp"
#include "oracles.hpp"

#include "mkmmd/kernels.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace mkmmd;

namespace {

const std::array<KernelFamily, 3> kFamilies{KernelFamily::gaussian, KernelFamily::laplacian, KernelFamily::anova};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("family names round trip") {
  for (KernelFamily f : kFamilies) CHECK(parse_kernel_family(to_string(f)) == f);
  CHECK_THROWS_AS(parse_kernel_family("polynomial"), ConfigError);
}

TEST_CASE("bandwidth and gamma") {
  const BaseKernel k = BaseKernel::from_gamma(KernelFamily::gaussian, 0.5);
  CHECK(k.bandwidth() == doctest::Approx(1.0));
  CHECK(BaseKernel(KernelFamily::gaussian, 2.0).gamma() == doctest::Approx(0.125));
  CHECK_THROWS_AS(BaseKernel(KernelFamily::gaussian, 0.0), ConfigError);
  CHECK_THROWS_AS(BaseKernel(KernelFamily::laplacian, -1.0), ConfigError);
  CHECK_THROWS_AS(BaseKernel::from_gamma(KernelFamily::gaussian, INFINITY), ConfigError);
}

TEST_CASE("scalar examples") {
  const BaseKernel g = BaseKernel::from_gamma(KernelFamily::gaussian, 0.5);
  CHECK(eval_kernel(g, Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  const BaseKernel l(KernelFamily::laplacian, 1.0);
  CHECK(eval_kernel(l, Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4)) == doctest::Approx(std::exp(-5.0)).epsilon(1e-15));
  for (KernelFamily f : kFamilies) {
    const Eigen::Vector3d x(0.3, -1.0, 2.0);
    CHECK(eval_kernel(BaseKernel(f, 0.7), x, x) == 1.0);
  }
}

TEST_CASE("matches the naive formulas and is symmetric, bounded, shift invariant") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Eigen::MatrixXd P = testing::normal_matrix(3, 4, seed);
    const Eigen::RowVectorXd x = P.row(0), y = P.row(1), shift = P.row(2);
    const double rho = 0.3 + 0.1 * static_cast<double>(seed);
    for (KernelFamily f : kFamilies) {
      const BaseKernel k(f, rho);
      const double v = eval_kernel(k, x, y);
      CHECK(v == doctest::Approx(oracle::kernel(std::string(to_string(f)), rho, x, y)).epsilon(1e-13));
      CHECK(v == eval_kernel(k, y, x));
      CHECK(v >= 0.0);
      CHECK(v <= BaseKernel::bound());
      const Eigen::RowVectorXd xs = x + shift, ys = y + shift;
      CHECK(eval_kernel(k, xs, ys) == doctest::Approx(v).epsilon(1e-12));
    }
  }
}

TEST_CASE("anova and gaussian agree") {
  const Eigen::MatrixXd X = testing::normal_matrix(6, 3, 2);
  const Eigen::MatrixXd a = gram_matrix(BaseKernel(KernelFamily::anova, 1.3), X);
  const Eigen::MatrixXd g = gram_matrix(BaseKernel(KernelFamily::gaussian, 1.3), X);
  CHECK((a - g).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("gram matrix examples") {
  const BaseKernel k(KernelFamily::gaussian, 1.0);
  const Eigen::MatrixXd one = gram_matrix(k, Eigen::MatrixXd::Constant(1, 2, 3.0));
  CHECK(one.rows() == 1);
  CHECK(one(0, 0) == 1.0);
  const Eigen::MatrixXd same = gram_matrix(k, Eigen::MatrixXd::Constant(2, 2, 0.5));
  CHECK(same == Eigen::MatrixXd::Ones(2, 2));
}

TEST_CASE("gram and cross gram agree with the naive double loop") {
  const Eigen::MatrixXd X = testing::normal_matrix(7, 3, 5);
  for (KernelFamily f : kFamilies) {
    const BaseKernel k(f, 0.9);
    const Eigen::MatrixXd K = gram_matrix(k, X);
    const Eigen::MatrixXd C = cross_gram(k, X, X);
    for (Index i = 0; i < X.rows(); ++i)
      for (Index j = 0; j < X.rows(); ++j) {
        const double ref = oracle::kernel(std::string(to_string(f)), 0.9, X.row(i), X.row(j));
        CHECK(std::abs(K(i, j) - ref) <= 1e-14);
        CHECK(std::abs(C(i, j) - ref) <= 1e-13);
      }
    CHECK(K == K.transpose());
  }
}

TEST_CASE("gram matrices are positive semidefinite") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd X = testing::normal_matrix(15, 2, seed);
    for (KernelFamily f : kFamilies) {
      const Eigen::MatrixXd K = gram_matrix(BaseKernel(f, 0.5 + 0.2 * static_cast<double>(seed)), X);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("mixture gram") {
  const Eigen::MatrixXd X = testing::normal_matrix(4, 2, 11);
  const std::vector<BaseKernel> ks{BaseKernel(KernelFamily::gaussian, 1.0), BaseKernel(KernelFamily::gaussian, 2.0)};
  const Eigen::MatrixXd K1 = gram_matrix(ks[0], X), K2 = gram_matrix(ks[1], X);
  const Eigen::MatrixXd M = mixture_gram(std::span(ks), MixtureWeights(Eigen::Vector2d(0.3, 0.7)), X);
  CHECK((M - (0.3 * K1 + 0.7 * K2)).cwiseAbs().maxCoeff() <= 1e-14);
  const std::vector<BaseKernel> single{ks[0]};
  CHECK(mixture_gram(std::span(single), MixtureWeights::uniform(1), X) == K1);
  const std::vector<BaseKernel> twice{ks[0], ks[0]};
  CHECK((mixture_gram(std::span(twice), MixtureWeights::uniform(2), X) - K1).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(mixture_gram(std::span(ks), MixtureWeights(Eigen::Vector2d(2, 2)), X).trace() == doctest::Approx(4.0));
  CHECK_THROWS(mixture_gram(std::span(ks), MixtureWeights::uniform(3), X));
}

TEST_CASE("mixture weights live on the simplex") {
  const MixtureWeights w(Eigen::Vector3d(2, 1, 1));
  CHECK(w[0] == 0.5);
  CHECK(w.vector().sum() == 1.0);
  CHECK(MixtureWeights::one_hot(3, 2)[2] == 1.0);
  CHECK_THROWS_AS(MixtureWeights(Eigen::Vector2d(1, -1)), ConfigError);
  CHECK_THROWS_AS(MixtureWeights(Eigen::Vector2d(0, 0)), ConfigError);
  CHECK_THROWS_AS(MixtureWeights(Eigen::VectorXd()), ConfigError);
}

TEST_CASE("alignment examples") {
  const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d J = Eigen::Matrix2d::Ones();
  CHECK(alignment(I, J) == doctest::Approx(1.0 / std::sqrt(2.0)));
  const Eigen::MatrixXd K = gram_matrix(BaseKernel(KernelFamily::gaussian, 1.0), testing::normal_matrix(5, 2, 1));
  CHECK(alignment(K, K) == doctest::Approx(1.0));
  CHECK(alignment(K, Eigen::MatrixXd(3.5 * K)) == doctest::Approx(1.0));
  CHECK_THROWS(alignment(K, Eigen::MatrixXd::Zero(5, 5)));
}

TEST_CASE("alignment lies in [-1, 1]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd A = testing::normal_matrix(6, 6, seed), B = testing::normal_matrix(6, 6, seed + 100);
    const double a = alignment(A, B);
    CHECK(std::abs(a) <= 1.0 + 1e-15);
  }
}

TEST_CASE("target alignment examples") {
  const Labels y = testing::alternating_labels(6);
  const Eigen::VectorXd yd = y.cast<double>();
  const Eigen::MatrixXd ideal = yd * yd.transpose();
  CHECK(target_alignment(ideal, y) == doctest::Approx(1.0));
  CHECK(target_alignment(Eigen::MatrixXd::Identity(6, 6), y) == doctest::Approx(1.0 / std::sqrt(6.0)));
  CHECK(target_alignment(ideal, y) == doctest::Approx(alignment(ideal, ideal)));
}

}  // TEST_SUITE
