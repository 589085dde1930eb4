#include "support.hpp"
#include "oracles.hpp"

#include "mkmmd/mmd.hpp"

#include <doctest.h>

#include <cmath>

using namespace mkmmd;

namespace {

Eigen::MatrixXd column(std::initializer_list<double> values) {
  Eigen::MatrixXd m(static_cast<Index>(values.size()), 1);
  Index i = 0;
  for (double v : values) m(i++, 0) = v;
  return m;
}

}  // namespace

TEST_SUITE("mmd") {

TEST_CASE("identical sets give zero") {
  const BaseKernel k(KernelFamily::gaussian, 1.0);
  const Eigen::MatrixXd s = column({0.0, 2.0});
  // Within-class sums skip the diagonal while the cross term keeps it.
  const MmdScore b = mmd_biased(k, s, s);
  CHECK(b.squared == doctest::Approx(std::exp(-2.0) - 1.0).epsilon(1e-12));
  CHECK(b.squared == doctest::Approx(oracle::mmd2_biased("gaussian", 1.0, s, s)).epsilon(1e-12));
  CHECK(b.value == 0.0);
  const Eigen::MatrixXd X = testing::normal_matrix(8, 3, 4);
  const MmdScore u = mmd_unbiased_balanced(k, X, X);
  CHECK(u.squared == 0.0);
  CHECK(u.value == 0.0);
  CHECK(u.estimator == Estimator::unbiased_balanced);
}

TEST_CASE("separated one-dimensional classes match hand computation") {
  const BaseKernel k(KernelFamily::gaussian, 1.0);
  const Eigen::MatrixXd pos = column({0.0, 1.0}), neg = column({10.0, 11.0});
  const double within = 2.0 * std::exp(-0.5);
  double cross = 0.0;
  for (double a : {0.0, 1.0})
    for (double b : {10.0, 11.0}) cross += std::exp(-0.5 * (a - b) * (a - b));
  const double expected = within - 2.0 * cross / 4.0;
  CHECK(mmd_biased(k, pos, neg).squared == doctest::Approx(expected).epsilon(1e-12));
  CHECK(mmd_biased(k, pos, neg).squared == doctest::Approx(oracle::mmd2_biased("gaussian", 1.0, pos, neg)).epsilon(1e-12));
}

TEST_CASE("small worked example") {
  const BaseKernel k(KernelFamily::gaussian, 1.0);
  const Eigen::MatrixXd pos = column({0.0, 1.0}), neg = column({3.0, 4.0});
  const MmdScore s = mmd_biased(k, pos, neg);
  const double cross = (2.0 * std::exp(-4.5) + std::exp(-2.0) + std::exp(-8.0)) / 4.0;
  CHECK(s.squared == doctest::Approx(2.0 * std::exp(-0.5) - 2.0 * cross).epsilon(1e-12));
  CHECK(s.value == doctest::Approx(std::sqrt(s.squared)));
  const MmdScore u = mmd_unbiased_balanced(k, pos, neg);
  CHECK(u.squared == doctest::Approx(1.0774).epsilon(1e-4));
  CHECK(u.value == doctest::Approx(1.0380).epsilon(1e-4));
}

TEST_CASE("estimators agree with the naive oracles") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto rng = CounterRng::stream(seed, 9);
    const Index np = 2 + static_cast<Index>(rng.below(28));
    const Index nn = 2 + static_cast<Index>(rng.below(28));
    const Eigen::MatrixXd pos = testing::normal_matrix(np, 3, seed);
    const Eigen::MatrixXd neg = testing::normal_matrix(nn, 3, seed + 1000, 1.5);
    for (const char* fam : {"gaussian", "laplacian", "anova"}) {
      const BaseKernel k(parse_kernel_family(fam), 1.2);
      CHECK(std::abs(mmd_biased(k, pos, neg).squared - oracle::mmd2_biased(fam, 1.2, pos, neg)) <= 1e-12);
      const Eigen::MatrixXd negb = neg.topRows(std::min(np, nn));
      const Eigen::MatrixXd posb = pos.topRows(std::min(np, nn));
      CHECK(std::abs(mmd_unbiased_balanced(k, posb, negb).squared - oracle::mmd2_unbiased(fam, 1.2, posb, negb)) <= 1e-12);
    }
  }
}

TEST_CASE("swapping the classes leaves the estimate unchanged") {
  const BaseKernel k(KernelFamily::laplacian, 0.8);
  const Eigen::MatrixXd a = testing::normal_matrix(9, 2, 1), b = testing::normal_matrix(9, 2, 2, 2.0);
  CHECK(mmd_biased(k, a, b).squared == doctest::Approx(mmd_biased(k, b, a).squared).epsilon(1e-14));
  CHECK(mmd_unbiased_balanced(k, a, b).squared == doctest::Approx(mmd_unbiased_balanced(k, b, a).squared).epsilon(1e-14));
}

TEST_CASE("biased estimate grows with separation") {
  const BaseKernel k(KernelFamily::gaussian, 1.0);
  double last = -1.0;
  for (double t = 0.0; t <= 6.0; t += 0.25) {
    const Eigen::MatrixXd pos = column({0.0, 0.0}), neg = column({t, t});
    const double v = mmd_biased(k, pos, neg).squared;
    CHECK(v >= last);
    last = v;
  }
}

TEST_CASE("input validation") {
  const BaseKernel k(KernelFamily::gaussian, 1.0);
  CHECK_THROWS_AS(mmd_biased(k, column({1.0}), column({1.0, 2.0})), DataError);
  CHECK_THROWS_AS(mmd_unbiased_balanced(k, column({1.0, 2.0}), column({1.0, 2.0, 3.0})), DataError);
  CHECK_NOTHROW(mmd_unbiased_balanced(k, column({1.0, 2.0}), column({1.0, 3.0})));
}

TEST_CASE("routing picks the estimator from the class sizes") {
  const BaseKernel k(KernelFamily::gaussian, 1.0);
  const Eigen::MatrixXd a = testing::normal_matrix(6, 2, 1), b = testing::normal_matrix(6, 2, 2);
  CHECK(mmd_score(k, a, b).estimator == Estimator::unbiased_balanced);
  CHECK(mmd_score(k, a, b, {.prefer_unbiased = false}).estimator == Estimator::biased);
  CHECK(mmd_score(k, a, b.topRows(5)).estimator == Estimator::biased);
  CHECK(mmd_score(k, a, b).squared == mmd_unbiased_balanced(k, a, b).squared);
}

TEST_CASE("precomputed distances reproduce the direct estimate") {
  const Eigen::MatrixXd a = testing::normal_matrix(10, 3, 1), b = testing::normal_matrix(10, 3, 2, 1.3);
  const ClassDistances dist = ClassDistances::compute(a, b);
  for (double rho : {0.1, 1.0, 10.0}) {
    for (KernelFamily f : {KernelFamily::gaussian, KernelFamily::laplacian}) {
      const BaseKernel k(f, rho);
      for (const MmdOptions& opt : {MmdOptions{}, MmdOptions{.prefer_unbiased = false}, MmdOptions{.pairing_seed = 7}}) {
        CHECK(mmd_score(k, dist, opt).squared == doctest::Approx(mmd_score(k, a, b, opt).squared).epsilon(1e-12));
      }
    }
  }
  const ClassDistances unbalanced = ClassDistances::compute(a, b.topRows(7));
  CHECK(mmd_score(BaseKernel(KernelFamily::gaussian, 1.0), unbalanced).estimator == Estimator::biased);
}

TEST_CASE("pairing seed changes only the pairing") {
  const BaseKernel k(KernelFamily::gaussian, 1.0);
  const Eigen::MatrixXd a = testing::normal_matrix(12, 2, 3), b = testing::normal_matrix(12, 2, 4);
  const double s1 = mmd_score(k, a, b, {.pairing_seed = 1}).squared;
  CHECK(s1 == mmd_score(k, a, b, {.pairing_seed = 1}).squared);
  // The within-class terms are pairing independent, so all pairings stay close.
  CHECK(std::abs(s1 - mmd_score(k, a, b).squared) <= 0.2);
}

TEST_CASE("mixing weights") {
  const std::vector<BaseKernel> one{BaseKernel(KernelFamily::gaussian, 1.0)};
  const Eigen::MatrixXd a = testing::normal_matrix(10, 2, 1), b = testing::normal_matrix(10, 2, 2, 3.0);
  const WeightResult single = mixing_weights(std::span(one), a, b);
  CHECK(single.weights[0] == 1.0);
  CHECK_FALSE(single.degenerate);

  const WeightResult w = weights_from_scores({make_score(4.0, Estimator::biased, 2, 2), make_score(1.0, Estimator::biased, 2, 2),
                                              make_score(1.0, Estimator::biased, 2, 2)});
  CHECK(w.weights[0] == doctest::Approx(0.5));
  CHECK(w.weights[1] == doctest::Approx(0.25));
  CHECK(w.weights[2] == doctest::Approx(0.25));

  const std::vector<BaseKernel> three{BaseKernel(KernelFamily::gaussian, 0.5), BaseKernel(KernelFamily::gaussian, 1.0),
                                      BaseKernel(KernelFamily::laplacian, 2.0)};
  const WeightResult same = mixing_weights(std::span(three), a, a);
  CHECK(same.degenerate);
  for (Index l = 0; l < 3; ++l) CHECK(same.weights[l] == doctest::Approx(1.0 / 3.0));

  const WeightResult mixed = mixing_weights(std::span(three), a, b);
  double total = 0.0;
  for (std::size_t l = 0; l < 3; ++l) total += mixed.scores[l].value;
  for (Index l = 0; l < 3; ++l) {
    CHECK(mixed.weights[l] >= 0.0);
    CHECK(mixed.weights[l] == doctest::Approx(mixed.scores[static_cast<std::size_t>(l)].value / total));
  }
  CHECK(std::abs(mixed.weights.vector().sum() - 1.0) <= 1e-15);
}

TEST_CASE("negative squared estimates clamp the value only") {
  const MmdScore s = make_score(-0.25, Estimator::unbiased_balanced, 3, 3);
  CHECK(s.squared == -0.25);
  CHECK(s.value == 0.0);
}

TEST_CASE("closed form") {
  const Eigen::Vector2d mu(0.3, -1.0);
  for (double var : {0.0, 0.5, 2.0})
    for (double rho : {0.5, 1.0, 3.0}) CHECK(gaussian_mmd_closed_form(mu, mu, var, rho) == 0.0);
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(1), q = Eigen::VectorXd::Ones(1);
  const double dirac = std::sqrt(2.0 * (1.0 - std::exp(-0.5)));
  CHECK(gaussian_mmd_closed_form(p, q, 0.0, 1.0) == doctest::Approx(dirac));
  CHECK(gaussian_mmd_closed_form(p, q, 0.0, 1.0, ClosedFormVariant::printed) == doctest::Approx(dirac));
}

TEST_CASE("closed form agrees with a Monte-Carlo expectation") {
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(1), q = Eigen::VectorXd::Ones(1);
  const MonteCarloEstimate mc = gaussian_mmd_squared_monte_carlo(p, q, 1.0, BaseKernel(KernelFamily::gaussian, 1.0), 200000, 3);
  const double closed = gaussian_mmd_squared_closed_form(p, q, 1.0, 1.0);
  CHECK(std::abs(mc.mean - closed) <= 4.0 * mc.standard_error);
}

TEST_CASE("null probe") {
  const Sampler normal = isotropic_gaussian_sampler(Eigen::VectorXd::Zero(2), 1.0);
  const BaseKernel k(KernelFamily::gaussian, 1.0);
  const NullSummary a = mmd_null_distribution_probe(normal, k, 100, 60, 5);
  const NullSummary b = mmd_null_distribution_probe(normal, k, 100, 60, 5);
  CHECK(a.mean_squared == b.mean_squared);
  CHECK(a.jarque_bera == b.jarque_bera);
  int consistent = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    consistent += mmd_null_distribution_probe(normal, k, 100, 60, seed).mean_consistent_with_zero;
  CHECK(consistent >= 18);
  CHECK_NOTHROW(mmd_null_distribution_probe(normal, k, 2, 10, 1));
}

TEST_CASE("convergence probe under the null shrinks") {
  const Sampler normal = isotropic_gaussian_sampler(Eigen::VectorXd::Zero(1), 1.0);
  const ConvergenceReport r = mmd_convergence_probe(normal, normal, BaseKernel(KernelFamily::gaussian, 1.0), {20, 320}, 20, 4, 0.0);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[1].mean_abs_error < r.rows[0].mean_abs_error);
}

TEST_CASE("loglog slope of a power law") {
  const std::vector<double> x{1, 2, 4, 8}, y{1, 0.5, 0.25, 0.125};
  CHECK(loglog_slope(x, y) == doctest::Approx(-1.0));
}

}  // TEST_SUITE
