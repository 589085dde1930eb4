#include "mkmmd/mmd.hpp"

#include "mkmmd/parallel.hpp"

#include <algorithm>
#include <numeric>

namespace mkmmd {

std::string_view to_string(Estimator e) {
  return e == Estimator::biased ? "biased" : "unbiased_balanced";
}

MmdScore mmd_score(const BaseKernel& k, const Eigen::MatrixXd& pos, const Eigen::MatrixXd& neg, const MmdOptions& options) {
  if (!options.prefer_unbiased || pos.rows() != neg.rows()) return mmd_biased(k, pos, neg);
  if (!options.pairing_seed) return mmd_unbiased_balanced(k, pos, neg);
  std::vector<Index> order(static_cast<std::size_t>(neg.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  auto rng = CounterRng::stream(*options.pairing_seed, 0x70616972ULL);
  rng.shuffle(order.begin(), order.end());
  return mmd_unbiased_balanced(k, pos, neg(order, Eigen::all));
}

ClassDistances ClassDistances::compute(const Eigen::MatrixXd& pos, const Eigen::MatrixXd& neg) {
  if (pos.cols() != neg.cols()) throw std::invalid_argument("class samples differ in dimension");
  return {squared_distances(pos, pos), squared_distances(neg, neg), squared_distances(pos, neg)};
}

MmdScore mmd_score(const BaseKernel& k, const ClassDistances& dist, const MmdOptions& options) {
  const Index np = dist.pos_pos.rows(), nn = dist.neg_neg.rows();
  if (np < 2 || nn < 2) throw DataError("MMD estimate needs at least two samples per class");
  // Diagonals of the within-class blocks are exactly k(x, x) = 1.
  const double within_pos = kernel_from_squared(k, dist.pos_pos).sum() - static_cast<double>(np);
  const double within_neg = kernel_from_squared(k, dist.neg_neg).sum() - static_cast<double>(nn);
  const Eigen::MatrixXd cross_k = kernel_from_squared(k, dist.pos_neg);
  const double cross = cross_k.sum();
  if (!options.prefer_unbiased || np != nn) {
    const double sq = within_pos / static_cast<double>(np * (np - 1)) + within_neg / static_cast<double>(nn * (nn - 1)) -
                      2.0 * cross / static_cast<double>(np * nn);
    return make_score(sq, Estimator::biased, np, nn);
  }
  std::vector<Index> order(static_cast<std::size_t>(nn));
  std::iota(order.begin(), order.end(), Index{0});
  if (options.pairing_seed) {
    auto rng = CounterRng::stream(*options.pairing_seed, 0x70616972ULL);
    rng.shuffle(order.begin(), order.end());
  }
  double paired = 0.0;
  for (Index i = 0; i < np; ++i) paired += cross_k(i, order[static_cast<std::size_t>(i)]);
  const double sq = (within_pos + within_neg - 2.0 * (cross - paired)) / static_cast<double>(np * (np - 1));
  return make_score(sq, Estimator::unbiased_balanced, np, nn);
}

WeightResult weights_from_scores(std::vector<MmdScore> scores) {
  const auto m = static_cast<Index>(scores.size());
  if (m == 0) throw ConfigError("at least one base kernel is required");
  Eigen::VectorXd values(m);
  for (Index l = 0; l < m; ++l) values(l) = scores[static_cast<std::size_t>(l)].value;
  WeightResult result;
  result.scores = std::move(scores);
  if (values.sum() > 0.0) {
    result.weights = MixtureWeights(values);
  } else {
    result.weights = MixtureWeights::uniform(m);
    result.degenerate = true;
  }
  return result;
}

WeightResult mixing_weights(std::span<const BaseKernel> kernels, const Eigen::MatrixXd& pos, const Eigen::MatrixXd& neg,
                            const MmdOptions& options) {
  std::vector<MmdScore> scores;
  scores.reserve(kernels.size());
  for (const auto& k : kernels) scores.push_back(mmd_score(k, pos, neg, options));
  return weights_from_scores(std::move(scores));
}

double gaussian_mmd_squared_closed_form(const Eigen::VectorXd& mu_p, const Eigen::VectorXd& mu_q, double variance,
                                        double bandwidth, ClosedFormVariant variant) {
  if (mu_p.size() != mu_q.size()) throw std::invalid_argument("closed form: mean dimension mismatch");
  if (variance < 0.0) throw ConfigError("variance must be nonnegative");
  if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
  const double d = static_cast<double>(mu_p.size());
  const double rho2 = bandwidth * bandwidth;
  const double gap = (mu_p - mu_q).squaredNorm();
  const double spread = variant == ClosedFormVariant::convolution ? 2.0 * variance : variance;
  const double exp_denom = variant == ClosedFormVariant::convolution ? 2.0 * rho2 + 4.0 * variance : 2.0 * rho2 + variance;
  return 2.0 * std::pow(rho2 / (rho2 + spread), d / 2.0) * (1.0 - std::exp(-gap / exp_denom));
}

double gaussian_mmd_closed_form(const Eigen::VectorXd& mu_p, const Eigen::VectorXd& mu_q, double variance, double bandwidth,
                                ClosedFormVariant variant) {
  return std::sqrt(std::max(0.0, gaussian_mmd_squared_closed_form(mu_p, mu_q, variance, bandwidth, variant)));
}

MonteCarloEstimate gaussian_mmd_squared_monte_carlo(const Eigen::VectorXd& mu_p, const Eigen::VectorXd& mu_q, double variance,
                                                    const BaseKernel& k, Index draws, std::uint64_t seed) {
  if (draws < 2) throw ConfigError("Monte-Carlo estimate needs at least two draws");
  const Index d = mu_p.size();
  const double sd = std::sqrt(variance);
  auto rng = CounterRng::stream(seed, 0x6d63ULL);
  Eigen::VectorXd x1(d), x2(d), y1(d), y2(d);
  // Welford accumulation of h(z, z') over independent quadruples.
  double mean = 0.0, m2 = 0.0;
  for (Index t = 0; t < draws; ++t) {
    for (Index c = 0; c < d; ++c) {
      x1(c) = mu_p(c) + sd * rng.normal();
      x2(c) = mu_p(c) + sd * rng.normal();
      y1(c) = mu_q(c) + sd * rng.normal();
      y2(c) = mu_q(c) + sd * rng.normal();
    }
    const double h = eval_kernel(k, x1, x2) + eval_kernel(k, y1, y2) - eval_kernel(k, x1, y2) - eval_kernel(k, x2, y1);
    const double delta = h - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (h - mean);
  }
  const double var = m2 / static_cast<double>(draws - 1);
  return {mean, std::sqrt(var / static_cast<double>(draws))};
}

Sampler isotropic_gaussian_sampler(Eigen::VectorXd mean, double stddev) {
  return [mean = std::move(mean), stddev](Index n, CounterRng& rng) {
    Eigen::MatrixXd out(n, mean.size());
    for (Index i = 0; i < n; ++i) {
      for (Index c = 0; c < mean.size(); ++c) out(i, c) = mean(c) + stddev * rng.normal();
    }
    return out;
  };
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need at least two matching points");
  const auto count = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / count, my = sy / count;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ConvergenceReport mmd_convergence_probe(const Sampler& p, const Sampler& q, const BaseKernel& k, const std::vector<Index>& ns,
                                        Index trials, std::uint64_t seed, double population_value) {
  if (ns.empty() || trials < 1) throw ConfigError("convergence probe needs a nonempty n grid and at least one trial");
  ConvergenceReport report;
  for (std::size_t g = 0; g < ns.size(); ++g) {
    const Index n = ns[g];
    std::vector<double> errors(static_cast<std::size_t>(trials));
    parallel_for(trials, [&](Index t) {
      auto rng = CounterRng::stream(seed, (static_cast<std::uint64_t>(g) << 32) | static_cast<std::uint64_t>(t));
      const Eigen::MatrixXd xs = p(n, rng);
      const Eigen::MatrixXd ys = q(n, rng);
      errors[static_cast<std::size_t>(t)] = std::abs(mmd_score(k, xs, ys).value - population_value);
    });
    const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(trials);
    double ss = 0.0;
    for (double e : errors) ss += (e - mean) * (e - mean);
    const double sd = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1)) : 0.0;
    report.rows.push_back({n, mean, sd / std::sqrt(static_cast<double>(trials))});
  }
  if (report.rows.size() >= 2) {
    std::vector<double> xs, ys;
    for (const auto& row : report.rows) {
      xs.push_back(static_cast<double>(row.n));
      ys.push_back(row.mean_abs_error);
    }
    report.slope = loglog_slope(xs, ys);
  }
  return report;
}

NullSummary mmd_null_distribution_probe(const Sampler& sampler, const BaseKernel& k, Index n0, Index trials, std::uint64_t seed) {
  if (n0 < 2 || trials < 2) throw ConfigError("null probe needs n0 >= 2 and at least two trials");
  std::vector<double> squared(static_cast<std::size_t>(trials));
  parallel_for(trials, [&](Index t) {
    auto rng = CounterRng::stream(seed, static_cast<std::uint64_t>(t));
    const Eigen::MatrixXd xs = sampler(n0, rng);
    const Eigen::MatrixXd ys = sampler(n0, rng);
    squared[static_cast<std::size_t>(t)] = mmd_unbiased_balanced(k, xs, ys).squared;
  });
  NullSummary s;
  s.n0 = n0;
  s.trials = trials;
  const auto count = static_cast<double>(trials);
  s.mean_squared = std::accumulate(squared.begin(), squared.end(), 0.0) / count;
  double m2 = 0.0;
  for (double v : squared) m2 += (v - s.mean_squared) * (v - s.mean_squared);
  s.std_squared = std::sqrt(m2 / (count - 1.0));
  s.mean_consistent_with_zero = std::abs(s.mean_squared) <= 3.0 * s.std_squared / std::sqrt(count);

  // Shape statistics are scale-free, so scaling by sqrt(n0) only matters for reporting.
  const double scale = std::sqrt(static_cast<double>(n0));
  double mean = 0.0;
  for (double v : squared) mean += scale * v;
  mean /= count;
  double c2 = 0.0, c3 = 0.0, c4 = 0.0;
  for (double v : squared) {
    const double dv = scale * v - mean;
    c2 += dv * dv;
    c3 += dv * dv * dv;
    c4 += dv * dv * dv * dv;
  }
  c2 /= count;
  c3 /= count;
  c4 /= count;
  if (c2 > 0.0) {
    s.skewness = c3 / std::pow(c2, 1.5);
    s.excess_kurtosis = c4 / (c2 * c2) - 3.0;
    s.jarque_bera = count / 6.0 * (s.skewness * s.skewness + 0.25 * s.excess_kurtosis * s.excess_kurtosis);
  }
  return s;
}

}  // namespace mkmmd
