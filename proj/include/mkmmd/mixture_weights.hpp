#ifndef MKMMD_MIXTURE_WEIGHTS_HPP
#define MKMMD_MIXTURE_WEIGHTS_HPP

#include "mkmmd/types.hpp"

#include <cmath>

namespace mkmmd {

/// A point on the probability simplex: nonnegative, summing to one.
class MixtureWeights {
 public:
  MixtureWeights() = default;

  /// Validates and renormalizes. Throws ConfigError on negative or all-zero input.
  explicit MixtureWeights(Eigen::VectorXd weights) : weights_(std::move(weights)) {
    if (weights_.size() == 0) throw ConfigError("mixture weights must be nonempty");
    if (!weights_.allFinite() || (weights_.array() < 0.0).any()) throw ConfigError("mixture weights must be finite and nonnegative");
    const double total = weights_.sum();
    if (!(total > 0.0)) throw ConfigError("mixture weights must not all be zero");
    weights_ /= total;
  }

  static MixtureWeights uniform(Index m) { return MixtureWeights(Eigen::VectorXd::Ones(m)); }
  static MixtureWeights one_hot(Index m, Index which) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    w(which) = 1.0;
    return MixtureWeights(std::move(w));
  }

  Index size() const { return weights_.size(); }
  double operator[](Index i) const { return weights_(i); }
  const Eigen::VectorXd& vector() const { return weights_; }

 private:
  Eigen::VectorXd weights_;
};

}  // namespace mkmmd

#endif  // MKMMD_MIXTURE_WEIGHTS_HPP
