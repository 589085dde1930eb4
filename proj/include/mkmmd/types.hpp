#ifndef MKMMD_TYPES_HPP
#define MKMMD_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mkmmd {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Binary labels, every entry -1 or +1.
using Labels = Eigen::VectorXi;

/// Malformed or unusable input data (bad file, wrong alphabet, empty class).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A serialized model failed to parse or verify.
class ModelIntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mkmmd

#endif  // MKMMD_TYPES_HPP
