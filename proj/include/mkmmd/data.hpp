#ifndef MKMMD_DATA_HPP
#define MKMMD_DATA_HPP

#include "mkmmd/types.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace mkmmd {

/// n samples in R^d with labels in {-1, +1}.
struct LabeledDataset {
  Eigen::MatrixXd features;
  Labels labels;
  std::vector<std::string> feature_names;
  /// Set when the source used the {0, 1} alphabet and 0 was mapped to -1.
  bool labels_remapped = false;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
  Index count(int label) const { return (labels.array() == label).count(); }
  bool single_class() const { return size() > 0 && (count(1) == 0 || count(-1) == 0); }
};

/// Class-conditional samples, rows kept in source order.
struct ClassSplit {
  Eigen::MatrixXd positives;
  Eigen::MatrixXd negatives;
  std::vector<Index> positive_rows;
  std::vector<Index> negative_rows;

  bool balanced() const { return positives.rows() == negatives.rows(); }
};

struct DatasetStats {
  double diameter = 0.0;
  bool diameter_is_bound = false;
  Eigen::VectorXd mean;
  /// Population standard deviation (divisor n); 0 for constant columns.
  Eigen::VectorXd stddev;
};

enum class FileFormat { csv, libsvm };

struct LoadOptions {
  /// Fixed feature count for LIBSVM input; inferred from the largest index otherwise.
  std::optional<Index> dim;
  /// When false a CSV without a "label" column loads with an empty label vector.
  bool labels_required = true;
};

FileFormat format_from_path(const std::filesystem::path& path);

LabeledDataset load_dataset(const std::filesystem::path& path, FileFormat format, const LoadOptions& options = {});
LabeledDataset parse_csv(std::istream& in, const LoadOptions& options = {});
LabeledDataset parse_libsvm(std::istream& in, const LoadOptions& options = {});

void write_csv(std::ostream& out, const LabeledDataset& ds);

/// Validates the dataset invariants (finite entries, label alphabet).
void validate(const LabeledDataset& ds);

ClassSplit split_by_label(const LabeledDataset& ds);

std::pair<LabeledDataset, DatasetStats> standardize(const LabeledDataset& ds);

/// Applies a recorded standardization to new rows.
Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& features, const DatasetStats& stats);

struct Fold {
  std::vector<Index> train;
  std::vector<Index> validation;
};

/// Stratified k-fold partition, deterministic given seed.
std::vector<Fold> kfold_split(const LabeledDataset& ds, int k, std::uint64_t seed);

/// Stratified train/test split; test_fraction of each class goes to test.
Fold holdout_split(const LabeledDataset& ds, double test_fraction, std::uint64_t seed);

LabeledDataset subset(const LabeledDataset& ds, const std::vector<Index>& rows);

struct Diameter {
  double value = 0.0;
  bool is_bound = false;
};

inline constexpr Index kExactDiameterLimit = 2000;

/// Exact maximum pairwise distance up to kExactDiameterLimit rows, bounding-box diagonal above.
Diameter diameter(const Eigen::MatrixXd& points);
inline Diameter diameter(const LabeledDataset& ds) { return diameter(ds.features); }

/// Two isotropic Gaussian classes with means +mean and -mean, unit variance, balanced.
LabeledDataset make_two_gaussians(Index n, const Eigen::VectorXd& mean, double stddev, std::uint64_t seed);

/// Standard normal features with label sign(x_0); remaining coordinates are noise.
LabeledDataset make_planted_feature(Index n, Index d, std::uint64_t seed);

}  // namespace mkmmd

#endif  // MKMMD_DATA_HPP
