#ifndef MKMMD_PIPELINE_HPP
#define MKMMD_PIPELINE_HPP

#include "mkmmd/mmd.hpp"
#include "mkmmd/svm.hpp"

namespace mkmmd {

struct PipelineConfig {
  std::vector<BaseKernel> kernels;
  /// Random features per base kernel (D).
  Index draws = 256;
  TrainConfig train;
  MmdOptions mmd;
  bool standardize = true;
  std::uint64_t seed = 0;
};

struct PipelineResult {
  SvmModel model;
  WeightResult weights;
};

/// Sub-seed for one pipeline stage, derived from the master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stage);

inline constexpr std::uint64_t kBankStage = 1;
inline constexpr std::uint64_t kTrainStage = 2;

/**
 * Multiple-kernel SVM training:
 *  1. split the (optionally standardized) data into class-conditional samples,
 *  2. score each base kernel by MMD and normalize the scores into mixture weights,
 *  3. draw D frequencies per kernel,
 *  4. build the weighted concatenated features and fit the ball-constrained hinge model.
 */
PipelineResult fit_multiple_kernel_svm(const LabeledDataset& ds, const PipelineConfig& cfg);

/// Same as above with the mixture weights given instead of scored.
SvmModel fit_with_weights(const LabeledDataset& ds, const PipelineConfig& cfg, const MixtureWeights& weights);

}  // namespace mkmmd

#endif  // MKMMD_PIPELINE_HPP
