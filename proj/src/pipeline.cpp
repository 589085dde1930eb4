#include "mkmmd/pipeline.hpp"

namespace mkmmd {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stage) { return CounterRng::stream(seed, stage).next(); }

namespace {

std::pair<LabeledDataset, std::optional<DatasetStats>> prepare(const LabeledDataset& ds, bool standardize_inputs) {
  validate(ds);
  if (!standardize_inputs) return {ds, std::nullopt};
  auto [out, stats] = standardize(ds);
  return {std::move(out), std::move(stats)};
}

}  // namespace

SvmModel fit_with_weights(const LabeledDataset& ds, const PipelineConfig& cfg, const MixtureWeights& weights) {
  auto [data, stats] = prepare(ds, cfg.standardize);
  SvmModel model;
  model.standardization = std::move(stats);
  model.bank = FeatureBank::generate(cfg.kernels, weights, cfg.draws, data.dim(), derive_seed(cfg.seed, kBankStage));
  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = derive_seed(cfg.seed, kTrainStage);
  model.linear = train(build_feature_matrix(data.features, model.bank), data.labels, train_cfg);
  return model;
}

PipelineResult fit_multiple_kernel_svm(const LabeledDataset& ds, const PipelineConfig& cfg) {
  if (cfg.kernels.empty()) throw ConfigError("at least one base kernel is required");
  auto [data, stats] = prepare(ds, cfg.standardize);
  const auto split = split_by_label(data);
  PipelineResult result;
  result.weights = mixing_weights(cfg.kernels, split.positives, split.negatives, cfg.mmd);
  result.model.standardization = std::move(stats);
  result.model.bank =
      FeatureBank::generate(cfg.kernels, result.weights.weights, cfg.draws, data.dim(), derive_seed(cfg.seed, kBankStage));
  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = derive_seed(cfg.seed, kTrainStage);
  result.model.linear = train(build_feature_matrix(data.features, result.model.bank), data.labels, train_cfg);
  return result;
}

}  // namespace mkmmd
