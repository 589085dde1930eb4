#include "mkmmd/serialize.hpp"

#include "mkmmd/version.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mkmmd {

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t hash) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t bank_fingerprint(const FeatureBank& bank) {
  std::uint64_t h = fnv1a(nullptr, 0);
  for (Index l = 0; l < bank.kernel_count(); ++l) {
    const FrequencyDraw& b = bank.block(l);
    const Index rows = std::min<Index>(8, b.size());
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < b.frequencies.cols(); ++c) {
        const double v = b.frequencies(r, c);
        h = fnv1a(&v, sizeof v, h);
      }
      const double p = b.phases(r);
      h = fnv1a(&p, sizeof p, h);
    }
  }
  return h;
}

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string content_checksum(const Json& doc_without_checksum, const FeatureBank& bank) {
  const std::string text = doc_without_checksum.dump();
  std::uint64_t h = fnv1a(text.data(), text.size());
  const std::uint64_t f = bank_fingerprint(bank);
  h = fnv1a(&f, sizeof f, h);
  return hex(h);
}

}  // namespace

Json bank_to_json(const FeatureBank& bank) {
  Json kernels = Json::array();
  for (const auto& k : bank.kernels())
    kernels.push_back({{"family", std::string(to_string(k.family()))}, {"bandwidth", k.bandwidth()}});
  return {{"kernels", kernels},
          {"weights", to_vector(bank.weights().vector())},
          {"draws_per_kernel", bank.draws_per_kernel()},
          {"input_dim", bank.input_dim()},
          {"seed", bank.seed()},
          {"fingerprint", hex(bank_fingerprint(bank))}};
}

FeatureBank bank_from_json(const Json& j) {
  std::vector<BaseKernel> kernels;
  for (const auto& k : j.at("kernels"))
    kernels.emplace_back(parse_kernel_family(k.at("family").get<std::string>()), k.at("bandwidth").get<double>());
  return FeatureBank::generate(std::move(kernels), MixtureWeights(from_vector(j.at("weights").get<std::vector<double>>())),
                               j.at("draws_per_kernel").get<Index>(), j.at("input_dim").get<Index>(),
                               j.at("seed").get<std::uint64_t>());
}

Json model_to_json(const SvmModel& model) {
  const LinearSvm& lin = model.linear;
  Json doc = {{"schema_version", kSchemaVersion},
              {"version", kVersion},
              {"bank", bank_to_json(model.bank)},
              {"radius", lin.radius},
              {"lambda", lin.lambda},
              {"epochs", lin.epochs},
              {"train_seed", lin.seed},
              {"final_objective", lin.final_objective},
              {"beta", to_vector(lin.beta)},
              {"offset", lin.offset}};
  if (model.standardization) {
    const DatasetStats& s = *model.standardization;
    doc["standardization"] = {{"mean", to_vector(s.mean)},
                              {"stddev", to_vector(s.stddev)},
                              {"diameter", s.diameter},
                              {"diameter_is_bound", s.diameter_is_bound}};
  } else {
    doc["standardization"] = nullptr;
  }
  doc["checksum"] = content_checksum(doc, model.bank);
  return doc;
}

SvmModel model_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw ModelIntegrityError("model document is not a JSON object");
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw ModelIntegrityError("unsupported model schema_version");
    SvmModel model;
    model.bank = bank_from_json(j.at("bank"));
    Json body = j;
    const std::string stored = body.at("checksum").get<std::string>();
    body.erase("checksum");
    if (content_checksum(body, model.bank) != stored) throw ModelIntegrityError("model checksum mismatch");
    if (j.at("bank").at("fingerprint").get<std::string>() != hex(bank_fingerprint(model.bank)))
      throw ModelIntegrityError("regenerated frequencies do not match the stored fingerprint");
    LinearSvm& lin = model.linear;
    lin.beta = from_vector(j.at("beta").get<std::vector<double>>());
    if (lin.beta.size() != model.bank.feature_dim()) throw ModelIntegrityError("coefficient count does not match the feature bank");
    lin.offset = j.at("offset").get<double>();
    lin.draws_per_kernel = model.bank.draws_per_kernel();
    lin.kernel_count = model.bank.kernel_count();
    lin.radius = j.at("radius").get<double>();
    lin.lambda = j.at("lambda").get<double>();
    lin.epochs = j.at("epochs").get<int>();
    lin.seed = j.at("train_seed").get<std::uint64_t>();
    lin.final_objective = j.at("final_objective").get<double>();
    const Json& s = j.at("standardization");
    if (!s.is_null()) {
      DatasetStats stats;
      stats.mean = from_vector(s.at("mean").get<std::vector<double>>());
      stats.stddev = from_vector(s.at("stddev").get<std::vector<double>>());
      stats.diameter = s.at("diameter").get<double>();
      stats.diameter_is_bound = s.at("diameter_is_bound").get<bool>();
      if (stats.mean.size() != model.bank.input_dim() || stats.stddev.size() != model.bank.input_dim())
        throw ModelIntegrityError("standardization does not match the input dimension");
      model.standardization = std::move(stats);
    }
    return model;
  } catch (const ModelIntegrityError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModelIntegrityError(std::string("malformed model: ") + e.what());
  }
}

std::string model_to_string(const SvmModel& model) { return dump(model_to_json(model)); }

SvmModel model_from_string(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw ModelIntegrityError(std::string("model is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

void save_model(const std::filesystem::path& path, const SvmModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << model_to_string(model);
}

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return model_from_string(text.str());
}

namespace {

Json score_json(const MmdScore& s) {
  return {{"squared", s.squared}, {"value", s.value}, {"estimator", std::string(to_string(s.estimator))},
          {"n_plus", s.n_plus}, {"n_minus", s.n_minus}};
}

}  // namespace

Json score_report_json(const std::vector<BaseKernel>& kernels, const WeightResult& result) {
  Json rows = Json::array();
  for (std::size_t l = 0; l < kernels.size(); ++l) {
    Json row = score_json(result.scores[l]);
    row["family"] = std::string(to_string(kernels[l].family()));
    row["bandwidth"] = kernels[l].bandwidth();
    row["gamma"] = kernels[l].gamma();
    row["weight"] = result.weights[static_cast<Index>(l)];
    rows.push_back(std::move(row));
  }
  return {{"schema_version", kSchemaVersion}, {"kernels", rows}, {"degenerate", result.degenerate}};
}

Json complexity_json(const ComplexityReport& r) {
  return {{"n", r.n},
          {"D", r.draws},
          {"m", r.kernel_count},
          {"R", r.radius},
          {"frobenius_norm", r.frobenius_norm},
          {"spectral_norm", r.spectral_norm},
          {"gram_trace_squared", r.gram_trace_squared},
          {"erfc_bound", r.erfc_bound},
          {"erfc_bound_display", r.erfc_bound_display},
          {"khintchine_bound", r.khintchine_bound},
          {"gaussian_bound", r.gaussian_bound},
          {"ordering_holds", r.ordering_holds()}};
}

Json concentration_json(const ConcentrationReport& r) {
  return {{"D", r.draws}, {"seeds", r.seeds}, {"deviations", r.deviations},
          {"max_deviation", r.max_deviation}, {"mean_deviation", r.mean_deviation}};
}

Json selection_json(const SelectionReport& r) {
  return {{"schema_version", kSchemaVersion},
          {"gammas", r.gammas},
          {"cv_mean", r.cv_mean},
          {"cv_std", r.cv_std},
          {"mmd_score", r.mmd_score},
          {"cv_gamma", r.gammas[static_cast<std::size_t>(r.cv_index)]},
          {"mmd_gamma", r.gammas[static_cast<std::size_t>(r.mmd_index)]},
          {"agreement", r.agreement},
          {"mmd_degenerate", r.mmd_degenerate},
          {"mixture_weights", to_vector(r.mixture_weights.vector())},
          {"cv_model_test_accuracy", r.cv_model_test_accuracy},
          {"mmd_model_test_accuracy", r.mmd_model_test_accuracy},
          {"mixture_test_accuracy", r.mixture_test_accuracy}};
}

Json training_log_json(const LinearSvm& model) {
  Json epochs = Json::array();
  for (const auto& e : model.history)
    epochs.push_back({{"epoch", e.epoch}, {"objective", e.objective}, {"train_accuracy", e.train_accuracy}});
  return {{"schema_version", kSchemaVersion}, {"epochs", epochs}, {"final_objective", model.final_objective}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace mkmmd
