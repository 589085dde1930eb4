#ifndef MKMMD_SERIALIZE_HPP
#define MKMMD_SERIALIZE_HPP

#include "mkmmd/diagnostics.hpp"
#include "mkmmd/select.hpp"
#include "mkmmd/svm.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace mkmmd {

using Json = nlohmann::json;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t hash = 0xcbf29ce484222325ULL);

/// Digest of the first eight frequencies and phases of every kernel block.
std::uint64_t bank_fingerprint(const FeatureBank& bank);

/// Bank parameters only; frequencies are regenerated from the seed on load.
Json bank_to_json(const FeatureBank& bank);
FeatureBank bank_from_json(const Json& j);

/**
 * Model document with a "checksum" field covering every other field and the
 * regenerated frequencies. Loading recomputes it and throws
 * ModelIntegrityError on any mismatch or malformed content.
 */
Json model_to_json(const SvmModel& model);
SvmModel model_from_json(const Json& j);
std::string model_to_string(const SvmModel& model);
SvmModel model_from_string(const std::string& text);
void save_model(const std::filesystem::path& path, const SvmModel& model);
SvmModel load_model(const std::filesystem::path& path);

Json score_report_json(const std::vector<BaseKernel>& kernels, const WeightResult& result);
Json complexity_json(const ComplexityReport& r);
Json concentration_json(const ConcentrationReport& r);
Json selection_json(const SelectionReport& r);
Json training_log_json(const LinearSvm& model);

/// Two-space indented dump followed by a newline.
std::string dump(const Json& j);

}  // namespace mkmmd

#endif  // MKMMD_SERIALIZE_HPP
