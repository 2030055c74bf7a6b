#include "tdc/model_dir.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "io_util.hpp"
#include "tdc/error.hpp"

namespace tdc {

namespace {
constexpr const char* kConfigFile = "config.json";
constexpr const char* kEmbeddingsFile = "embeddings.tdce";
constexpr const char* kTimbreFile = "timbre.csv";
constexpr const char* kNormalizationFile = "normalization.json";
constexpr int kLosslessDigits = 17;
}  // namespace

void save_model(const std::filesystem::path& dir, const Model& model) {
    const ReferenceSet& ref = model.reference;
    ref.validate();
    if (model.config.provider_id != ref.provider_id)
        throw Error(ErrorKind::Validation, "model config and reference set disagree on the provider");

    write_tdce(dir / kEmbeddingsFile, ref.embeddings);
    write_timbre_csv(dir / kTimbreFile, ref.clip_ids, ref.timbre_vectors, kLosslessDigits);
    const nlohmann::json norm = {{"mean", ref.normalization.mean}, {"std", ref.normalization.std}};
    detail::write_file_atomic(dir / kNormalizationFile, norm.dump(2) + "\n");
    const nlohmann::json config = {{"provider_id", model.config.provider_id},
                                   {"distance_kind", to_string(model.config.distance_kind)},
                                   {"k", model.config.k},
                                   {"t", model.config.t},
                                   {"count", ref.size()},
                                   {"dim", ref.dim()},
                                   {"created_at", model.config.created_at},
                                   {"tool_version", model.config.tool_version}};
    detail::write_file_atomic(dir / kConfigFile, config.dump(2) + "\n");
}

Model load_model(const std::filesystem::path& dir) {
    for (const char* name : {kConfigFile, kEmbeddingsFile, kTimbreFile, kNormalizationFile})
        if (!std::filesystem::exists(dir / name))
            throw Error(ErrorKind::MissingFile, fmt::format("model directory {} lacks {}", dir.string(), name));

    Model model;
    std::size_t count = 0;
    std::size_t dim = 0;
    try {
        const auto config = nlohmann::json::parse(detail::read_file(dir / kConfigFile));
        model.config.provider_id = config.at("provider_id").get<std::string>();
        const auto kind = parse_distance_kind(config.at("distance_kind").get<std::string>());
        if (!kind) throw Error(ErrorKind::Parse, "config.json: unknown distance_kind");
        model.config.distance_kind = *kind;
        model.config.k = config.at("k").get<int>();
        model.config.t = config.at("t").get<double>();
        model.config.created_at = config.value("created_at", "");
        model.config.tool_version = config.value("tool_version", "");
        count = config.at("count").get<std::size_t>();
        dim = config.at("dim").get<std::size_t>();

        const auto norm = nlohmann::json::parse(detail::read_file(dir / kNormalizationFile));
        model.reference.normalization.mean = norm.at("mean").get<std::vector<double>>();
        model.reference.normalization.std = norm.at("std").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, fmt::format("{}: {}", dir.string(), e.what()));
    }

    ReferenceSet& ref = model.reference;
    ref.provider_id = model.config.provider_id;
    ref.distance_kind = model.config.distance_kind;
    ref.embeddings = import_embeddings(dir / kEmbeddingsFile, ref.provider_id);
    auto timbre = read_timbre_csv(dir / kTimbreFile);
    ref.clip_ids = std::move(timbre.clip_ids);
    ref.timbre_vectors = std::move(timbre.vectors);

    if (ref.embeddings.size() != count || ref.clip_ids.size() != count)
        throw Error(ErrorKind::Validation,
                    fmt::format("model directory {}: config lists {} clips but files hold {} embeddings and {} "
                                "timbre rows",
                                dir.string(), count, ref.embeddings.size(), ref.clip_ids.size()));
    for (std::size_t i = 0; i < count; ++i)
        if (ref.embeddings[i].clip_id != ref.clip_ids[i])
            throw Error(ErrorKind::Validation,
                        fmt::format("model directory {}: row {} id mismatch ('{}' vs '{}')", dir.string(), i,
                                    ref.embeddings[i].clip_id, ref.clip_ids[i]));
    if (ref.dim() != dim || ref.normalization.dim() != dim || ref.normalization.std.size() != dim)
        throw Error(ErrorKind::Validation, fmt::format("model directory {}: dimension mismatch", dir.string()));
    ref.validate();
    return model;
}

}  // namespace tdc
