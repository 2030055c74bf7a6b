#pragma once

#include <filesystem>
#include <string>

#include "tdc/embedding.hpp"
#include "tdc/knn.hpp"

namespace tdc {

inline constexpr const char* kToolVersion = "1.0.0";

struct ModelConfig {
    std::string provider_id;
    DistanceKind distance_kind = DistanceKind::Euclidean;
    int k = kDefaultK;
    double t = kDefaultThreshold;
    std::string created_at;
    std::string tool_version = kToolVersion;
};

struct Model {
    ModelConfig config;
    ReferenceSet reference;
};

/// Model directory layout:
///   config.json, embeddings.tdce, embeddings.tdce.ids.csv, timbre.csv,
///   normalization.json
/// timbre.csv holds 17 significant digits so the reference set reloads exactly.
void save_model(const std::filesystem::path& dir, const Model& model);
Model load_model(const std::filesystem::path& dir);

}  // namespace tdc
