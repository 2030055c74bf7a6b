#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tdc/embedding.hpp"
#include "tdc/evaluation.hpp"
#include "tdc/groundtruth.hpp"
#include "tdc/knn.hpp"
#include "tdc/manifest.hpp"
#include "tdc/model_dir.hpp"
#include "tdc/synth.hpp"

// Command implementations shared by the `tdc` CLI and the integration tests.
namespace tdc::pipeline {

struct SynthOptions {
    std::filesystem::path out;
    std::uint64_t seed = 0;
    int conditions = 3;
    std::vector<std::string> causes;  // empty = default set
    synth::DatasetOptions dataset;
};
synth::SynthDataset run_synth(const SynthOptions& options);

struct ExtractOptions {
    std::filesystem::path manifest;
    std::filesystem::path audio_root;
    std::filesystem::path out;
};
void run_extract(const ExtractOptions& options);

struct FitOptions {
    std::filesystem::path manifest;
    std::filesystem::path audio_root;
    std::filesystem::path out;
    ProviderKind provider = ProviderKind::Spectral;
    std::optional<std::filesystem::path> embeddings;
    std::optional<DistanceKind> distance;
    int k = kDefaultK;
    double t = kDefaultThreshold;
};
Model run_fit(const FitOptions& options);

/// Default distance per provider: Euclidean for timbre, Cosine otherwise.
DistanceKind default_distance(ProviderKind provider);

struct ScoreOptions {
    std::filesystem::path model;
    std::filesystem::path manifest;
    std::filesystem::path audio_root;
    std::filesystem::path out;
    std::optional<ProviderKind> provider;
    std::optional<std::filesystem::path> embeddings;
    std::optional<int> k;
    std::optional<double> t;
    std::optional<DistanceKind> distance;
    bool global_baseline = false;
};
std::vector<TimbreDiffResult> run_score(const ScoreOptions& options);

struct GenGtOptions {
    std::filesystem::path manifest;
    std::filesystem::path audio_root;
    std::filesystem::path out;
    double t_prime = kDefaultGroundTruthThreshold;
};
struct GenGtOutput {
    std::vector<GroundTruthRecord> records;
    GroundTruthStats stats;
};
GenGtOutput run_gen_gt(const GenGtOptions& options);

struct EvalOptions {
    std::filesystem::path results;
    std::filesystem::path ground_truth;
    std::filesystem::path manifest;
    std::filesystem::path out;
};
EvalReport run_eval(const EvalOptions& options);

}  // namespace tdc::pipeline
