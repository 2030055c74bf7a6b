#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tdc/embedding.hpp"
#include "tdc/timbre.hpp"

namespace tdc {

inline constexpr int kDefaultK = 30;
inline constexpr double kDefaultThreshold = 0.1;

/// Normal training data in embedded and metric form: index-aligned embeddings,
/// raw timbre vectors and clip ids.
struct ReferenceSet {
    std::vector<Embedding> embeddings;
    std::vector<TimbreVector> timbre_vectors;
    std::vector<std::string> clip_ids;
    std::string provider_id;
    DistanceKind distance_kind = DistanceKind::Euclidean;
    NormalizationStats normalization;

    std::size_t size() const noexcept { return embeddings.size(); }
    std::size_t dim() const noexcept { return embeddings.empty() ? 0 : embeddings.front().dim(); }

    /// Throws Validation on empty or misaligned lists, or mixed provider/dimension.
    void validate() const;

    bool operator==(const ReferenceSet&) const = default;
};

struct NeighborHit {
    std::size_t train_index = 0;
    double distance = 0.0;

    bool operator==(const NeighborHit&) const = default;
};

struct TimbreDiffResult {
    std::string clip_id;
    double anomaly_score = 0.0;
    std::array<double, kNumAttributes> attribute_scores{};
    LabelVector attribute_labels{};
    std::vector<std::size_t> neighbor_indices;

    bool operator==(const TimbreDiffResult&) const = default;
};

/// Exact k nearest neighbours, ascending by distance, ties to the lower index.
std::vector<NeighborHit> knn(const ReferenceSet& ref, const Embedding& query, int k);

/// Mean neighbour distance.
double anomaly_score(std::span<const NeighborHit> hits);

/// Normalized Mann-Whitney U of one value against a sample: each neighbour
/// below the test value counts 1, each tie 0.5. Without ties this is (r-1)/k
/// where r is the test value's rank among itself and the neighbours.
double timbre_rank_score(double test_value, std::span<const double> neighbor_values);

/// -1 if score <= t, +1 if score >= 1 - t, otherwise 0. Requires t in [0, 0.5).
Change threshold_label(double score, double t);

TimbreDiffResult score_clip(const ReferenceSet& ref, const Embedding& query_embedding,
                            const TimbreVector& query_timbre, int k, double t);

struct GlobalBaselineResult {
    std::array<double, kNumAttributes> scores{};
    LabelVector labels{};
};

/// Rank scores against every training clip instead of the neighbours.
GlobalBaselineResult global_baseline_score(const ReferenceSet& ref,
                                           const TimbreVector& query_timbre, double t);

/// Results CSV (anomaly score, five attribute scores, five labels per clip).
void write_results_csv(const std::filesystem::path& path,
                       std::span<const TimbreDiffResult> results);
std::vector<TimbreDiffResult> read_results_csv(const std::filesystem::path& path);

}  // namespace tdc
