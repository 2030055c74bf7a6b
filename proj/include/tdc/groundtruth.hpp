#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdc/manifest.hpp"
#include "tdc/timbre.hpp"

namespace tdc {

inline constexpr double kDefaultGroundTruthThreshold = 0.05;

/// ROC AUC with `negatives` as negative scores and `positives` as positive
/// scores; ties count one half. Computed from midranks in O(n log n).
double auc(std::span<const double> negatives, std::span<const double> positives);

/// Ground truth for one (condition, cause) group.
struct GroundTruthRecord {
    std::string condition;
    std::string cause;
    std::array<double, kNumAttributes> scores{};
    LabelVector labels{};

    bool operator==(const GroundTruthRecord&) const = default;
};

using TimbreLookup = std::map<std::string, TimbreVector>;

/// For every (condition, cause) present among anomalous clips and every
/// attribute, the AUC of the condition's normal training metrics (negatives)
/// against the group's anomalous metrics (positives), thresholded at t'.
/// Records come back sorted by (condition, cause).
std::vector<GroundTruthRecord> generate_ground_truth(std::span<const ManifestEntry> entries,
                                                     const TimbreLookup& timbre,
                                                     double t_prime = kDefaultGroundTruthThreshold);

/// Label vector for every anomalous clip, taken from its group's record.
std::map<std::string, LabelVector> assign_labels(std::span<const ManifestEntry> entries,
                                                 std::span<const GroundTruthRecord> records);

struct GroundTruthStats {
    std::size_t groups = 0;
    std::size_t unique_vectors = 0;
    std::size_t minus = 0;
    std::size_t zero = 0;
    std::size_t plus = 0;

    bool operator==(const GroundTruthStats&) const = default;
};

GroundTruthStats ground_truth_statistics(std::span<const GroundTruthRecord> records);
nlohmann::json to_json(const GroundTruthStats& stats);

/// Ground-truth CSV: `condition,cause,attribute,score,label`, five rows per group.
void write_ground_truth_csv(const std::filesystem::path& path,
                            std::span<const GroundTruthRecord> records);
std::vector<GroundTruthRecord> read_ground_truth_csv(const std::filesystem::path& path);

}  // namespace tdc
