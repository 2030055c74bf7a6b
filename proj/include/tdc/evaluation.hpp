#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "tdc/knn.hpp"
#include "tdc/manifest.hpp"
#include "tdc/timbre.hpp"

namespace tdc {

double detection_auc(std::span<const double> normal_scores,
                     std::span<const double> anomalous_scores);

/// Counts of ground-truth labels per attribute, indexed [attribute][label + 1].
using LabelCounts = std::array<std::array<std::size_t, 3>, kNumAttributes>;

struct MaeResult {
    std::array<double, kNumAttributes> mae{};
    LabelCounts counts{};
};

/// Class-balanced MAE. Each clip's absolute error is divided by the size of
/// its true class, and the sum is averaged over the classes present in the
/// truths for that attribute.
MaeResult normalized_mae(const std::map<std::string, LabelVector>& predictions,
                         const std::map<std::string, LabelVector>& truths);

struct EvalReport {
    double detection_auc = 0.0;
    std::array<double, kNumAttributes> mae{};
    double mean_mae = 0.0;
    LabelCounts counts{};
    std::size_t n_clips = 0;

    bool operator==(const EvalReport&) const = default;
};

/// Detection AUC over the manifest's test clips and MAE over its anomalous
/// clips. Throws Coverage naming the first test clip without a result.
EvalReport build_report(std::span<const TimbreDiffResult> results,
                        std::span<const ManifestEntry> manifest,
                        const std::map<std::string, LabelVector>& truths);

nlohmann::json to_json(const EvalReport& report);

}  // namespace tdc
