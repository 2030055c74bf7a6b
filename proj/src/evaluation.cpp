#include "tdc/evaluation.hpp"

#include <cstdlib>
#include <vector>

#include <fmt/format.h>

#include "tdc/error.hpp"
#include "tdc/groundtruth.hpp"

namespace tdc {

double detection_auc(std::span<const double> normal_scores, std::span<const double> anomalous_scores) {
    return auc(normal_scores, anomalous_scores);
}

namespace {

int checked_label(Change c, const std::string& clip_id) {
    const int v = to_int(c);
    if (v < -1 || v > 1)
        throw Error(ErrorKind::InvalidArgument, fmt::format("clip '{}' has out-of-range label {}", clip_id, v));
    return v;
}

}  // namespace

MaeResult normalized_mae(const std::map<std::string, LabelVector>& predictions,
                         const std::map<std::string, LabelVector>& truths) {
    MaeResult out;
    // Absolute errors are integers, so per-class sums are exact and the result
    // does not depend on clip order.
    std::array<std::array<long long, 3>, kNumAttributes> error_sums{};
    for (const auto& [clip_id, truth] : truths) {
        const auto it = predictions.find(clip_id);
        if (it == predictions.end())
            throw Error(ErrorKind::Coverage, fmt::format("missing prediction for clip '{}'", clip_id));
        for (std::size_t a = 0; a < kNumAttributes; ++a) {
            const int y = checked_label(truth[a], clip_id);
            const int p = checked_label(it->second[a], clip_id);
            ++out.counts[a][y + 1];
            error_sums[a][y + 1] += std::abs(p - y);
        }
    }
    for (std::size_t a = 0; a < kNumAttributes; ++a) {
        double sum = 0.0;
        int present = 0;
        for (std::size_t c = 0; c < 3; ++c) {
            if (out.counts[a][c] == 0) continue;
            sum += static_cast<double>(error_sums[a][c]) / static_cast<double>(out.counts[a][c]);
            ++present;
        }
        out.mae[a] = present == 0 ? 0.0 : sum / present;
    }
    return out;
}

EvalReport build_report(std::span<const TimbreDiffResult> results, std::span<const ManifestEntry> manifest,
                        const std::map<std::string, LabelVector>& truths) {
    std::map<std::string, const TimbreDiffResult*> by_id;
    for (const auto& r : results)
        if (!by_id.emplace(r.clip_id, &r).second)
            throw Error(ErrorKind::Validation, fmt::format("duplicate result for clip '{}'", r.clip_id));

    // Scores are gathered in manifest order; AUC and MAE are order-free anyway.
    std::vector<double> normal_scores;
    std::vector<double> anomalous_scores;
    std::map<std::string, LabelVector> predictions;
    std::map<std::string, LabelVector> anomalous_truths;
    std::size_t evaluated = 0;
    for (const auto& e : manifest) {
        if (e.split != Split::Test) continue;
        const auto it = by_id.find(e.clip_id);
        if (it == by_id.end())
            throw Error(ErrorKind::Coverage, fmt::format("missing prediction for clip '{}'", e.clip_id));
        ++evaluated;
        if (e.state == State::Normal) {
            normal_scores.push_back(it->second->anomaly_score);
            continue;
        }
        anomalous_scores.push_back(it->second->anomaly_score);
        const auto truth = truths.find(e.clip_id);
        if (truth == truths.end())
            throw Error(ErrorKind::MissingData, fmt::format("no ground-truth labels for clip '{}'", e.clip_id));
        anomalous_truths.emplace(e.clip_id, truth->second);
        predictions.emplace(e.clip_id, it->second->attribute_labels);
    }
    if (normal_scores.empty() || anomalous_scores.empty())
        throw Error(ErrorKind::InvalidArgument, "evaluation needs both normal and anomalous test clips");

    EvalReport report;
    report.detection_auc = detection_auc(normal_scores, anomalous_scores);
    const MaeResult mae = normalized_mae(predictions, anomalous_truths);
    report.mae = mae.mae;
    report.counts = mae.counts;
    double total = 0.0;
    for (double v : mae.mae) total += v;
    report.mean_mae = total / static_cast<double>(kNumAttributes);
    report.n_clips = evaluated;
    return report;
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json mae = nlohmann::json::object();
    nlohmann::json counts = nlohmann::json::object();
    for (std::size_t a = 0; a < kNumAttributes; ++a) {
        const std::string name(attribute_name(kAttributes[a]));
        mae[name] = report.mae[a];
        counts[name] = {{"minus", report.counts[a][0]}, {"zero", report.counts[a][1]}, {"plus", report.counts[a][2]}};
    }
    return {{"detection_auc", report.detection_auc},
            {"mae", mae},
            {"mean_mae", report.mean_mae},
            {"counts", counts},
            {"n_clips", report.n_clips}};
}

}  // namespace tdc
