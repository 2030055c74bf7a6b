#include "tdc/groundtruth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "io_util.hpp"
#include "tdc/error.hpp"
#include "tdc/knn.hpp"

namespace tdc {

double auc(std::span<const double> negatives, std::span<const double> positives) {
    if (negatives.empty() || positives.empty())
        throw Error(ErrorKind::InvalidArgument, "AUC needs non-empty negative and positive sets");
    std::vector<std::pair<double, bool>> pooled;
    pooled.reserve(negatives.size() + positives.size());
    for (double v : negatives) pooled.emplace_back(v, false);
    for (double v : positives) pooled.emplace_back(v, true);
    for (const auto& [v, pos] : pooled)
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "AUC: non-finite score");
    std::sort(pooled.begin(), pooled.end());

    // Twice the positive rank sum with midranks, in integers.
    long long twice_rank_sum = 0;
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        long long pos_in_group = 0;
        while (j < pooled.size() && pooled[j].first == pooled[i].first) {
            if (pooled[j].second) ++pos_in_group;
            ++j;
        }
        // 1-based ranks i+1 .. j share the midrank (i + 1 + j) / 2.
        twice_rank_sum += pos_in_group * static_cast<long long>(i + 1 + j);
        i = j;
    }
    const long long m = static_cast<long long>(positives.size());
    const long long n = static_cast<long long>(negatives.size());
    const long long twice_u = twice_rank_sum - m * (m + 1);
    return static_cast<double>(twice_u) / static_cast<double>(2 * n * m);
}

std::vector<GroundTruthRecord> generate_ground_truth(std::span<const ManifestEntry> entries,
                                                     const TimbreLookup& timbre, double t_prime) {
    const auto lookup = [&](const ManifestEntry& e) -> const TimbreVector& {
        const auto it = timbre.find(e.clip_id);
        if (it == timbre.end())
            throw Error(ErrorKind::MissingData, fmt::format("no timbre vector for clip '{}'", e.clip_id));
        return it->second;
    };

    std::set<std::pair<std::string, std::string>> groups;
    for (const auto& e : entries)
        if (e.state == State::Anomalous) groups.emplace(e.condition, e.cause);

    std::vector<GroundTruthRecord> records;
    for (const auto& [condition, cause] : groups) {
        std::array<std::vector<double>, kNumAttributes> normal;
        std::array<std::vector<double>, kNumAttributes> anomalous;
        for (const auto& e : entries) {
            if (e.condition != condition) continue;
            const bool is_normal_train = e.split == Split::Train && e.state == State::Normal;
            const bool in_group = e.state == State::Anomalous && e.cause == cause;
            if (!is_normal_train && !in_group) continue;
            const TimbreVector& v = lookup(e);
            for (std::size_t a = 0; a < kNumAttributes; ++a)
                (is_normal_train ? normal : anomalous)[a].push_back(v.values[a]);
        }
        if (normal[0].empty())
            throw Error(ErrorKind::MissingData,
                        fmt::format("condition '{}' has anomalous clips but no normal training clips", condition));
        GroundTruthRecord r{condition, cause, {}, {}};
        for (std::size_t a = 0; a < kNumAttributes; ++a) {
            r.scores[a] = auc(normal[a], anomalous[a]);
            r.labels[a] = threshold_label(r.scores[a], t_prime);
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::map<std::string, LabelVector> assign_labels(std::span<const ManifestEntry> entries,
                                                 std::span<const GroundTruthRecord> records) {
    std::map<std::pair<std::string, std::string>, LabelVector> by_group;
    for (const auto& r : records) by_group[{r.condition, r.cause}] = r.labels;
    std::map<std::string, LabelVector> labels;
    for (const auto& e : entries) {
        if (e.state != State::Anomalous) continue;
        const auto it = by_group.find({e.condition, e.cause});
        if (it == by_group.end())
            throw Error(ErrorKind::MissingData,
                        fmt::format("no ground truth for clip '{}' (condition '{}', cause '{}')", e.clip_id,
                                    e.condition, e.cause));
        labels[e.clip_id] = it->second;
    }
    return labels;
}

GroundTruthStats ground_truth_statistics(std::span<const GroundTruthRecord> records) {
    GroundTruthStats s;
    s.groups = records.size();
    std::set<LabelVector> unique;
    for (const auto& r : records) {
        unique.insert(r.labels);
        for (Change c : r.labels) {
            switch (c) {
            case Change::Decreased: ++s.minus; break;
            case Change::Unchanged: ++s.zero; break;
            case Change::Increased: ++s.plus; break;
            }
        }
    }
    s.unique_vectors = unique.size();
    return s;
}

nlohmann::json to_json(const GroundTruthStats& stats) {
    return {{"groups", stats.groups},
            {"unique_vectors", stats.unique_vectors},
            {"counts", {{"minus", stats.minus}, {"zero", stats.zero}, {"plus", stats.plus}}}};
}

void write_ground_truth_csv(const std::filesystem::path& path, std::span<const GroundTruthRecord> records) {
    std::string out = "condition,cause,attribute,score,label\n";
    for (const auto& r : records)
        for (std::size_t a = 0; a < kNumAttributes; ++a)
            out += fmt::format("{},{},{},{},{}\n", detail::csv_escape(r.condition), detail::csv_escape(r.cause),
                               attribute_name(kAttributes[a]), r.scores[a], to_int(r.labels[a]));
    detail::write_file_atomic(path, out);
}

std::vector<GroundTruthRecord> read_ground_truth_csv(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty() || lines[0] != "condition,cause,attribute,score,label")
        throw Error(ErrorKind::Parse, fmt::format("{}: bad ground-truth CSV header", path.string()));

    std::vector<GroundTruthRecord> records;
    std::vector<std::array<bool, kNumAttributes>> filled;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto f = detail::split_csv_line(lines[i]);
        const auto where = fmt::format("{}:{}", path.string(), i + 1);
        if (f.size() != 5) throw Error(ErrorKind::Parse, fmt::format("{}: expected 5 fields", where));
        const auto attr = parse_attribute(f[2]);
        if (!attr) throw Error(ErrorKind::Parse, fmt::format("{}: unknown attribute '{}'", where, f[2]));
        const auto key = std::make_pair(f[0], f[1]);
        auto [it, inserted] = index.try_emplace(key, records.size());
        if (inserted) {
            records.push_back({f[0], f[1], {}, {}});
            filled.push_back({});
        }
        const std::size_t a = static_cast<std::size_t>(*attr);
        auto& rec = records[it->second];
        if (filled[it->second][a])
            throw Error(ErrorKind::Parse, fmt::format("{}: repeated attribute '{}'", where, f[2]));
        rec.scores[a] = detail::parse_double(f[3], "score");
        const long long label = detail::parse_int(f[4], "label");
        if (label < -1 || label > 1)
            throw Error(ErrorKind::Parse, fmt::format("{}: label {} out of range", where, label));
        rec.labels[a] = static_cast<Change>(label);
        filled[it->second][a] = true;
    }
    for (std::size_t r = 0; r < records.size(); ++r)
        for (bool ok : filled[r])
            if (!ok)
                throw Error(ErrorKind::Parse, fmt::format("{}: group ({}, {}) is missing attributes", path.string(),
                                                          records[r].condition, records[r].cause));
    return records;
}

}  // namespace tdc
