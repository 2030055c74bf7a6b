#include "tdc/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "io_util.hpp"
#include "tdc/error.hpp"

namespace tdc {

void ReferenceSet::validate() const {
    if (embeddings.empty()) throw Error(ErrorKind::Validation, "reference set is empty");
    if (timbre_vectors.size() != embeddings.size() || clip_ids.size() != embeddings.size())
        throw Error(ErrorKind::Validation,
                    fmt::format("reference set lists are misaligned ({} embeddings, {} timbre vectors, {} ids)",
                                embeddings.size(), timbre_vectors.size(), clip_ids.size()));
    const std::size_t d = embeddings.front().dim();
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        if (embeddings[i].provider_id != provider_id)
            throw Error(ErrorKind::Validation,
                        fmt::format("embedding {} has provider '{}', expected '{}'", i,
                                    embeddings[i].provider_id, provider_id));
        if (embeddings[i].dim() != d)
            throw Error(ErrorKind::Validation, fmt::format("embedding {} has dimension {}, expected {}", i,
                                                           embeddings[i].dim(), d));
    }
}

std::vector<NeighborHit> knn(const ReferenceSet& ref, const Embedding& query, int k) {
    if (query.provider_id != ref.provider_id)
        throw Error(ErrorKind::ProviderMismatch,
                    fmt::format("query embedding from '{}' but reference set uses '{}'", query.provider_id,
                                ref.provider_id));
    if (query.dim() != ref.dim())
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("query dimension {} but reference dimension {}", query.dim(), ref.dim()));
    if (k < 1 || static_cast<std::size_t>(k) > ref.size())
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("k = {} must be in [1, {}] (reference set size)", k, ref.size()));

    std::vector<NeighborHit> all(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
        all[i] = {i, distance(std::span<const double>(query.vector),
                              std::span<const double>(ref.embeddings[i].vector), ref.distance_kind)};
    const auto closer = [](const NeighborHit& a, const NeighborHit& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.train_index < b.train_index);
    };
    std::partial_sort(all.begin(), all.begin() + k, all.end(), closer);
    all.resize(static_cast<std::size_t>(k));
    return all;
}

double anomaly_score(std::span<const NeighborHit> hits) {
    if (hits.empty()) throw Error(ErrorKind::InvalidArgument, "anomaly score needs at least one neighbour");
    double sum = 0.0;
    for (const auto& h : hits) sum += h.distance;
    return sum / static_cast<double>(hits.size());
}

double timbre_rank_score(double test_value, std::span<const double> neighbor_values) {
    if (neighbor_values.empty())
        throw Error(ErrorKind::InvalidArgument, "rank score needs at least one neighbour value");
    if (!std::isfinite(test_value))
        throw Error(ErrorKind::InvalidArgument, "rank score: non-finite test value");
    // Twice the U statistic, kept integral so the result is exact.
    long long twice_u = 0;
    for (double v : neighbor_values) {
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "rank score: non-finite neighbour value");
        if (v < test_value) twice_u += 2;
        else if (v == test_value) twice_u += 1;
    }
    return static_cast<double>(twice_u) / (2.0 * static_cast<double>(neighbor_values.size()));
}

Change threshold_label(double score, double t) {
    if (!(t >= 0.0 && t < 0.5))
        throw Error(ErrorKind::InvalidArgument, fmt::format("threshold t = {} must be in [0, 0.5)", t));
    if (std::isnan(score)) throw Error(ErrorKind::InvalidArgument, "threshold_label: NaN score");
    if (score <= t) return Change::Decreased;
    if (score >= 1.0 - t) return Change::Increased;
    return Change::Unchanged;
}

TimbreDiffResult score_clip(const ReferenceSet& ref, const Embedding& query_embedding,
                            const TimbreVector& query_timbre, int k, double t) {
    const auto hits = knn(ref, query_embedding, k);
    TimbreDiffResult result;
    result.clip_id = query_embedding.clip_id;
    result.anomaly_score = anomaly_score(hits);
    result.neighbor_indices.reserve(hits.size());
    for (const auto& h : hits) result.neighbor_indices.push_back(h.train_index);

    std::vector<double> neighbor_values(hits.size());
    for (std::size_t a = 0; a < kNumAttributes; ++a) {
        for (std::size_t i = 0; i < hits.size(); ++i)
            neighbor_values[i] = ref.timbre_vectors[hits[i].train_index].values[a];
        result.attribute_scores[a] = timbre_rank_score(query_timbre.values[a], neighbor_values);
        result.attribute_labels[a] = threshold_label(result.attribute_scores[a], t);
    }
    return result;
}

GlobalBaselineResult global_baseline_score(const ReferenceSet& ref, const TimbreVector& query_timbre,
                                           double t) {
    if (ref.timbre_vectors.empty()) throw Error(ErrorKind::Validation, "reference set is empty");
    GlobalBaselineResult out;
    std::vector<double> values(ref.timbre_vectors.size());
    for (std::size_t a = 0; a < kNumAttributes; ++a) {
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = ref.timbre_vectors[i].values[a];
        out.scores[a] = timbre_rank_score(query_timbre.values[a], values);
        out.labels[a] = threshold_label(out.scores[a], t);
    }
    return out;
}

// ------------------------------------------------------------------- CSV

namespace {

std::string results_header() {
    std::string h = "clip_id,anomaly_score";
    for (TimbreAttribute a : kAttributes) h += fmt::format(",{}_score", attribute_name(a));
    for (TimbreAttribute a : kAttributes) h += fmt::format(",{}_label", attribute_name(a));
    return h;
}

}  // namespace

void write_results_csv(const std::filesystem::path& path, std::span<const TimbreDiffResult> results) {
    std::string out = results_header() + "\n";
    for (const auto& r : results) {
        out += detail::csv_escape(r.clip_id);
        out += fmt::format(",{}", r.anomaly_score);
        for (double s : r.attribute_scores) out += fmt::format(",{}", s);
        for (Change c : r.attribute_labels) out += fmt::format(",{}", to_int(c));
        out += '\n';
    }
    detail::write_file_atomic(path, out);
}

std::vector<TimbreDiffResult> read_results_csv(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty() || lines[0] != results_header())
        throw Error(ErrorKind::Parse, fmt::format("{}: bad results CSV header", path.string()));
    std::vector<TimbreDiffResult> results;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto f = detail::split_csv_line(lines[i]);
        if (f.size() != 2 + 2 * kNumAttributes)
            throw Error(ErrorKind::Parse, fmt::format("{}:{}: expected 12 fields", path.string(), i + 1));
        TimbreDiffResult r;
        r.clip_id = f[0];
        r.anomaly_score = detail::parse_double(f[1], "anomaly_score");
        for (std::size_t a = 0; a < kNumAttributes; ++a) {
            r.attribute_scores[a] = detail::parse_double(f[2 + a], "attribute score");
            const long long label = detail::parse_int(f[2 + kNumAttributes + a], "label");
            if (label < -1 || label > 1)
                throw Error(ErrorKind::Parse, fmt::format("{}:{}: label {} out of range", path.string(), i + 1, label));
            r.attribute_labels[a] = static_cast<Change>(label);
        }
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace tdc
