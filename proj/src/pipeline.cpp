#include "tdc/pipeline.hpp"

#include <chrono>
#include <map>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "io_util.hpp"
#include "tdc/error.hpp"
#include "tdc/timbre.hpp"

namespace tdc::pipeline {

namespace {

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

std::map<std::string, Embedding> load_external(const std::optional<std::filesystem::path>& path) {
    if (!path)
        throw Error(ErrorKind::InvalidArgument, "the external provider requires --embeddings");
    std::map<std::string, Embedding> by_id;
    for (auto& e : import_embeddings(*path))
        if (!by_id.emplace(e.clip_id, e).second)
            throw Error(ErrorKind::IdMismatch, fmt::format("{}: duplicate clip id '{}'", path->string(), e.clip_id));
    return by_id;
}

const Embedding& external_for(const std::map<std::string, Embedding>& by_id, const std::string& clip_id) {
    const auto it = by_id.find(clip_id);
    if (it == by_id.end())
        throw Error(ErrorKind::MissingData, fmt::format("no external embedding for clip '{}'", clip_id));
    return it->second;
}

void check_threshold(double t) {
    if (!(t >= 0.0 && t < 0.5))
        throw Error(ErrorKind::InvalidArgument, fmt::format("threshold t = {} must be in [0, 0.5)", t));
}

}  // namespace

DistanceKind default_distance(ProviderKind provider) {
    return provider == ProviderKind::Timbre ? DistanceKind::Euclidean : DistanceKind::Cosine;
}

synth::SynthDataset run_synth(const SynthOptions& options) {
    const auto conditions = synth::benchmark_conditions(options.conditions);
    const auto causes = synth::select_causes(options.causes);
    return synth::generate_dataset(conditions, causes, options.dataset, options.seed, options.out);
}

void run_extract(const ExtractOptions& options) {
    const auto entries = load_manifest(options.manifest);
    std::vector<std::string> ids;
    std::vector<TimbreVector> vectors;
    for (const auto& e : entries) {
        ids.push_back(e.clip_id);
        vectors.push_back(compute_timbre_vector(load_canonical(options.audio_root / e.path)));
    }
    write_timbre_csv(options.out, ids, vectors);
}

Model run_fit(const FitOptions& options) {
    check_threshold(options.t);
    if (options.k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
    std::optional<std::map<std::string, Embedding>> external;
    if (options.provider == ProviderKind::External) external = load_external(options.embeddings);

    const auto entries = load_manifest(options.manifest);
    ReferenceSet ref;
    ref.provider_id = std::string(to_string(options.provider));
    ref.distance_kind = options.distance.value_or(default_distance(options.provider));

    std::vector<std::vector<double>> raw;
    for (const auto& e : entries) {
        if (e.split != Split::Train) continue;
        if (e.state != State::Normal)
            throw Error(ErrorKind::Validation, fmt::format("training clip '{}' is anomalous", e.clip_id));
        const AudioClip clip = load_canonical(options.audio_root / e.path);
        const TimbreVector timbre = compute_timbre_vector(clip);
        switch (options.provider) {
        case ProviderKind::Timbre: raw.emplace_back(timbre.values.begin(), timbre.values.end()); break;
        case ProviderKind::Spectral: raw.push_back(spectral_features(clip)); break;
        case ProviderKind::External: raw.push_back(external_for(*external, e.clip_id).vector); break;
        }
        ref.clip_ids.push_back(e.clip_id);
        ref.timbre_vectors.push_back(timbre);
    }
    if (raw.empty()) throw Error(ErrorKind::Validation, "manifest has no training clips");

    ref.normalization = fit_normalization(raw);
    for (std::size_t i = 0; i < raw.size(); ++i)
        ref.embeddings.push_back({standardize(raw[i], ref.normalization), ref.provider_id, ref.clip_ids[i]});

    Model model{{ref.provider_id, ref.distance_kind, options.k, options.t, utc_timestamp(), kToolVersion},
                std::move(ref)};
    save_model(options.out, model);
    return model;
}

std::vector<TimbreDiffResult> run_score(const ScoreOptions& options) {
    Model model = load_model(options.model);
    const auto provider = parse_provider_kind(model.config.provider_id);
    if (!provider)
        throw Error(ErrorKind::Validation, fmt::format("model uses unknown provider '{}'", model.config.provider_id));
    if (options.provider && *options.provider != *provider)
        throw Error(ErrorKind::ProviderMismatch,
                    fmt::format("model was fit with provider '{}' but '{}' was requested", model.config.provider_id,
                                to_string(*options.provider)));
    const int k = options.k.value_or(model.config.k);
    const double t = options.t.value_or(model.config.t);
    check_threshold(t);
    ReferenceSet& ref = model.reference;
    if (options.distance) ref.distance_kind = *options.distance;
    if (k < 1 || static_cast<std::size_t>(k) > ref.size())
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("k = {} must be in [1, {}] (reference set size)", k, ref.size()));

    std::optional<std::map<std::string, Embedding>> external;
    if (*provider == ProviderKind::External) external = load_external(options.embeddings);

    const auto entries = load_manifest(options.manifest);
    std::vector<TimbreDiffResult> results;
    for (const auto& e : entries) {
        if (e.split != Split::Test) continue;
        const AudioClip clip = load_canonical(options.audio_root / e.path);
        const TimbreVector timbre = compute_timbre_vector(clip);
        Embedding query;
        switch (*provider) {
        case ProviderKind::Timbre: query = embed_timbre(timbre, ref.normalization, e.clip_id); break;
        case ProviderKind::Spectral: query = embed_spectral(clip, ref.normalization, e.clip_id); break;
        case ProviderKind::External:
            query = {standardize(external_for(*external, e.clip_id).vector, ref.normalization), ref.provider_id,
                     e.clip_id};
            break;
        }
        TimbreDiffResult r = score_clip(ref, query, timbre, k, t);
        if (options.global_baseline) {
            const auto global = global_baseline_score(ref, timbre, t);
            r.attribute_scores = global.scores;
            r.attribute_labels = global.labels;
        }
        results.push_back(std::move(r));
    }
    write_results_csv(options.out, results);
    return results;
}

GenGtOutput run_gen_gt(const GenGtOptions& options) {
    check_threshold(options.t_prime);
    const auto entries = load_manifest(options.manifest);
    TimbreLookup timbre;
    for (const auto& e : entries) {
        const bool needed = (e.split == Split::Train && e.state == State::Normal) || e.state == State::Anomalous;
        if (!needed) continue;
        timbre.emplace(e.clip_id, compute_timbre_vector(load_canonical(options.audio_root / e.path)));
    }
    GenGtOutput out;
    out.records = generate_ground_truth(entries, timbre, options.t_prime);
    out.stats = ground_truth_statistics(out.records);
    write_ground_truth_csv(options.out, out.records);
    return out;
}

EvalReport run_eval(const EvalOptions& options) {
    const auto results = read_results_csv(options.results);
    const auto records = read_ground_truth_csv(options.ground_truth);
    const auto entries = load_manifest(options.manifest);
    const auto truths = assign_labels(entries, records);
    const EvalReport report = build_report(results, entries, truths);
    detail::write_file_atomic(options.out, to_json(report).dump(2) + "\n");
    return report;
}

}  // namespace tdc::pipeline
