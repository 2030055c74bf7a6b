// tdc: anomalous sound detection with timbre-difference labels.
//
//   tdc synth   --out DIR --seed N
//   tdc extract --manifest F --audio-root D --out timbre.csv
//   tdc fit     --manifest F --audio-root D --provider spectral --out MODEL
//   tdc score   --model MODEL --manifest F --audio-root D --out results.csv
//   tdc gen-gt  --manifest F --audio-root D --out gt.csv
//   tdc eval    --results R --gt G --manifest F --out report.json

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "tdc/error.hpp"
#include "tdc/pipeline.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 1;

template <typename... Args>
void log(fmt::format_string<Args...> format, Args&&... args) {
    fmt::print(stderr, "[tdc] {}\n", fmt::format(format, std::forward<Args>(args)...));
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

tdc::ProviderKind provider_from(const std::string& name) {
    const auto p = tdc::parse_provider_kind(name);
    if (!p) throw UsageError(fmt::format("unknown provider '{}'", name));
    return *p;
}

std::optional<tdc::DistanceKind> distance_from(const std::string& name) {
    if (name.empty()) return std::nullopt;
    const auto d = tdc::parse_distance_kind(name);
    if (!d) throw UsageError(fmt::format("unknown distance '{}'", name));
    return d;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint anomalous sound detection and timbre-difference capturing"};
    app.require_subcommand(1);

    // synth
    tdc::pipeline::SynthOptions synth;
    std::string synth_out;
    std::string causes = "default";
    auto* cmd_synth = app.add_subcommand("synth", "Generate the synthetic machine-sound benchmark");
    cmd_synth->add_option("--out", synth_out, "Output directory")->required();
    cmd_synth->add_option("--seed", synth.seed, "Master seed")->required();
    cmd_synth->add_option("--conditions", synth.conditions, "Number of conditions (1-6)")->capture_default_str();
    cmd_synth->add_option("--causes", causes, "'default' or comma-separated cause ids")->capture_default_str();
    cmd_synth->add_option("--train-per-cond", synth.dataset.train_per_condition, "Training clips per condition")
        ->capture_default_str();
    cmd_synth->add_option("--test-per-cond", synth.dataset.test_per_condition,
                          "Test clips per condition and per (condition, cause)")
        ->capture_default_str();
    cmd_synth->add_option("--duration", synth.dataset.duration, "Clip duration in seconds")->capture_default_str();

    // extract
    tdc::pipeline::ExtractOptions extract;
    std::string ex_manifest, ex_root, ex_out;
    auto* cmd_extract = app.add_subcommand("extract", "Export timbre metrics for every manifest clip");
    cmd_extract->add_option("--manifest", ex_manifest)->required();
    cmd_extract->add_option("--audio-root", ex_root)->required();
    cmd_extract->add_option("--out", ex_out)->required();

    // fit
    tdc::pipeline::FitOptions fit;
    std::string fit_manifest, fit_root, fit_out, fit_provider, fit_embeddings, fit_distance;
    auto* cmd_fit = app.add_subcommand("fit", "Build a model directory from normal training clips");
    cmd_fit->add_option("--manifest", fit_manifest)->required();
    cmd_fit->add_option("--audio-root", fit_root)->required();
    cmd_fit->add_option("--provider", fit_provider, "timbre | spectral | external")->required();
    cmd_fit->add_option("--embeddings", fit_embeddings, "TDCE file for the external provider");
    cmd_fit->add_option("--out", fit_out, "Model directory")->required();
    cmd_fit->add_option("--distance", fit_distance, "euclidean | cosine");
    cmd_fit->add_option("--k", fit.k)->capture_default_str();
    cmd_fit->add_option("--t", fit.t)->capture_default_str();

    // score
    tdc::pipeline::ScoreOptions score;
    std::string sc_model, sc_manifest, sc_root, sc_out, sc_provider, sc_embeddings, sc_distance, sc_baseline;
    std::optional<int> sc_k;
    std::optional<double> sc_t;
    auto* cmd_score = app.add_subcommand("score", "Score test clips against a model");
    cmd_score->add_option("--model", sc_model)->required();
    cmd_score->add_option("--manifest", sc_manifest)->required();
    cmd_score->add_option("--audio-root", sc_root)->required();
    cmd_score->add_option("--out", sc_out)->required();
    cmd_score->add_option("--provider", sc_provider, "Must match the model's provider if given");
    cmd_score->add_option("--embeddings", sc_embeddings, "TDCE file for the external provider");
    cmd_score->add_option("--k", sc_k);
    cmd_score->add_option("--t", sc_t);
    cmd_score->add_option("--distance", sc_distance);
    cmd_score->add_option("--baseline", sc_baseline, "'global' compares against every training clip");

    // gen-gt
    tdc::pipeline::GenGtOptions gengt;
    std::string gt_manifest, gt_root, gt_out, gt_stats_out;
    auto* cmd_gengt = app.add_subcommand("gen-gt", "Generate per-(condition, cause) ground-truth labels");
    cmd_gengt->add_option("--manifest", gt_manifest)->required();
    cmd_gengt->add_option("--audio-root", gt_root)->required();
    cmd_gengt->add_option("--t-prime", gengt.t_prime)->capture_default_str();
    cmd_gengt->add_option("--out", gt_out)->required();
    cmd_gengt->add_option("--stats-out", gt_stats_out, "Also write the statistics JSON to this file");

    // eval
    tdc::pipeline::EvalOptions eval;
    std::string ev_results, ev_gt, ev_manifest, ev_out;
    auto* cmd_eval = app.add_subcommand("eval", "Detection AUC and class-balanced MAE");
    cmd_eval->add_option("--results", ev_results)->required();
    cmd_eval->add_option("--gt", ev_gt)->required();
    cmd_eval->add_option("--manifest", ev_manifest)->required();
    cmd_eval->add_option("--out", ev_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (cmd_synth->parsed()) {
            synth.out = synth_out;
            if (causes != "default") synth.causes = CLI::detail::split(causes, ',');
            const auto ds = tdc::pipeline::run_synth(synth);
            log("synth: wrote {} clips to {} (seed {})", ds.manifest.size(), synth.out.string(), synth.seed);
        } else if (cmd_extract->parsed()) {
            extract = {ex_manifest, ex_root, ex_out};
            tdc::pipeline::run_extract(extract);
            log("extract: wrote {}", ex_out);
        } else if (cmd_fit->parsed()) {
            fit.manifest = fit_manifest;
            fit.audio_root = fit_root;
            fit.out = fit_out;
            fit.provider = provider_from(fit_provider);
            if (fit.provider == tdc::ProviderKind::External && fit_embeddings.empty())
                throw UsageError("--provider external requires --embeddings");
            if (!fit_embeddings.empty()) fit.embeddings = fit_embeddings;
            fit.distance = distance_from(fit_distance);
            const auto model = tdc::pipeline::run_fit(fit);
            log("fit: {} training clips, provider {}, distance {}, k {}, t {}", model.reference.size(),
                model.config.provider_id, tdc::to_string(model.config.distance_kind), model.config.k,
                model.config.t);
        } else if (cmd_score->parsed()) {
            score.model = sc_model;
            score.manifest = sc_manifest;
            score.audio_root = sc_root;
            score.out = sc_out;
            if (!sc_provider.empty()) score.provider = provider_from(sc_provider);
            if (!sc_embeddings.empty()) score.embeddings = sc_embeddings;
            score.k = sc_k;
            score.t = sc_t;
            score.distance = distance_from(sc_distance);
            if (!sc_baseline.empty() && sc_baseline != "global")
                throw UsageError(fmt::format("unknown baseline '{}'", sc_baseline));
            score.global_baseline = sc_baseline == "global";
            const auto results = tdc::pipeline::run_score(score);
            log("score: wrote {} results to {}", results.size(), sc_out);
        } else if (cmd_gengt->parsed()) {
            gengt.manifest = gt_manifest;
            gengt.audio_root = gt_root;
            gengt.out = gt_out;
            log("gen-gt: t_prime: {}", gengt.t_prime);
            const auto out = tdc::pipeline::run_gen_gt(gengt);
            const std::string stats = tdc::to_json(out.stats).dump();
            if (!gt_stats_out.empty()) {
                std::ofstream f(gt_stats_out);
                f << stats << '\n';
            }
            std::cout << stats << std::endl;
            log("gen-gt: wrote {} groups to {}", out.records.size(), gt_out);
        } else if (cmd_eval->parsed()) {
            eval = {ev_results, ev_gt, ev_manifest, ev_out};
            const auto report = tdc::pipeline::run_eval(eval);
            log("eval: detection_auc {:.4f}, mean_mae {:.4f} over {} clips", report.detection_auc,
                report.mean_mae, report.n_clips);
        }
    } catch (const UsageError& e) {
        log("usage error: {}", e.what());
        return kExitUsage;
    } catch (const tdc::Error& e) {
        log("error ({}): {}", tdc::to_string(e.kind()), e.what());
        return kExitFailure;
    } catch (const std::exception& e) {
        log("error: {}", e.what());
        return kExitFailure;
    }
    return 0;
}
