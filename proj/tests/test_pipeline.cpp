#include <doctest.h>

#include <fstream>

#include "oracles.hpp"
#include "tdc/error.hpp"
#include "tdc/model_dir.hpp"
#include "tdc/pipeline.hpp"

namespace pl = tdc::pipeline;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

// Small two-condition dataset shared by the cases below.
const std::filesystem::path& tiny_dataset() {
    static const std::filesystem::path dir = [] {
        const auto d = oracle::scratch_dir("pipeline_ds");
        pl::SynthOptions opt;
        opt.out = d;
        opt.seed = 11;
        opt.conditions = 2;
        opt.dataset = {8, 3, 1.0};
        pl::run_synth(opt);
        return d;
    }();
    return dir;
}

pl::FitOptions fit_options(const std::filesystem::path& out, tdc::ProviderKind provider) {
    pl::FitOptions f;
    f.manifest = tiny_dataset() / "manifest.csv";
    f.audio_root = tiny_dataset();
    f.out = out;
    f.provider = provider;
    f.k = 3;
    return f;
}

}  // namespace

TEST_CASE("model directory round trip") {
    const auto dir = oracle::scratch_dir("pipeline_model");
    const auto model = pl::run_fit(fit_options(dir / "m", tdc::ProviderKind::Spectral));
    CHECK(model.reference.size() == 16);
    CHECK(model.config.distance_kind == tdc::DistanceKind::Cosine);
    CHECK(model.config.k == 3);
    for (const char* f : {"config.json", "embeddings.tdce", "embeddings.tdce.ids.csv", "timbre.csv", "normalization.json"})
        CHECK(std::filesystem::exists(dir / "m" / f));

    const auto loaded = tdc::load_model(dir / "m");
    CHECK(loaded.reference == model.reference);
    CHECK(loaded.config.provider_id == "spectral");
    CHECK(loaded.config.created_at == model.config.created_at);

    pl::run_fit(fit_options(dir / "m2", tdc::ProviderKind::Spectral));
    for (const char* f : {"embeddings.tdce", "embeddings.tdce.ids.csv", "timbre.csv", "normalization.json"})
        CHECK(slurp(dir / "m" / f) == slurp(dir / "m2" / f));
    auto c1 = nlohmann::json::parse(slurp(dir / "m" / "config.json"));
    auto c2 = nlohmann::json::parse(slurp(dir / "m2" / "config.json"));
    c1.erase("created_at");
    c2.erase("created_at");
    CHECK(c1 == c2);
    CHECK(c1["count"] == 16);
}

TEST_CASE("inconsistent model directories are rejected") {
    const auto dir = oracle::scratch_dir("pipeline_bad_model");
    pl::run_fit(fit_options(dir / "m", tdc::ProviderKind::Timbre));
    std::ofstream(dir / "m" / "timbre.csv") << "clip_id,sharpness,roughness,boominess,brightness,depth\nx,1,1,1,1,1\n";
    CHECK_THROWS_AS(tdc::load_model(dir / "m"), tdc::Error);
    CHECK_THROWS_AS(tdc::load_model(dir / "missing"), tdc::Error);
}

TEST_CASE("score, ground truth and report") {
    const auto dir = oracle::scratch_dir("pipeline_score");
    pl::run_fit(fit_options(dir / "m", tdc::ProviderKind::Timbre));
    pl::ScoreOptions s;
    s.model = dir / "m";
    s.manifest = tiny_dataset() / "manifest.csv";
    s.audio_root = tiny_dataset();
    s.out = dir / "r.csv";
    const auto results = pl::run_score(s);
    CHECK(results.size() == 2 * 3 + 2 * 4 * 3);
    CHECK(tdc::read_results_csv(dir / "r.csv").size() == results.size());
    for (const auto& r : results) CHECK(r.neighbor_indices.size() == 3);

    s.out = dir / "r2.csv";
    pl::run_score(s);
    CHECK(slurp(dir / "r.csv") == slurp(dir / "r2.csv"));

    s.out = dir / "rg.csv";
    s.global_baseline = true;
    const auto global = pl::run_score(s);
    for (std::size_t i = 0; i < results.size(); ++i) CHECK(global[i].anomaly_score == results[i].anomaly_score);

    s.global_baseline = false;
    s.k = 1000;
    CHECK_THROWS_AS(pl::run_score(s), tdc::Error);
    s.k.reset();
    s.provider = tdc::ProviderKind::Spectral;
    CHECK_THROWS_AS(pl::run_score(s), tdc::Error);

    const auto gt = pl::run_gen_gt({tiny_dataset() / "manifest.csv", tiny_dataset(), dir / "gt.csv"});
    CHECK(gt.records.size() == 8);
    CHECK(gt.stats.groups == 8);

    const auto report = pl::run_eval({dir / "r.csv", dir / "gt.csv", tiny_dataset() / "manifest.csv", dir / "rep.json"});
    CHECK(report.n_clips == results.size());
    const auto j = nlohmann::json::parse(slurp(dir / "rep.json"));
    CHECK(j["n_clips"] == results.size());
}

TEST_CASE("external embeddings") {
    const auto dir = oracle::scratch_dir("pipeline_external");
    const auto manifest = tdc::load_manifest(tiny_dataset() / "manifest.csv");
    std::vector<tdc::Embedding> embs;
    for (const auto& e : manifest) {
        tdc::Embedding x{{}, "external", e.clip_id};
        const double v = e.state == tdc::State::Anomalous ? 5.0 : 0.0;
        x.vector = {v + static_cast<float>(embs.size() % 7) * 0.01f, 1.0, -v};
        embs.push_back(x);
    }
    tdc::write_tdce(dir / "e.tdce", embs);

    auto f = fit_options(dir / "m", tdc::ProviderKind::External);
    CHECK_THROWS_AS(pl::run_fit(f), tdc::Error);
    f.embeddings = dir / "e.tdce";
    const auto model = pl::run_fit(f);
    CHECK(model.reference.dim() == 3);

    pl::ScoreOptions s;
    s.model = dir / "m";
    s.manifest = tiny_dataset() / "manifest.csv";
    s.audio_root = tiny_dataset();
    s.out = dir / "r.csv";
    s.embeddings = dir / "e.tdce";
    const auto results = pl::run_score(s);
    CHECK(results.size() == 30);

    embs.pop_back();
    tdc::write_tdce(dir / "short.tdce", embs);
    s.embeddings = dir / "short.tdce";
    try {
        pl::run_score(s);
        FAIL("expected MissingData");
    } catch (const tdc::Error& e) {
        CHECK(e.kind() == tdc::ErrorKind::MissingData);
    }
}
