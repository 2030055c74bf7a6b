#include <doctest.h>

#include <fstream>

#include <fmt/format.h>

#include "oracles.hpp"
#include "tdc/error.hpp"
#include "tdc/embedding.hpp"
#include "tdc/knn.hpp"
#include "tdc/synth.hpp"

namespace synth = tdc::synth;
using tdc::TimbreAttribute;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

const synth::AnomalyCauseSpec& cause(const synth::BenchmarkSpecs& s, const std::string& id) {
    return *std::find_if(s.causes.begin(), s.causes.end(), [&](const auto& c) { return c.cause_id == id; });
}

}  // namespace

TEST_CASE("default specs") {
    const auto s = synth::default_benchmark_specs();
    REQUIRE(s.conditions.size() == 3);
    REQUIRE(s.causes.size() == 4);
    CHECK(s.conditions[0].base_frequency == 60.0);
    CHECK(s.conditions[1].base_frequency == 120.0);
    CHECK(s.conditions[2].base_frequency == 240.0);
    CHECK(s.conditions[0].noise_color != s.conditions[1].noise_color);
    for (const auto& c : s.causes)
        CHECK(std::any_of(c.intended_directions.begin(), c.intended_directions.end(),
                          [](tdc::Change d) { return d != tdc::Change::Unchanged; }));
    CHECK(synth::benchmark_conditions(6).size() == 6);
    CHECK_THROWS_AS(synth::benchmark_conditions(7), tdc::Error);
    CHECK(synth::select_causes(std::vector<std::string>{"am_buzz"}).size() == 1);
    CHECK_THROWS_AS(synth::select_causes(std::vector<std::string>{"rattle"}), tdc::Error);
}

TEST_CASE("spec validation") {
    synth::ConditionSpec c{"c", 20.0, 5, 0.8, 0.0, 0.3};
    CHECK_THROWS_AS(c.validate(), tdc::Error);
    c.base_frequency = 100.0;
    c.harmonic_count = 0;
    CHECK_THROWS_AS(c.validate(), tdc::Error);
    c.harmonic_count = 3;
    CHECK_NOTHROW(c.validate());
    CHECK_THROWS_AS(synth::generate_clip(c, nullptr, 0.5, 1), tdc::Error);
}

TEST_CASE("shelf gain mask") {
    CHECK(synth::shelf_gain_db(8000.0, 2000.0, 12.0, true) == 12.0);
    CHECK(synth::shelf_gain_db(500.0, 2000.0, 12.0, true) == 0.0);
    CHECK(synth::shelf_gain_db(2000.0, 2000.0, 12.0, true) == doctest::Approx(6.0));
    CHECK(synth::shelf_gain_db(50.0, 250.0, 12.0, false) == 12.0);
    CHECK(synth::shelf_gain_db(1000.0, 250.0, 12.0, false) == 0.0);
}

TEST_CASE("clips are deterministic, peak-normalized and gain-scaled") {
    const auto s = synth::default_benchmark_specs();
    const auto a = synth::generate_clip(s.conditions[0], nullptr, 1.0, 99);
    CHECK(a == synth::generate_clip(s.conditions[0], nullptr, 1.0, 99));
    CHECK_FALSE(a == synth::generate_clip(s.conditions[0], nullptr, 1.0, 100));
    CHECK(a.size() == 16000);
    double peak = 0.0;
    for (double v : a.samples()) peak = std::max(peak, std::abs(v));
    CHECK(peak >= 0.45 - 1e-12);
    CHECK(peak <= 0.9 + 1e-12);
}

TEST_CASE("causes move their target metrics") {
    const auto s = synth::default_benchmark_specs();
    const auto& cond = s.conditions[1];
    const auto base = tdc::compute_timbre_vector(synth::generate_clip(cond, nullptr, 2.0, 5));
    const auto buzz = tdc::compute_timbre_vector(synth::generate_clip(cond, &cause(s, "am_buzz"), 2.0, 5));
    const auto hi = tdc::compute_timbre_vector(synth::generate_clip(cond, &cause(s, "high_shelf_up"), 2.0, 5));
    const auto lo = tdc::compute_timbre_vector(synth::generate_clip(cond, &cause(s, "low_shelf_up"), 2.0, 5));
    const auto down = tdc::compute_timbre_vector(synth::generate_clip(cond, &cause(s, "high_shelf_down"), 2.0, 5));
    CHECK(buzz[TimbreAttribute::Roughness] > base[TimbreAttribute::Roughness]);
    CHECK(hi[TimbreAttribute::Brightness] > base[TimbreAttribute::Brightness]);
    CHECK(hi[TimbreAttribute::Sharpness] > base[TimbreAttribute::Sharpness]);
    CHECK(lo[TimbreAttribute::Boominess] > base[TimbreAttribute::Boominess]);
    CHECK(lo[TimbreAttribute::Depth] > base[TimbreAttribute::Depth]);
    CHECK(down[TimbreAttribute::Brightness] < base[TimbreAttribute::Brightness]);
    CHECK(down[TimbreAttribute::Sharpness] < base[TimbreAttribute::Sharpness]);
}

TEST_CASE("tone inject adds a line") {
    std::vector<double> x(16000, 0.0);
    x[0] = 1.0;
    synth::apply_transform(x, 16000, synth::ToneInject{1000.0, 1.0}, 3);
    const auto spec = tdc::stft_power(tdc::AudioClip(x, 16000));
    const auto row = spec.frame(5);
    CHECK(std::max_element(row.begin(), row.end()) - row.begin() == 64);
}

TEST_CASE("seeds and hashing") {
    CHECK(synth::stable_hash("") == 0xcbf29ce484222325ULL);
    CHECK(synth::stable_hash("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(synth::clip_seed(7, "x") == (7ULL ^ synth::stable_hash("x")));
}

TEST_CASE("dataset layout and determinism") {
    const auto d1 = oracle::scratch_dir("synth_ds1");
    const auto d2 = oracle::scratch_dir("synth_ds2");
    const auto s = synth::default_benchmark_specs();
    const synth::DatasetOptions opt{4, 2, 1.0};
    const std::vector<synth::ConditionSpec> conds(s.conditions.begin(), s.conditions.begin() + 2);
    const auto ds = synth::generate_dataset(conds, s.causes, opt, 7, d1);
    synth::generate_dataset(conds, s.causes, opt, 7, d2);
    CHECK(ds.manifest.size() == 2 * 4 + 2 * 2 + 2 * 4 * 2);
    for (const auto& e : ds.manifest) {
        if (e.split == tdc::Split::Train) CHECK(e.state == tdc::State::Normal);
        CHECK(std::filesystem::exists(d1 / e.path));
        CHECK(slurp(d1 / e.path) == slurp(d2 / e.path));
    }
    CHECK(slurp(d1 / "manifest.csv") == slurp(d2 / "manifest.csv"));
    CHECK(slurp(d1 / "specs.json") == slurp(d2 / "specs.json"));
    CHECK(tdc::load_manifest(d1 / "manifest.csv") == ds.manifest);
    const auto j = nlohmann::json::parse(slurp(d1 / "specs.json"));
    CHECK(j["seed"] == 7);
}

TEST_CASE("normal clips cluster by condition in spectral space") {
    const auto s = synth::default_benchmark_specs();
    std::vector<std::vector<double>> train_raw, test_raw;
    std::vector<std::size_t> train_cond, test_cond;
    for (std::size_t c = 0; c < s.conditions.size(); ++c) {
        for (int i = 0; i < 50; ++i) {
            train_raw.push_back(tdc::spectral_features(
                synth::generate_clip(s.conditions[c], nullptr, 2.0, synth::clip_seed(1, fmt::format("tr{}_{}", c, i)))));
            train_cond.push_back(c);
        }
        for (int i = 0; i < 10; ++i) {
            test_raw.push_back(tdc::spectral_features(
                synth::generate_clip(s.conditions[c], nullptr, 2.0, synth::clip_seed(1, fmt::format("te{}_{}", c, i)))));
            test_cond.push_back(c);
        }
    }
    const auto stats = tdc::fit_normalization(train_raw);
    tdc::ReferenceSet ref;
    ref.provider_id = "spectral";
    ref.distance_kind = tdc::DistanceKind::Cosine;
    for (std::size_t i = 0; i < train_raw.size(); ++i) {
        ref.embeddings.push_back({tdc::standardize(train_raw[i], stats), "spectral", ""});
        ref.timbre_vectors.emplace_back();
        ref.clip_ids.push_back(std::to_string(i));
    }
    for (std::size_t q = 0; q < test_raw.size(); ++q) {
        const auto hits = tdc::knn(ref, {tdc::standardize(test_raw[q], stats), "spectral", ""}, 10);
        const auto same = std::count_if(hits.begin(), hits.end(),
                                        [&](const auto& h) { return train_cond[h.train_index] == test_cond[q]; });
        CHECK(same >= 8);
    }
}
