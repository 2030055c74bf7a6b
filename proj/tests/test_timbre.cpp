#include <doctest.h>

#include <cmath>
#include <fstream>

#include "oracles.hpp"
#include "tdc/error.hpp"
#include "tdc/spectral.hpp"
#include "tdc/synth.hpp"
#include "tdc/timbre.hpp"

using tdc::AudioClip;

namespace {

AudioClip mix(const std::vector<std::pair<double, double>>& tones, double seconds = 1.0) {
    std::vector<double> x(static_cast<std::size_t>(seconds * 16000), 0.0);
    for (const auto& [f, a] : tones) {
        const auto s = oracle::sine(f, a, seconds, 16000);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += s[i];
    }
    return AudioClip(x, 16000);
}

// Random-phase multisine on a 1 Hz grid over [lo, hi).
AudioClip band_noise(double lo, double hi, std::uint64_t seed, double target_rms) {
    const std::size_t n = 16000;
    std::vector<double> y(n, 0.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ph(0.0, 2 * std::numbers::pi);
    for (double f = lo; f < hi; f += 1.0) {
        const double p = ph(rng);
        for (std::size_t i = 0; i < n; ++i) y[i] += std::sin(2 * std::numbers::pi * f * i / 16000.0 + p);
    }
    const double r = oracle::rms(y);
    for (double& v : y) v *= target_rms / r;
    return AudioClip(y, 16000);
}

}  // namespace

TEST_CASE("attribute names") {
    CHECK(tdc::attribute_name(tdc::TimbreAttribute::Sharpness) == "sharpness");
    CHECK(tdc::attribute_name(tdc::TimbreAttribute::Depth) == "depth");
    CHECK(tdc::parse_attribute("boominess") == tdc::TimbreAttribute::Boominess);
    CHECK_FALSE(tdc::parse_attribute("loudness").has_value());
    CHECK(tdc::change_from_int(-1) == tdc::Change::Decreased);
    CHECK_THROWS_AS(tdc::change_from_int(2), tdc::Error);
}

TEST_CASE("brightness of lines") {
    CHECK(std::abs(tdc::brightness(oracle::sine_clip(1000.0)) - 1000.0) <= 5.0);
    CHECK(std::abs(tdc::brightness(mix({{1000.0, 0.3}, {3000.0, 0.3}})) - 2000.0) <= 20.0);
    const auto c = oracle::sine_clip(1234.0);
    CHECK(tdc::brightness(c.scaled(0.5)) == doctest::Approx(tdc::brightness(c)).epsilon(1e-12));
}

TEST_CASE("sharpness ordering and degenerate cases") {
    const auto high = band_noise(3800.0, 4200.0, 1, 0.1);
    const auto low = band_noise(250.0, 350.0, 2, 0.1);
    CHECK(tdc::sharpness(high) > tdc::sharpness(low));
    CHECK(oracle::rel_diff(tdc::sharpness(high.scaled(2.0)), tdc::sharpness(high)) < 1e-9);

    std::vector<double> bands(22, 0.0);
    bands[4] = 7.0;
    CHECK(tdc::metrics::sharpness_from_band_powers(bands) == 5.0);
}

TEST_CASE("sharpness weighting above band 14") {
    std::vector<double> bands(22, 0.0);
    bands[19] = 1.0;  // z = 20
    CHECK(tdc::metrics::sharpness_from_band_powers(bands) == doctest::Approx(20.0 * std::exp(0.171 * 6.0)));
}

TEST_CASE("roughness responds to 70 Hz modulation") {
    const auto steady = oracle::sine_clip(1000.0);
    const double r0 = tdc::roughness(steady);
    CHECK(r0 < 0.02);

    std::vector<double> x(16000);
    for (int i = 0; i < 16000; ++i) {
        const double t = i / 16000.0;
        x[i] = 0.4 * (1.0 + std::sin(2 * std::numbers::pi * 70 * t)) * std::sin(2 * std::numbers::pi * 1000 * t);
    }
    const AudioClip am(x, 16000);
    const double r1 = tdc::roughness(am);
    CHECK(r1 > 5.0 * r0);
}

TEST_CASE("roughness is gain-invariant on broadband input") {
    // Bands with numerically empty envelopes see the 1e-12 guard, so the
    // property is checked on a clip with energy in every band.
    auto x = oracle::white_noise(16000, 12, 0.05);
    for (int i = 0; i < 16000; ++i) x[i] *= 1.0 + 0.8 * std::sin(2 * std::numbers::pi * 70 * i / 16000.0);
    const AudioClip clip(x, 16000);
    const double r = tdc::roughness(clip);
    for (double c : {0.25, 0.5, 2.0, 4.0}) CHECK(oracle::rel_diff(tdc::roughness(clip.scaled(c)), r) < 1e-9);
}

TEST_CASE("modulation index of an analytic AM envelope") {
    const int rate = 16000;
    std::vector<double> env(rate);
    for (int i = 0; i < rate; ++i) env[i] = 1.0 + std::sin(2 * std::numbers::pi * 70 * i / rate);
    CHECK(tdc::metrics::modulation_index(env, rate) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    std::vector<double> flat(rate, 2.0);
    CHECK(tdc::metrics::modulation_index(flat, rate) < 1e-12);
    // 10 Hz and 400 Hz components are outside the roughness band.
    for (int i = 0; i < rate; ++i)
        env[i] = 1.0 + 0.5 * std::sin(2 * std::numbers::pi * 10 * i / rate) + 0.3 * std::sin(2 * std::numbers::pi * 400 * i / rate);
    CHECK(tdc::metrics::modulation_index(env, rate) < 1e-9);
}

TEST_CASE("roughness needs a quarter second") {
    try {
        tdc::roughness(oracle::sine_clip(1000.0, 0.5, 0.2));
        FAIL("expected TooShort");
    } catch (const tdc::Error& e) {
        CHECK(e.kind() == tdc::ErrorKind::TooShort);
    }
}

TEST_CASE("boominess") {
    // 156.25 Hz sits on an FFT bin centre, keeping Hann leakage out of the
    // neighbouring bands.
    CHECK(tdc::boominess(oracle::sine_clip(156.25)) >= 0.95);
    CHECK(tdc::boominess(oracle::sine_clip(4000.0)) <= 0.05);

    auto x = oracle::white_noise(32000, 4);
    const AudioClip noise(x, 16000);
    tdc::synth::apply_transform(x, 16000, tdc::synth::LowShelf{300.0, 12.0}, 0);
    CHECK(tdc::boominess(AudioClip(x, 16000)) > tdc::boominess(noise));
}

TEST_CASE("boominess from band powers") {
    std::vector<double> bands(22, 1.0);
    CHECK(tdc::metrics::boominess_from_band_powers(bands) == doctest::Approx(3.0 / 22.0));
    const auto n = tdc::metrics::specific_loudness(std::vector<double>{1.0, 2.0});
    CHECK(n[1] == std::pow(2.0, 0.23));
}

TEST_CASE("depth") {
    CHECK(tdc::depth(oracle::sine_clip(100.0)) >= 0.95);
    CHECK(tdc::depth(oracle::sine_clip(1000.0)) <= 0.05);
    CHECK(std::abs(tdc::depth(mix({{100.0, 0.3}, {1000.0, 0.3}})) - 0.5) <= 0.05);
}

TEST_CASE("silent input is rejected") {
    const AudioClip silent(std::vector<double>(16000, 0.0), 16000);
    for (auto fn : {&tdc::brightness, &tdc::sharpness, &tdc::roughness, &tdc::boominess, &tdc::depth}) {
        try {
            fn(silent);
            FAIL("expected SilentInput");
        } catch (const tdc::Error& e) {
            CHECK(e.kind() == tdc::ErrorKind::SilentInput);
        }
    }
}

TEST_CASE("timbre vector matches the individual metrics and its invariants") {
    const auto cond = tdc::synth::default_benchmark_specs().conditions[1];
    const auto clip = tdc::synth::generate_clip(cond, nullptr, 1.0, 42);
    const auto v = tdc::compute_timbre_vector(clip);
    using A = tdc::TimbreAttribute;
    CHECK(v[A::Brightness] == tdc::brightness(clip));
    CHECK(v[A::Sharpness] == tdc::sharpness(clip));
    CHECK(v[A::Roughness] == tdc::roughness(clip));
    CHECK(v[A::Boominess] == tdc::boominess(clip));
    CHECK(v[A::Depth] == tdc::depth(clip));
    CHECK((v[A::Boominess] >= 0.0 && v[A::Boominess] <= 1.0));
    CHECK((v[A::Depth] >= 0.0 && v[A::Depth] <= 1.0));
    CHECK(v[A::Roughness] >= 0.0);
    CHECK((v[A::Brightness] > 0.0 && v[A::Brightness] <= 8000.0));
    CHECK(tdc::compute_timbre_vector(clip) == v);
    const auto s = tdc::compute_timbre_vector(clip.scaled(2.0));
    for (std::size_t l = 0; l < tdc::kNumAttributes; ++l) CHECK(oracle::rel_diff(s.values[l], v.values[l]) < 1e-9);
}

TEST_CASE("timbre csv round trip") {
    const auto dir = oracle::scratch_dir("timbre_csv");
    std::vector<std::string> ids = {"a", "b,c"};
    std::vector<tdc::TimbreVector> vecs(2);
    vecs[0].values = {1.0 / 3.0, 0.1, 0.2, 1234.5678901234, 0.9};
    vecs[1].values = {2.0, 1e-7, 0.0, 99.0, 1.0};
    tdc::write_timbre_csv(dir / "t9.csv", ids, vecs);
    tdc::write_timbre_csv(dir / "t17.csv", ids, vecs, 17);
    const auto t9 = tdc::read_timbre_csv(dir / "t9.csv");
    const auto t17 = tdc::read_timbre_csv(dir / "t17.csv");
    CHECK(t9.clip_ids == ids);
    CHECK(t17.vectors == vecs);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t l = 0; l < 5; ++l) CHECK(oracle::rel_diff(t9.vectors[i].values[l], vecs[i].values[l]) < 1e-8);
    std::ifstream f(dir / "t9.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header == "clip_id,sharpness,roughness,boominess,brightness,depth");
}
