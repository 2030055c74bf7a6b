#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "tdc/error.hpp"
#include "tdc/spectral.hpp"

using tdc::AudioClip;

TEST_CASE("1 kHz sine peaks at bin 64") {
    const auto spec = tdc::stft_power(oracle::sine_clip(1000.0));
    CHECK(spec.bins == 513);
    CHECK(spec.bin_freqs[64] == 1000.0);
    CHECK(spec.bin_freqs.back() == 8000.0);
    for (std::size_t f = 0; f < spec.frames; ++f) {
        const auto row = spec.frame(f);
        CHECK(std::max_element(row.begin(), row.end()) - row.begin() == 64);
    }
}

TEST_CASE("zero clip gives zero power") {
    const auto spec = tdc::stft_power(AudioClip(std::vector<double>(4096, 0.0), 16000));
    CHECK(std::all_of(spec.power.begin(), spec.power.end(), [](double p) { return p == 0.0; }));
}

TEST_CASE("white noise framed power matches time-domain power") {
    const auto x = oracle::white_noise(64000, 11, 0.2);
    const auto spec = tdc::stft_power(AudioClip(x, 16000));
    // Hann: sum w^2 = 3N/8. One-sided |X|^2 covers DC..Nyquist once, so the
    // full-spectrum energy is 2*sum - DC - Nyquist.
    const double n = 1024.0;
    double total = 0.0;
    for (std::size_t f = 0; f < spec.frames; ++f) {
        double s = 0.0;
        for (std::size_t b = 0; b < spec.bins; ++b) s += (b == 0 || b + 1 == spec.bins ? 1.0 : 2.0) * spec.at(f, b);
        total += s / n / (3.0 * n / 8.0);
    }
    const double framed = total / static_cast<double>(spec.frames);
    CHECK(oracle::rel_diff(framed, 0.04) < 0.05);
}

TEST_CASE("stft power is gain-quadratic") {
    const AudioClip clip(oracle::white_noise(8000, 5), 16000);
    const auto base = tdc::stft_power(clip);
    for (double c : {0.25, 2.0}) {
        const auto scaled = tdc::stft_power(clip.scaled(c));
        for (std::size_t i = 0; i < base.power.size(); ++i)
            if (base.power[i] > 0.0) CHECK(oracle::rel_diff(scaled.power[i], c * c * base.power[i]) < 1e-9);
    }
}

TEST_CASE("stft preconditions") {
    const AudioClip clip(std::vector<double>(2000, 0.1), 16000);
    CHECK_THROWS_AS(tdc::stft_power(clip, 1000, 500), tdc::Error);
    CHECK_THROWS_AS(tdc::stft_power(clip, 1024, 2048), tdc::Error);
    try {
        tdc::stft_power(AudioClip(std::vector<double>(500, 0.1), 16000));
        FAIL("expected TooShort");
    } catch (const tdc::Error& e) {
        CHECK(e.kind() == tdc::ErrorKind::TooShort);
    }
}

TEST_CASE("bark bands at 16 kHz") {
    const auto bands = tdc::usable_bark_bands(8000.0);
    REQUIRE(bands.size() == 22);
    CHECK(bands.front().first == 20.0);
    CHECK(bands[21].first == 7700.0);
    CHECK(bands[21].second == 8000.0);
}

TEST_CASE("150 Hz tone lands in band 2") {
    const auto bp = tdc::bark_band_powers(tdc::stft_power(oracle::sine_clip(150.0)));
    const auto avg = bp.time_average();
    const double peak = *std::max_element(avg.begin(), avg.end());
    CHECK(avg[1] == peak);
    for (std::size_t z = 0; z < avg.size(); ++z)
        if (z != 1) CHECK(avg[z] < 0.01 * peak);
}

TEST_CASE("flat spectrum gives equal band powers") {
    tdc::Spectrogram spec;
    spec.frames = 2;
    spec.bins = 513;
    spec.power.assign(spec.frames * spec.bins, 3.5);
    for (std::size_t b = 0; b < spec.bins; ++b) spec.bin_freqs.push_back(b * 16000.0 / 1024.0);
    const auto bp = tdc::bark_band_powers(spec);
    for (double p : bp.power) CHECK(oracle::rel_diff(p, 3.5) < 1e-9);
}

TEST_CASE("band powers weighted by bin counts sum to in-band power") {
    const auto spec = tdc::stft_power(AudioClip(oracle::white_noise(16000, 2), 16000));
    const auto bp = tdc::bark_band_powers(spec);
    for (std::size_t f = 0; f < spec.frames; ++f) {
        double direct = 0.0;
        for (std::size_t b = 0; b < spec.bins; ++b)
            if (spec.bin_freqs[b] >= 20.0) direct += spec.at(f, b);
        double weighted = 0.0;
        for (std::size_t z = 0; z < bp.bands(); ++z) weighted += bp.at(f, z) * static_cast<double>(bp.bin_counts[z]);
        CHECK(oracle::rel_diff(weighted, direct) < 1e-9);
    }
}

TEST_CASE("analytic envelope of a steady tone") {
    const auto dec = tdc::band_envelopes(oracle::sine_clip(1000.0, 0.5), {{900.0, 1100.0}, {2000.0, 3000.0}});
    const auto& env = dec.band_envelopes[0];
    REQUIRE(env.size() == 16000);
    const std::size_t trim = 160;
    const auto [lo, hi] = std::minmax_element(env.begin() + trim, env.end() - trim);
    CHECK((*hi - *lo) / 0.5 < 0.02);
    CHECK(std::abs(*lo - 0.5) < 0.01);
    const auto& off = dec.band_envelopes[1];
    CHECK(*std::max_element(off.begin() + trim, off.end() - trim) < 0.005);
}

TEST_CASE("AM tone envelope oscillates") {
    const int rate = 16000;
    std::vector<double> x(rate);
    for (int i = 0; i < rate; ++i) {
        const double t = static_cast<double>(i) / rate;
        x[i] = 0.4 * (1.0 + std::sin(2 * std::numbers::pi * 70 * t)) * std::sin(2 * std::numbers::pi * 1000 * t);
    }
    const auto env = tdc::band_envelopes(AudioClip(x, rate), {{900.0, 1100.0}}).band_envelopes[0];
    const auto [lo, hi] = std::minmax_element(env.begin() + 160, env.end() - 160);
    CHECK(*hi / std::max(*lo, 1e-12) > 10.0);
}

TEST_CASE("band edge checks") {
    const auto clip = oracle::sine_clip(1000.0);
    CHECK_THROWS_AS(tdc::band_envelopes(clip, {{0.0, 100.0}}), tdc::Error);
    CHECK_THROWS_AS(tdc::band_envelopes(clip, {{100.0, 9000.0}}), tdc::Error);
    try {
        tdc::band_envelopes(clip, {{1000.1, 1000.2}});
        FAIL("expected EmptyBand");
    } catch (const tdc::Error& e) {
        CHECK(e.kind() == tdc::ErrorKind::EmptyBand);
    }
}

TEST_CASE("mel filterbank shape") {
    const auto spec = tdc::stft_power(oracle::sine_clip(1000.0));
    const auto fb = tdc::mel_filterbank(40, spec.bin_freqs, 0.0, 8000.0);
    REQUIRE(fb.size() == 40 * spec.bins);
    for (double w : fb) CHECK((w >= 0.0 && w <= 1.0));
    for (std::size_t m = 0; m < 40; ++m) {
        const double s = std::accumulate(fb.begin() + m * spec.bins, fb.begin() + (m + 1) * spec.bins, 0.0);
        CHECK(s > 0.0);
    }
}
