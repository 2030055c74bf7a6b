#include "tdc/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "fft.hpp"
#include "tdc/error.hpp"

namespace tdc {

double Spectrogram::mean_frame_power() const {
    if (frames == 0) return 0.0;
    double total = 0.0;
    for (double p : power) total += p;
    return total / static_cast<double>(frames);
}

Spectrogram stft_power(const AudioClip& clip, std::size_t frame_len, std::size_t hop) {
    if (frame_len == 0 || !std::has_single_bit(frame_len))
        throw Error(ErrorKind::InvalidArgument, fmt::format("frame length {} is not a power of two", frame_len));
    if (hop == 0 || hop > frame_len)
        throw Error(ErrorKind::InvalidArgument, fmt::format("hop {} must be in [1, {}]", hop, frame_len));
    if (clip.size() < frame_len)
        throw Error(ErrorKind::TooShort, fmt::format("clip of {} samples is shorter than one frame ({})",
                                                     clip.size(), frame_len));

    const auto x = clip.samples();
    std::vector<double> window(frame_len);
    for (std::size_t n = 0; n < frame_len; ++n)
        window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                         static_cast<double>(frame_len));

    Spectrogram spec;
    spec.frames = 1 + (clip.size() - frame_len) / hop;
    spec.bins = frame_len / 2 + 1;
    spec.power.resize(spec.frames * spec.bins);
    spec.bin_freqs.resize(spec.bins);
    const double rate = clip.sample_rate();
    for (std::size_t k = 0; k < spec.bins; ++k)
        spec.bin_freqs[k] = static_cast<double>(k) * rate / static_cast<double>(frame_len);
    spec.frame_rate = rate / static_cast<double>(hop);

    std::vector<double> buf(frame_len);
    for (std::size_t f = 0; f < spec.frames; ++f) {
        const std::size_t off = f * hop;
        for (std::size_t n = 0; n < frame_len; ++n) buf[n] = x[off + n] * window[n];
        const auto bins = detail::rfft(buf);
        double* row = spec.power.data() + f * spec.bins;
        for (std::size_t k = 0; k < spec.bins; ++k) row[k] = std::norm(bins[k]);
    }
    return spec;
}

BandEdges usable_bark_bands(double nyquist) {
    BandEdges bands;
    for (std::size_t b = 0; b + 1 < kBarkEdges.size(); ++b) {
        const double lo = kBarkEdges[b];
        if (lo >= nyquist) break;
        bands.emplace_back(lo, std::min(kBarkEdges[b + 1], nyquist));
    }
    return bands;
}

namespace {

// Bin membership: lo <= f < hi, and f == hi when hi is the Nyquist frequency.
bool in_band(double f, double lo, double hi, double nyquist) {
    return f >= lo && (f < hi || (hi >= nyquist && f <= nyquist));
}

}  // namespace

std::vector<double> BarkBandPowers::time_average() const {
    std::vector<double> avg(bands(), 0.0);
    if (frames == 0) return avg;
    for (std::size_t f = 0; f < frames; ++f)
        for (std::size_t b = 0; b < bands(); ++b) avg[b] += at(f, b);
    for (double& v : avg) v /= static_cast<double>(frames);
    return avg;
}

BarkBandPowers bark_band_powers(const Spectrogram& spec) {
    const double nyquist = spec.bin_freqs.empty() ? 0.0 : spec.bin_freqs.back();
    BarkBandPowers out;
    out.edges = usable_bark_bands(nyquist);
    out.frames = spec.frames;
    const std::size_t n_bands = out.edges.size();

    std::vector<std::vector<std::size_t>> members(n_bands);
    for (std::size_t b = 0; b < n_bands; ++b) {
        const auto [lo, hi] = out.edges[b];
        for (std::size_t k = 0; k < spec.bins; ++k)
            if (in_band(spec.bin_freqs[k], lo, hi, nyquist)) members[b].push_back(k);
        out.bin_counts.push_back(members[b].size());
    }

    out.power.assign(spec.frames * n_bands, 0.0);
    for (std::size_t f = 0; f < spec.frames; ++f) {
        const auto row = spec.frame(f);
        for (std::size_t b = 0; b < n_bands; ++b) {
            if (members[b].empty()) continue;
            double acc = 0.0;
            for (std::size_t k : members[b]) acc += row[k];
            out.power[f * n_bands + b] = acc / static_cast<double>(members[b].size());
        }
    }
    return out;
}

BandDecomposition band_envelopes(const AudioClip& clip, const BandEdges& band_edges) {
    const std::size_t n = clip.size();
    const double rate = clip.sample_rate();
    const double nyquist = rate / 2.0;
    const auto spectrum = detail::rfft(clip.samples());

    BandDecomposition out;
    out.band_edges = band_edges;
    out.band_envelopes.reserve(band_edges.size());

    std::vector<detail::Complex> analytic(n);
    for (const auto& [lo, hi] : band_edges) {
        if (!(lo > 0.0) || hi > nyquist || !(hi > lo))
            throw Error(ErrorKind::InvalidArgument,
                        fmt::format("band {}-{} Hz must lie within (0, {}]", lo, hi, nyquist));
        std::fill(analytic.begin(), analytic.end(), detail::Complex{});
        std::size_t members = 0;
        for (std::size_t k = 0; k < spectrum.size(); ++k) {
            const double f = static_cast<double>(k) * rate / static_cast<double>(n);
            if (!in_band(f, lo, hi, nyquist)) continue;
            // One-sided spectrum: positive frequencies doubled; Nyquist kept once.
            const bool nyquist_bin = (n % 2 == 0) && k == n / 2;
            analytic[k] = nyquist_bin ? spectrum[k] : 2.0 * spectrum[k];
            ++members;
        }
        if (members == 0)
            throw Error(ErrorKind::EmptyBand, fmt::format("band {}-{} Hz contains no FFT bins", lo, hi));
        const auto signal = detail::ifft(analytic);
        std::vector<double> env(n);
        for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(signal[i]);
        out.band_envelopes.push_back(std::move(env));
    }
    return out;
}

std::vector<double> mel_filterbank(std::size_t n_mels, std::span<const double> bin_freqs,
                                   double fmin, double fmax) {
    if (n_mels == 0 || !(fmax > fmin))
        throw Error(ErrorKind::InvalidArgument, "mel filterbank needs n_mels > 0 and fmax > fmin");
    const auto hz_to_mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
    const auto mel_to_hz = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };

    const double mel_lo = hz_to_mel(fmin);
    const double mel_hi = hz_to_mel(fmax);
    std::vector<double> centers(n_mels + 2);
    for (std::size_t i = 0; i < centers.size(); ++i)
        centers[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                             static_cast<double>(n_mels + 1));

    const std::size_t n_bins = bin_freqs.size();
    std::vector<double> fb(n_mels * n_bins, 0.0);
    for (std::size_t m = 0; m < n_mels; ++m) {
        const double left = centers[m];
        const double mid = centers[m + 1];
        const double right = centers[m + 2];
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double f = bin_freqs[k];
            double w = 0.0;
            if (f > left && f <= mid) w = (f - left) / (mid - left);
            else if (f > mid && f < right) w = (right - f) / (right - mid);
            fb[m * n_bins + k] = w;
        }
    }
    return fb;
}

}  // namespace tdc
