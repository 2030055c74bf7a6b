#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tdc/audio.hpp"

namespace tdc {

inline constexpr std::size_t kDefaultFrameLength = 1024;
inline constexpr std::size_t kDefaultHop = 512;

/// One-sided power spectrogram, row-major [frames x bins].
struct Spectrogram {
    std::vector<double> power;
    std::size_t frames = 0;
    std::size_t bins = 0;
    std::vector<double> bin_freqs;
    double frame_rate = 0.0;

    std::span<const double> frame(std::size_t i) const {
        return {power.data() + i * bins, bins};
    }
    double at(std::size_t frame_index, std::size_t bin) const {
        return power[frame_index * bins + bin];
    }
    /// Mean over frames of the summed one-sided power.
    double mean_frame_power() const;
};

/// Hann-windowed (periodic) STFT power. bin_freqs[i] = i * rate / frame_len.
Spectrogram stft_power(const AudioClip& clip, std::size_t frame_len = kDefaultFrameLength,
                       std::size_t hop = kDefaultHop);

using BandEdges = std::vector<std::pair<double, double>>;

/// Zwicker critical-band edges in Hz (25 edges, 24 bands).
inline constexpr std::array<double, 25> kBarkEdges = {
    20,   100,  200,  300,  400,  510,  630,  770,  920,  1080, 1270,  1480,  1720,
    2000, 2320, 2700, 3150, 3700, 4400, 5300, 6400, 7700, 9500, 12000, 15500};

/// Bark bands usable at the given Nyquist frequency: bands whose lower edge is
/// below Nyquist, with the band containing Nyquist truncated to it.
BandEdges usable_bark_bands(double nyquist);

struct BarkBandPowers {
    BandEdges edges;
    std::vector<std::size_t> bin_counts;
    std::vector<double> power;  // [frames x bands]
    std::size_t frames = 0;

    std::size_t bands() const noexcept { return edges.size(); }
    double at(std::size_t frame_index, std::size_t band) const {
        return power[frame_index * bands() + band];
    }
    /// Per-band power averaged over frames.
    std::vector<double> time_average() const;
};

/// Per-frame Bark band powers; each band is the mean of its member bins
/// (lower edge inclusive, upper edge exclusive except at Nyquist).
BarkBandPowers bark_band_powers(const Spectrogram& spec);

struct BandDecomposition {
    BandEdges band_edges;
    std::vector<std::vector<double>> band_envelopes;  // [bands][samples]
};

/// Hilbert envelopes of FFT-masked bands over the whole clip.
BandDecomposition band_envelopes(const AudioClip& clip, const BandEdges& band_edges);

/// HTK-mel triangular filterbank over spectrogram bins, row-major [mels x bins].
std::vector<double> mel_filterbank(std::size_t n_mels, std::span<const double> bin_freqs,
                                   double fmin, double fmax);

}  // namespace tdc
