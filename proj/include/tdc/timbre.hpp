#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdc/audio.hpp"
#include "tdc/spectral.hpp"

namespace tdc {

enum class TimbreAttribute { Sharpness = 0, Roughness, Boominess, Brightness, Depth };

inline constexpr std::size_t kNumAttributes = 5;

inline constexpr std::array<TimbreAttribute, kNumAttributes> kAttributes = {
    TimbreAttribute::Sharpness, TimbreAttribute::Roughness, TimbreAttribute::Boominess,
    TimbreAttribute::Brightness, TimbreAttribute::Depth};

/// Lowercase name used in every file format ("sharpness", ...).
std::string_view attribute_name(TimbreAttribute attribute);
std::optional<TimbreAttribute> parse_attribute(std::string_view name);

/// Direction of a timbre difference.
enum class Change : int { Decreased = -1, Unchanged = 0, Increased = 1 };

using LabelVector = std::array<Change, kNumAttributes>;

constexpr int to_int(Change c) noexcept { return static_cast<int>(c); }
Change change_from_int(int value);

struct TimbreVector {
    std::array<double, kNumAttributes> values{};

    double operator[](TimbreAttribute a) const { return values[static_cast<std::size_t>(a)]; }
    double& operator[](TimbreAttribute a) { return values[static_cast<std::size_t>(a)]; }

    bool operator==(const TimbreVector&) const = default;
};

inline constexpr double kSilenceThreshold = 1e-10;
inline constexpr double kMinRoughnessDuration = 0.25;
inline constexpr double kLoudnessExponent = 0.23;

double brightness(const AudioClip& clip);
double sharpness(const AudioClip& clip);
double roughness(const AudioClip& clip);
double boominess(const AudioClip& clip);
double depth(const AudioClip& clip);

/// All five metrics, sharing one STFT.
TimbreVector compute_timbre_vector(const AudioClip& clip);

namespace metrics {

/// Specific loudness per band: time-averaged band power raised to 0.23.
std::vector<double> specific_loudness(std::span<const double> band_powers);

/// Loudness-weighted mean band number (1-based), with the exp(0.171 (z - 14))
/// boost above band 14.
double sharpness_from_band_powers(std::span<const double> band_powers);

/// Loudness share of bands 1-3 (20-300 Hz).
double boominess_from_band_powers(std::span<const double> band_powers);

/// Envelope modulation index: RMS of the 30-150 Hz envelope component over the
/// envelope mean.
double modulation_index(std::span<const double> envelope, int sample_rate);

}  // namespace metrics

/// Timbre CSV: `clip_id,sharpness,roughness,boominess,brightness,depth`.
/// The export format uses 9 significant digits; pass 17 for a lossless file.
void write_timbre_csv(const std::filesystem::path& path, std::span<const std::string> clip_ids,
                      std::span<const TimbreVector> vectors, int significant_digits = 9);

struct TimbreTable {
    std::vector<std::string> clip_ids;
    std::vector<TimbreVector> vectors;
};
TimbreTable read_timbre_csv(const std::filesystem::path& path);

}  // namespace tdc
