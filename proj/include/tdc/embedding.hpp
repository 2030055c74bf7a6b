#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdc/audio.hpp"
#include "tdc/timbre.hpp"

namespace tdc {

enum class DistanceKind { Euclidean, Cosine };

std::string_view to_string(DistanceKind kind);
std::optional<DistanceKind> parse_distance_kind(std::string_view name);

/// Embedding providers. `timbre` and `spectral` are computed in-process;
/// `external` vectors come from a TDCE file.
enum class ProviderKind { Timbre, Spectral, External };

std::string_view to_string(ProviderKind kind);
std::optional<ProviderKind> parse_provider_kind(std::string_view name);

inline constexpr std::size_t kTimbreEmbeddingDim = kNumAttributes;
inline constexpr std::size_t kMelBands = 40;
inline constexpr std::size_t kSpectralEmbeddingDim = 2 * kMelBands;
inline constexpr double kLogMelFloor = 1e-10;
inline constexpr double kStdFloor = 1e-9;

/// Components are finite. Providers round their output to float32 precision so
/// that vectors survive the TDCE format unchanged.
struct Embedding {
    std::vector<double> vector;
    std::string provider_id;
    std::string clip_id;

    std::size_t dim() const noexcept { return vector.size(); }
    bool operator==(const Embedding&) const = default;
};

struct NormalizationStats {
    std::vector<double> mean;
    std::vector<double> std;

    std::size_t dim() const noexcept { return mean.size(); }
    bool operator==(const NormalizationStats&) const = default;
};

/// Per-dimension mean and population standard deviation (std clamped at 1e-9).
NormalizationStats fit_normalization(std::span<const std::vector<double>> vectors);

/// Z-scores `raw` with `stats` and rounds to float32 precision.
std::vector<double> standardize(std::span<const double> raw, const NormalizationStats& stats);

/// Raw (pre-normalization) spectral features: 40 log-mel band means followed
/// by 40 log-mel band standard deviations over frames.
std::vector<double> spectral_features(const AudioClip& clip);

Embedding embed_timbre(const TimbreVector& vec, const NormalizationStats& stats,
                       std::string clip_id = {});
Embedding embed_spectral(const AudioClip& clip, const NormalizationStats& stats,
                         std::string clip_id = {});

/// Euclidean: ||u - v||. Cosine: 1 - cos(u, v); a zero vector has similarity 0.
double distance(std::span<const double> u, std::span<const double> v, DistanceKind kind);
double distance(const Embedding& u, const Embedding& v, DistanceKind kind);

/// Sidecar path for a TDCE file: `<file>.ids.csv`.
std::filesystem::path ids_sidecar_path(const std::filesystem::path& tdce_path);

/// TDCE layout: "TDCE", u32 version (1), u32 dim, u32 count, then count x dim
/// float32, all little-endian. Writes the sidecar id CSV as well.
void write_tdce(const std::filesystem::path& path, std::span<const Embedding> embeddings);

std::vector<Embedding> import_embeddings(const std::filesystem::path& path,
                                         std::string provider_id = "external");

}  // namespace tdc
