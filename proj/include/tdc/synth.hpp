#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdc/audio.hpp"
#include "tdc/manifest.hpp"
#include "tdc/timbre.hpp"

namespace tdc::synth {

/// A machine operating/recording condition: harmonic stack over a rotation
/// fundamental plus spectrally tilted noise.
struct ConditionSpec {
    std::string condition_id;
    double base_frequency = 120.0;  // Hz, in [30, 400]
    int harmonic_count = 10;
    double harmonic_decay = 0.8;  // amplitude ratio between successive harmonics
    double noise_color = 0.0;     // dB per octave around 1 kHz
    double noise_level = 0.3;     // noise RMS relative to the harmonic stack RMS

    void validate() const;
};

struct AmBuzz {
    double mod_freq = 70.0;
    double depth = 0.8;
};
struct HighShelf {
    double cutoff = 2000.0;
    double gain_db = 12.0;
};
struct LowShelf {
    double cutoff = 250.0;
    double gain_db = 12.0;
};
struct ToneInject {
    double freq = 1000.0;
    double level = 0.2;  // amplitude relative to the clip's RMS
};

using Transform = std::variant<AmBuzz, HighShelf, LowShelf, ToneInject>;

struct AnomalyCauseSpec {
    std::string cause_id;
    Transform transform;
    LabelVector intended_directions{};

    void validate() const;
};

inline constexpr double kDefaultClipDuration = 2.0;
inline constexpr double kPeakLevel = 0.9;

/// Frequency-domain shelf gain in dB at `freq`: full gain on the shelf side,
/// zero on the other, raised-cosine in log-frequency across one third of an
/// octave centred on the cutoff.
double shelf_gain_db(double freq, double cutoff, double gain_db, bool high_shelf);

/// Applies a cause transform to a signal in place (no normalization).
void apply_transform(std::vector<double>& samples, int sample_rate, const Transform& transform,
                     std::uint64_t seed);

/// Harmonic stack + coloured noise (+ cause transform), peak-normalized to 0.9
/// and scaled by a seeded gain in [0.5, 1]. The same (cond, seed) pair gives the
/// same base signal with or without a cause.
AudioClip generate_clip(const ConditionSpec& cond, const AnomalyCauseSpec* cause,
                        double duration, std::uint64_t seed,
                        int sample_rate = kCanonicalSampleRate);

/// 64-bit FNV-1a; stable across platforms and runs.
std::uint64_t stable_hash(std::string_view text);

/// Per-clip seed: master seed XOR stable_hash(clip_id).
std::uint64_t clip_seed(std::uint64_t master_seed, std::string_view clip_id);

struct BenchmarkSpecs {
    std::vector<ConditionSpec> conditions;
    std::vector<AnomalyCauseSpec> causes;
};

/// Three conditions (60/120/240 Hz) and four causes: 70 Hz buzz, +12 dB high
/// shelf at 2 kHz, +12 dB low shelf at 250 Hz, -12 dB high shelf at 2 kHz.
BenchmarkSpecs default_benchmark_specs();

/// `count` conditions; the first three are the defaults. At most six.
std::vector<ConditionSpec> benchmark_conditions(int count);

/// Default causes filtered by id ("default" or empty list means all four).
std::vector<AnomalyCauseSpec> select_causes(std::span<const std::string> cause_ids);

struct DatasetOptions {
    int train_per_condition = 50;
    int test_per_condition = 10;
    double duration = kDefaultClipDuration;
};

struct SynthDataset {
    std::vector<ManifestEntry> manifest;
    std::uint64_t seed = 0;
    BenchmarkSpecs specs;
    DatasetOptions options;
};

/// Writes audio/<clip_id>.wav (16 kHz PCM16), manifest.csv and specs.json under
/// out_dir. Train clips are normal; test clips are normal plus one anomalous set
/// per (condition, cause).
SynthDataset generate_dataset(std::span<const ConditionSpec> conditions,
                              std::span<const AnomalyCauseSpec> causes,
                              const DatasetOptions& options, std::uint64_t seed,
                              const std::filesystem::path& out_dir);

nlohmann::json to_json(const SynthDataset& dataset);

}  // namespace tdc::synth
