#include "tdc/timbre.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "fft.hpp"
#include "io_util.hpp"
#include "tdc/error.hpp"

namespace tdc {

std::string_view attribute_name(TimbreAttribute attribute) {
    switch (attribute) {
    case TimbreAttribute::Sharpness: return "sharpness";
    case TimbreAttribute::Roughness: return "roughness";
    case TimbreAttribute::Boominess: return "boominess";
    case TimbreAttribute::Brightness: return "brightness";
    case TimbreAttribute::Depth: return "depth";
    }
    return "unknown";
}

std::optional<TimbreAttribute> parse_attribute(std::string_view name) {
    for (TimbreAttribute a : kAttributes)
        if (attribute_name(a) == name) return a;
    return std::nullopt;
}

Change change_from_int(int value) {
    if (value < -1 || value > 1)
        throw Error(ErrorKind::InvalidArgument, fmt::format("label {} is not in {{-1, 0, 1}}", value));
    return static_cast<Change>(value);
}

namespace metrics {

namespace {
constexpr double kModulationLow = 30.0;
constexpr double kModulationHigh = 150.0;
constexpr double kModulationEpsilon = 1e-12;
constexpr std::size_t kBoomBands = 3;
constexpr double kDepthCutoff = 200.0;
}  // namespace

std::vector<double> specific_loudness(std::span<const double> band_powers) {
    std::vector<double> loud(band_powers.size());
    for (std::size_t b = 0; b < band_powers.size(); ++b)
        loud[b] = std::pow(band_powers[b], kLoudnessExponent);
    return loud;
}

double sharpness_from_band_powers(std::span<const double> band_powers) {
    const auto loud = specific_loudness(band_powers);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t b = 0; b < loud.size(); ++b) {
        const double z = static_cast<double>(b + 1);
        const double g = z <= 14.0 ? 1.0 : std::exp(0.171 * (z - 14.0));
        num += loud[b] * g * z;
        den += loud[b];
    }
    if (!(den > 0.0)) throw Error(ErrorKind::SilentInput, "silent input: no Bark-band loudness");
    return num / den;
}

double boominess_from_band_powers(std::span<const double> band_powers) {
    const auto loud = specific_loudness(band_powers);
    double low = 0.0;
    double total = 0.0;
    for (std::size_t b = 0; b < loud.size(); ++b) {
        if (b < kBoomBands) low += loud[b];
        total += loud[b];
    }
    if (!(total > 0.0)) throw Error(ErrorKind::SilentInput, "silent input: no Bark-band loudness");
    return low / total;
}

double modulation_index(std::span<const double> envelope, int sample_rate) {
    const std::size_t n = envelope.size();
    if (n == 0) return 0.0;
    const auto spec = detail::rfft(envelope);
    const double nd = static_cast<double>(n);
    const double mean = spec[0].real() / nd;
    // Parseval over the retained positive-frequency bins of a real signal.
    double band_power = 0.0;
    for (std::size_t k = 1; k < spec.size(); ++k) {
        const double f = static_cast<double>(k) * sample_rate / nd;
        if (f < kModulationLow) continue;
        if (f > kModulationHigh) break;
        const bool nyquist_bin = (n % 2 == 0) && k == n / 2;
        band_power += (nyquist_bin ? 1.0 : 2.0) * std::norm(spec[k]);
    }
    const double rms = std::sqrt(band_power) / nd;
    return rms / (mean + kModulationEpsilon);
}

}  // namespace metrics

namespace {

// Everything the five metrics share.
struct Analysis {
    Spectrogram spec;
    BarkBandPowers bark;
    std::vector<double> band_average;
};

Analysis analyze(const AudioClip& clip) {
    Analysis a{stft_power(clip), {}, {}};
    if (!(a.spec.mean_frame_power() > kSilenceThreshold))
        throw Error(ErrorKind::SilentInput, "silent input");
    a.bark = bark_band_powers(a.spec);
    a.band_average = a.bark.time_average();
    return a;
}

double brightness_of(const Spectrogram& spec) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t f = 0; f < spec.frames; ++f) {
        const auto row = spec.frame(f);
        for (std::size_t k = 0; k < spec.bins; ++k) {
            num += spec.bin_freqs[k] * row[k];
            den += row[k];
        }
    }
    return num / den;
}

double depth_of(const Spectrogram& spec) {
    double low = 0.0;
    double total = 0.0;
    for (std::size_t f = 0; f < spec.frames; ++f) {
        const auto row = spec.frame(f);
        for (std::size_t k = 0; k < spec.bins; ++k) {
            if (spec.bin_freqs[k] < metrics::kDepthCutoff) low += row[k];
            total += row[k];
        }
    }
    return low / total;
}

double roughness_of(const AudioClip& clip, const Analysis& a) {
    if (clip.duration() < kMinRoughnessDuration)
        throw Error(ErrorKind::TooShort, fmt::format("roughness needs at least {} s of audio, got {} s",
                                                     kMinRoughnessDuration, clip.duration()));
    const auto loud = metrics::specific_loudness(a.band_average);
    const auto bands = band_envelopes(clip, a.bark.edges);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t b = 0; b < loud.size(); ++b) {
        num += loud[b] * metrics::modulation_index(bands.band_envelopes[b], clip.sample_rate());
        den += loud[b];
    }
    if (!(den > 0.0)) throw Error(ErrorKind::SilentInput, "silent input: no Bark-band loudness");
    return num / den;
}

}  // namespace

double brightness(const AudioClip& clip) { return brightness_of(analyze(clip).spec); }

double sharpness(const AudioClip& clip) {
    return metrics::sharpness_from_band_powers(analyze(clip).band_average);
}

double roughness(const AudioClip& clip) {
    if (clip.duration() < kMinRoughnessDuration)
        throw Error(ErrorKind::TooShort, "roughness needs at least 0.25 s of audio");
    return roughness_of(clip, analyze(clip));
}

double boominess(const AudioClip& clip) {
    return metrics::boominess_from_band_powers(analyze(clip).band_average);
}

double depth(const AudioClip& clip) { return depth_of(analyze(clip).spec); }

TimbreVector compute_timbre_vector(const AudioClip& clip) {
    if (clip.duration() < kMinRoughnessDuration)
        throw Error(ErrorKind::TooShort, fmt::format("timbre analysis needs at least {} s of audio",
                                                     kMinRoughnessDuration));
    const Analysis a = analyze(clip);
    TimbreVector v;
    v[TimbreAttribute::Sharpness] = metrics::sharpness_from_band_powers(a.band_average);
    v[TimbreAttribute::Roughness] = roughness_of(clip, a);
    v[TimbreAttribute::Boominess] = metrics::boominess_from_band_powers(a.band_average);
    v[TimbreAttribute::Brightness] = brightness_of(a.spec);
    v[TimbreAttribute::Depth] = depth_of(a.spec);
    return v;
}

// ------------------------------------------------------------------- CSV

void write_timbre_csv(const std::filesystem::path& path, std::span<const std::string> clip_ids,
                      std::span<const TimbreVector> vectors, int significant_digits) {
    if (clip_ids.size() != vectors.size())
        throw Error(ErrorKind::DimensionMismatch, "timbre CSV: id and vector counts differ");
    std::string out = "clip_id";
    for (TimbreAttribute a : kAttributes) {
        out += ',';
        out += attribute_name(a);
    }
    out += '\n';
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        out += detail::csv_escape(clip_ids[i]);
        for (double v : vectors[i].values) out += fmt::format(",{:.{}g}", v, significant_digits);
        out += '\n';
    }
    detail::write_file_atomic(path, out);
}

TimbreTable read_timbre_csv(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty() || lines[0] != "clip_id,sharpness,roughness,boominess,brightness,depth")
        throw Error(ErrorKind::Parse, fmt::format("{}: bad timbre CSV header", path.string()));
    TimbreTable table;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto fields = detail::split_csv_line(lines[i]);
        if (fields.size() != 1 + kNumAttributes)
            throw Error(ErrorKind::Parse, fmt::format("{}:{}: expected 6 fields", path.string(), i + 1));
        TimbreVector v;
        for (std::size_t a = 0; a < kNumAttributes; ++a)
            v.values[a] = detail::parse_double(fields[a + 1], attribute_name(kAttributes[a]));
        table.clip_ids.push_back(fields[0]);
        table.vectors.push_back(v);
    }
    return table;
}

}  // namespace tdc
