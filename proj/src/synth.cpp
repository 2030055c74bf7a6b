#include "tdc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "fft.hpp"
#include "io_util.hpp"
#include "tdc/error.hpp"

namespace tdc::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNoiseLowCut = 20.0;
constexpr std::uint64_t kTransformSeedSalt = 0x9E3779B97F4A7C15ULL;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double rms(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

void apply_spectral_gain(std::vector<double>& x, int sample_rate, auto gain_db_at) {
    auto spec = detail::rfft(x);
    const double n = static_cast<double>(x.size());
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double f = static_cast<double>(k) * sample_rate / n;
        spec[k] *= std::pow(10.0, gain_db_at(f) / 20.0);
    }
    x = detail::irfft(spec, x.size());
}

}  // namespace

void ConditionSpec::validate() const {
    if (condition_id.empty()) throw Error(ErrorKind::InvalidArgument, "condition_id is empty");
    if (!(base_frequency >= 30.0 && base_frequency <= 400.0))
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("{}: base frequency {} Hz outside [30, 400]", condition_id, base_frequency));
    if (harmonic_count < 1)
        throw Error(ErrorKind::InvalidArgument, fmt::format("{}: harmonic_count must be >= 1", condition_id));
    if (!(harmonic_decay >= 0.0) || !(noise_level >= 0.0) || !std::isfinite(noise_color) ||
        !std::isfinite(harmonic_decay) || !std::isfinite(noise_level))
        throw Error(ErrorKind::InvalidArgument, fmt::format("{}: invalid level parameters", condition_id));
}

void AnomalyCauseSpec::validate() const {
    if (cause_id.empty()) throw Error(ErrorKind::InvalidArgument, "cause_id is empty");
    const auto bad = [&](std::string_view why) {
        return Error(ErrorKind::InvalidArgument, fmt::format("{}: {}", cause_id, why));
    };
    std::visit(overloaded{
                   [&](const AmBuzz& t) {
                       if (!(t.mod_freq > 0.0) || !(t.depth >= 0.0 && t.depth <= 1.0))
                           throw bad("am_buzz needs mod_freq > 0 and depth in [0, 1]");
                   },
                   [&](const HighShelf& t) {
                       if (!(t.cutoff > 0.0) || !std::isfinite(t.gain_db)) throw bad("invalid high shelf");
                   },
                   [&](const LowShelf& t) {
                       if (!(t.cutoff > 0.0) || !std::isfinite(t.gain_db)) throw bad("invalid low shelf");
                   },
                   [&](const ToneInject& t) {
                       if (!(t.freq > 0.0) || !(t.level >= 0.0)) throw bad("invalid tone injection");
                   },
               },
               transform);
}

double shelf_gain_db(double freq, double cutoff, double gain_db, bool high_shelf) {
    const double lo = std::log2(cutoff) - 1.0 / 6.0;
    const double hi = std::log2(cutoff) + 1.0 / 6.0;
    const double u = freq <= 0.0 ? 0.0 : std::clamp((std::log2(freq) - lo) / (hi - lo), 0.0, 1.0);
    const double ramp = 0.5 - 0.5 * std::cos(std::numbers::pi * u);
    return gain_db * (high_shelf ? ramp : 1.0 - ramp);
}

void apply_transform(std::vector<double>& x, int sample_rate, const Transform& transform, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase_dist(0.0, kTwoPi);
    const double sr = sample_rate;
    std::visit(overloaded{
                   [&](const AmBuzz& t) {
                       const double phase = phase_dist(rng);
                       for (std::size_t i = 0; i < x.size(); ++i)
                           x[i] *= 1.0 + t.depth * std::sin(kTwoPi * t.mod_freq * i / sr + phase);
                   },
                   [&](const HighShelf& t) {
                       apply_spectral_gain(x, sample_rate,
                                           [&](double f) { return shelf_gain_db(f, t.cutoff, t.gain_db, true); });
                   },
                   [&](const LowShelf& t) {
                       apply_spectral_gain(x, sample_rate,
                                           [&](double f) { return shelf_gain_db(f, t.cutoff, t.gain_db, false); });
                   },
                   [&](const ToneInject& t) {
                       const double phase = phase_dist(rng);
                       const double amp = t.level * rms(x) * std::numbers::sqrt2;
                       for (std::size_t i = 0; i < x.size(); ++i)
                           x[i] += amp * std::sin(kTwoPi * t.freq * i / sr + phase);
                   },
               },
               transform);
}

AudioClip generate_clip(const ConditionSpec& cond, const AnomalyCauseSpec* cause, double duration,
                        std::uint64_t seed, int sample_rate) {
    cond.validate();
    if (cause != nullptr) cause->validate();
    if (!(duration >= 1.0))
        throw Error(ErrorKind::InvalidArgument, fmt::format("clip duration {} s is below 1 s", duration));
    if (sample_rate <= 0) throw Error(ErrorKind::InvalidArgument, "sample rate must be positive");

    const std::size_t n = static_cast<std::size_t>(std::llround(duration * sample_rate));
    const double sr = sample_rate;
    const double nyquist = sr / 2.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double gain = 0.5 + 0.5 * unit(rng);
    const double f0 = cond.base_frequency * (1.0 + 0.01 * (unit(rng) - 0.5));

    std::vector<double> x(n, 0.0);
    double amp = 1.0;
    for (int h = 1; h <= cond.harmonic_count; ++h, amp *= cond.harmonic_decay) {
        const double phase = kTwoPi * unit(rng);
        const double fh = h * f0;
        if (fh >= 0.95 * nyquist) continue;
        for (std::size_t i = 0; i < n; ++i) x[i] += amp * std::sin(kTwoPi * fh * i / sr + phase);
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> noise(n);
    for (double& v : noise) v = gauss(rng);
    apply_spectral_gain(noise, sample_rate, [&](double f) {
        return f < kNoiseLowCut ? -400.0 : cond.noise_color * std::log2(f / 1000.0);
    });
    const double noise_rms = rms(noise);
    const double harmonic_rms = rms(x);
    if (noise_rms > 0.0) {
        const double scale = cond.noise_level * (harmonic_rms > 0.0 ? harmonic_rms : 1.0) / noise_rms;
        for (std::size_t i = 0; i < n; ++i) x[i] += scale * noise[i];
    }

    if (cause != nullptr) apply_transform(x, sample_rate, cause->transform, seed ^ kTransformSeedSalt);

    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) {
        const double scale = kPeakLevel / peak * gain;
        for (double& v : x) v *= scale;
    }
    return AudioClip(std::move(x), sample_rate);
}

std::uint64_t stable_hash(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t clip_seed(std::uint64_t master_seed, std::string_view clip_id) {
    return master_seed ^ stable_hash(clip_id);
}

std::vector<ConditionSpec> benchmark_conditions(int count) {
    static const std::vector<ConditionSpec> all = {
        {"cond00", 60.0, 20, 0.85, -3.0, 0.3},  {"cond01", 120.0, 15, 0.80, 0.0, 0.3},
        {"cond02", 240.0, 10, 0.75, 3.0, 0.3},  {"cond03", 90.0, 18, 0.82, -1.5, 0.25},
        {"cond04", 180.0, 12, 0.78, 1.5, 0.35}, {"cond05", 360.0, 8, 0.70, 4.5, 0.3},
    };
    if (count < 1 || count > static_cast<int>(all.size()))
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("number of conditions must be in [1, {}], got {}", all.size(), count));
    return {all.begin(), all.begin() + count};
}

namespace {

LabelVector directions(std::initializer_list<std::pair<TimbreAttribute, Change>> changes) {
    LabelVector v{};
    v.fill(Change::Unchanged);
    for (const auto& [a, c] : changes) v[static_cast<std::size_t>(a)] = c;
    return v;
}

std::vector<AnomalyCauseSpec> default_causes() {
    using A = TimbreAttribute;
    return {
        {"am_buzz", AmBuzz{70.0, 0.8}, directions({{A::Roughness, Change::Increased}})},
        {"high_shelf_up", HighShelf{2000.0, 12.0},
         directions({{A::Brightness, Change::Increased}, {A::Sharpness, Change::Increased}})},
        {"low_shelf_up", LowShelf{250.0, 12.0},
         directions({{A::Boominess, Change::Increased}, {A::Depth, Change::Increased}})},
        {"high_shelf_down", HighShelf{2000.0, -12.0},
         directions({{A::Brightness, Change::Decreased}, {A::Sharpness, Change::Decreased}})},
    };
}

}  // namespace

BenchmarkSpecs default_benchmark_specs() { return {benchmark_conditions(3), default_causes()}; }

std::vector<AnomalyCauseSpec> select_causes(std::span<const std::string> cause_ids) {
    auto all = default_causes();
    if (cause_ids.empty() || (cause_ids.size() == 1 && cause_ids[0] == "default")) return all;
    std::vector<AnomalyCauseSpec> out;
    for (const auto& id : cause_ids) {
        const auto it = std::find_if(all.begin(), all.end(), [&](const auto& c) { return c.cause_id == id; });
        if (it == all.end()) throw Error(ErrorKind::InvalidArgument, fmt::format("unknown cause '{}'", id));
        out.push_back(*it);
    }
    return out;
}

SynthDataset generate_dataset(std::span<const ConditionSpec> conditions, std::span<const AnomalyCauseSpec> causes,
                              const DatasetOptions& options, std::uint64_t seed,
                              const std::filesystem::path& out_dir) {
    if (conditions.empty() || causes.empty())
        throw Error(ErrorKind::InvalidArgument, "need at least one condition and one cause");
    if (options.train_per_condition < 1 || options.test_per_condition < 1)
        throw Error(ErrorKind::InvalidArgument, "clips per condition must be positive");
    for (const auto& c : conditions) c.validate();
    for (const auto& q : causes) q.validate();

    SynthDataset ds;
    ds.seed = seed;
    ds.specs = {{conditions.begin(), conditions.end()}, {causes.begin(), causes.end()}};
    ds.options = options;

    const auto emit = [&](const ConditionSpec& cond, const AnomalyCauseSpec* cause, Split split,
                          const std::string& clip_id) {
        const AudioClip clip = generate_clip(cond, cause, options.duration, clip_seed(seed, clip_id));
        const std::string rel = "audio/" + clip_id + ".wav";
        save_wav(clip, out_dir / rel);
        ds.manifest.push_back({clip_id, rel, split, cause ? State::Anomalous : State::Normal, cond.condition_id,
                               cause ? cause->cause_id : std::string{}, Domain::Source});
    };

    for (const auto& cond : conditions) {
        for (int i = 0; i < options.train_per_condition; ++i)
            emit(cond, nullptr, Split::Train, fmt::format("{}_train_{:04}", cond.condition_id, i));
        for (int i = 0; i < options.test_per_condition; ++i)
            emit(cond, nullptr, Split::Test, fmt::format("{}_test_normal_{:04}", cond.condition_id, i));
        for (const auto& cause : causes)
            for (int i = 0; i < options.test_per_condition; ++i)
                emit(cond, &cause, Split::Test,
                     fmt::format("{}_test_{}_{:04}", cond.condition_id, cause.cause_id, i));
    }
    write_manifest(out_dir / "manifest.csv", ds.manifest);
    detail::write_file_atomic(out_dir / "specs.json", to_json(ds).dump(2) + "\n");
    return ds;
}

nlohmann::json to_json(const SynthDataset& dataset) {
    nlohmann::json conditions = nlohmann::json::array();
    for (const auto& c : dataset.specs.conditions)
        conditions.push_back({{"condition_id", c.condition_id},
                              {"base_frequency", c.base_frequency},
                              {"harmonic_count", c.harmonic_count},
                              {"harmonic_decay", c.harmonic_decay},
                              {"noise_color", c.noise_color},
                              {"noise_level", c.noise_level}});
    nlohmann::json causes = nlohmann::json::array();
    for (const auto& q : dataset.specs.causes) {
        nlohmann::json transform = std::visit(
            overloaded{
                [](const AmBuzz& t) -> nlohmann::json {
                    return {{"type", "am_buzz"}, {"mod_freq", t.mod_freq}, {"depth", t.depth}};
                },
                [](const HighShelf& t) -> nlohmann::json {
                    return {{"type", "high_shelf"}, {"cutoff", t.cutoff}, {"gain_db", t.gain_db}};
                },
                [](const LowShelf& t) -> nlohmann::json {
                    return {{"type", "low_shelf"}, {"cutoff", t.cutoff}, {"gain_db", t.gain_db}};
                },
                [](const ToneInject& t) -> nlohmann::json {
                    return {{"type", "tone_inject"}, {"freq", t.freq}, {"level", t.level}};
                },
            },
            q.transform);
        nlohmann::json dirs = nlohmann::json::object();
        for (std::size_t a = 0; a < kNumAttributes; ++a)
            dirs[std::string(attribute_name(kAttributes[a]))] = to_int(q.intended_directions[a]);
        causes.push_back({{"cause_id", q.cause_id}, {"transform", transform}, {"intended_directions", dirs}});
    }
    return {{"seed", dataset.seed},
            {"sample_rate", kCanonicalSampleRate},
            {"duration", dataset.options.duration},
            {"train_per_condition", dataset.options.train_per_condition},
            {"test_per_condition", dataset.options.test_per_condition},
            {"conditions", conditions},
            {"causes", causes}};
}

}  // namespace tdc::synth
