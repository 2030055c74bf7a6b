#include "tdc/audio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "io_util.hpp"
#include "tdc/error.hpp"

namespace tdc {

AudioClip::AudioClip(std::vector<double> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
    if (sample_rate_ <= 0)
        throw Error(ErrorKind::InvalidArgument, fmt::format("sample rate must be positive, got {}", sample_rate_));
    if (samples_.empty()) throw Error(ErrorKind::InvalidArgument, "audio clip has no samples");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i]))
            throw Error(ErrorKind::InvalidArgument, fmt::format("non-finite sample at index {}", i));
    }
}

AudioClip AudioClip::scaled(double gain) const {
    std::vector<double> out(samples_);
    for (double& v : out) v *= gain;
    return AudioClip(std::move(out), sample_rate_);
}

// --------------------------------------------------------------------- WAV

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::string& b, std::size_t off) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                      (static_cast<unsigned char>(b[off + 1]) << 8));
}

std::uint32_t read_u32(const std::string& b, std::size_t off) {
    return static_cast<std::uint32_t>(read_u16(b, off)) |
           (static_cast<std::uint32_t>(read_u16(b, off + 2)) << 16);
}

void put_u16(std::string& b, std::uint16_t v) {
    b.push_back(static_cast<char>(v & 0xFF));
    b.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& b, std::uint32_t v) {
    put_u16(b, static_cast<std::uint16_t>(v & 0xFFFF));
    put_u16(b, static_cast<std::uint16_t>(v >> 16));
}

}  // namespace

AudioClip load_wav(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw Error(ErrorKind::MissingFile, fmt::format("no such file: {}", path.string()));
    const std::string bytes = detail::read_file(path);
    const auto malformed = [&](std::string_view why) {
        return Error(ErrorKind::MalformedHeader, fmt::format("{}: {}", path.string(), why));
    };
    if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 || bytes.compare(8, 4, "WAVE") != 0)
        throw malformed("not a RIFF/WAVE file");

    bool have_fmt = false;
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t rate = 0;
    std::uint16_t bits = 0;
    std::size_t data_off = 0;
    std::size_t data_len = 0;
    bool have_data = false;

    std::size_t off = 12;
    while (off + 8 <= bytes.size()) {
        const std::string id = bytes.substr(off, 4);
        const std::size_t len = read_u32(bytes, off + 4);
        const std::size_t body = off + 8;
        if (id == "fmt ") {
            if (len < 16 || body + len > bytes.size()) throw malformed("short fmt chunk");
            format = read_u16(bytes, body);
            channels = read_u16(bytes, body + 2);
            rate = read_u32(bytes, body + 4);
            bits = read_u16(bytes, body + 14);
            if (format == kFormatExtensible) {
                if (len < 40) throw malformed("short extensible fmt chunk");
                format = read_u16(bytes, body + 24);
            }
            have_fmt = true;
        } else if (id == "data") {
            if (body + len > bytes.size()) throw malformed("data chunk extends past end of file");
            data_off = body;
            data_len = len;
            have_data = true;
            break;
        }
        off = body + len + (len & 1);
    }
    if (!have_fmt) throw malformed("missing fmt chunk");
    if (!have_data) throw malformed("missing data chunk");
    if (channels == 0 || rate == 0) throw malformed("zero channels or sample rate");

    const bool pcm16 = format == kFormatPcm && bits == 16;
    const bool float32 = format == kFormatFloat && bits == 32;
    if (!pcm16 && !float32)
        throw Error(ErrorKind::UnsupportedCodec,
                    fmt::format("{}: unsupported WAV encoding (format {}, {} bits)", path.string(),
                                format, bits));

    const std::size_t sample_bytes = bits / 8;
    const std::size_t frame_bytes = sample_bytes * channels;
    const std::size_t frames = data_len / frame_bytes;
    if (frames == 0) throw malformed("no audio frames");

    std::vector<double> mono(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            const std::size_t p = data_off + f * frame_bytes + c * sample_bytes;
            if (pcm16) {
                acc += static_cast<std::int16_t>(read_u16(bytes, p)) / 32768.0;
            } else {
                acc += static_cast<double>(std::bit_cast<float>(read_u32(bytes, p)));
            }
        }
        mono[f] = channels == 1 ? acc : acc / channels;
    }
    return AudioClip(std::move(mono), static_cast<int>(rate));
}

void save_wav(const AudioClip& clip, const std::filesystem::path& path, WavFormat format) {
    const auto samples = clip.samples();
    const std::uint16_t bits = format == WavFormat::Pcm16 ? 16 : 32;
    const std::uint32_t data_len = static_cast<std::uint32_t>(samples.size() * (bits / 8));

    std::string b;
    b.reserve(44 + data_len);
    b += "RIFF";
    put_u32(b, 36 + data_len);
    b += "WAVE";
    b += "fmt ";
    put_u32(b, 16);
    put_u16(b, format == WavFormat::Pcm16 ? kFormatPcm : kFormatFloat);
    put_u16(b, 1);
    put_u32(b, static_cast<std::uint32_t>(clip.sample_rate()));
    put_u32(b, static_cast<std::uint32_t>(clip.sample_rate()) * (bits / 8));
    put_u16(b, bits / 8);
    put_u16(b, bits);
    b += "data";
    put_u32(b, data_len);
    for (double x : samples) {
        if (format == WavFormat::Pcm16) {
            const double q = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
            put_u16(b, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
        } else {
            put_u32(b, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
        }
    }
    detail::write_file_atomic(path, b);
}

// ---------------------------------------------------------------- resample

namespace {

constexpr int kHalfTaps = 32;
constexpr double kKaiserBeta = 8.0;

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// Kernel for an output sample whose input position lies `frac` past an
// integer index. Tap j covers input index base - kHalfTaps + 1 + j.
std::vector<double> make_kernel(double frac, double cutoff) {
    static const double i0_beta = std::cyl_bessel_i(0.0, kKaiserBeta);
    std::vector<double> w(2 * kHalfTaps);
    double sum = 0.0;
    for (int j = 0; j < 2 * kHalfTaps; ++j) {
        const double tau = static_cast<double>(kHalfTaps - 1 - j) + frac;
        const double x = tau / kHalfTaps;
        const double win = std::abs(x) >= 1.0
                               ? 0.0
                               : std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - x * x)) / i0_beta;
        w[j] = cutoff * sinc(cutoff * tau) * win;
        sum += w[j];
    }
    for (double& v : w) v /= sum;
    return w;
}

}  // namespace

AudioClip resample(const AudioClip& clip, int target_rate) {
    if (target_rate <= 0)
        throw Error(ErrorKind::InvalidArgument, fmt::format("target rate must be positive, got {}", target_rate));
    const long long src = clip.sample_rate();
    if (src == target_rate) return clip;

    const long long dst = target_rate;
    const auto in = clip.samples();
    const long long n_in = static_cast<long long>(in.size());
    const long long n_out = std::max<long long>(1, (n_in * dst + src / 2) / src);
    const double cutoff = std::min(1.0, static_cast<double>(dst) / static_cast<double>(src));

    // Input position of output j is (j * src) / dst; the fractional part only
    // takes dst / gcd distinct values, so kernels are cached by remainder.
    const long long g = std::gcd(src, dst);
    const long long phases = dst / g;
    const bool cache_kernels = phases <= 8192;
    std::vector<std::vector<double>> kernels(cache_kernels ? phases : 0);

    std::vector<double> out(static_cast<std::size_t>(n_out));
    for (long long j = 0; j < n_out; ++j) {
        const long long num = j * src;
        const long long base = num / dst;
        const long long rem = num % dst;
        const double frac = static_cast<double>(rem) / static_cast<double>(dst);
        std::vector<double> local;
        const std::vector<double>* kernel = nullptr;
        if (cache_kernels) {
            auto& slot = kernels[static_cast<std::size_t>(rem / g)];
            if (slot.empty()) slot = make_kernel(frac, cutoff);
            kernel = &slot;
        } else {
            local = make_kernel(frac, cutoff);
            kernel = &local;
        }
        double acc = 0.0;
        const long long first = base - kHalfTaps + 1;
        for (int t = 0; t < 2 * kHalfTaps; ++t) {
            const long long idx = first + t;
            if (idx < 0 || idx >= n_in) continue;
            acc += (*kernel)[t] * in[static_cast<std::size_t>(idx)];
        }
        out[static_cast<std::size_t>(j)] = acc;
    }
    return AudioClip(std::move(out), target_rate);
}

AudioClip load_canonical(const std::filesystem::path& path) {
    AudioClip clip = load_wav(path);
    if (clip.sample_rate() == kCanonicalSampleRate) return clip;
    return resample(clip, kCanonicalSampleRate);
}

}  // namespace tdc
