#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace tdc {

inline constexpr int kCanonicalSampleRate = 16000;

/// Mono sample buffer with its sample rate. Samples are finite and nominally in
/// [-1, 1]; the constructor rejects empty buffers, non-finite values and
/// non-positive rates.
class AudioClip {
public:
    AudioClip(std::vector<double> samples, int sample_rate);

    std::span<const double> samples() const noexcept { return samples_; }
    int sample_rate() const noexcept { return sample_rate_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double duration() const noexcept {
        return static_cast<double>(samples_.size()) / sample_rate_;
    }

    AudioClip scaled(double gain) const;

    bool operator==(const AudioClip&) const = default;

private:
    std::vector<double> samples_;
    int sample_rate_;
};

enum class WavFormat { Pcm16, Float32 };

/// Reads a PCM16 or IEEE float32 RIFF/WAVE file. Multichannel audio is averaged
/// to mono; PCM16 value v maps to v / 32768.
AudioClip load_wav(const std::filesystem::path& path);

/// Writes a mono WAV. PCM16 quantizes with round-to-nearest and clamps to
/// [-32768, 32767]. The file is written to a temporary and renamed into place.
void save_wav(const AudioClip& clip, const std::filesystem::path& path,
              WavFormat format = WavFormat::Pcm16);

/// Band-limited resampling with a 64-tap Kaiser-windowed sinc (beta 8). The
/// cutoff follows the lower of the two Nyquist rates.
AudioClip resample(const AudioClip& clip, int target_rate);

/// load_wav followed by resampling to the canonical 16 kHz rate.
AudioClip load_canonical(const std::filesystem::path& path);

}  // namespace tdc
