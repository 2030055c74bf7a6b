#include "tdc/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>

#include <fmt/format.h>

#include "io_util.hpp"
#include "tdc/error.hpp"
#include "tdc/spectral.hpp"

namespace tdc {

std::string_view to_string(DistanceKind kind) {
    return kind == DistanceKind::Cosine ? "cosine" : "euclidean";
}

std::optional<DistanceKind> parse_distance_kind(std::string_view name) {
    if (name == "euclidean") return DistanceKind::Euclidean;
    if (name == "cosine") return DistanceKind::Cosine;
    return std::nullopt;
}

std::string_view to_string(ProviderKind kind) {
    switch (kind) {
    case ProviderKind::Timbre: return "timbre";
    case ProviderKind::Spectral: return "spectral";
    case ProviderKind::External: return "external";
    }
    return "unknown";
}

std::optional<ProviderKind> parse_provider_kind(std::string_view name) {
    if (name == "timbre") return ProviderKind::Timbre;
    if (name == "spectral") return ProviderKind::Spectral;
    if (name == "external") return ProviderKind::External;
    return std::nullopt;
}

NormalizationStats fit_normalization(std::span<const std::vector<double>> vectors) {
    if (vectors.size() < 2)
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("normalization needs at least 2 vectors, got {}", vectors.size()));
    const std::size_t dim = vectors.front().size();
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != dim)
            throw Error(ErrorKind::DimensionMismatch,
                        fmt::format("vector {} has dimension {}, expected {}", i, vectors[i].size(), dim));
    }
    const double n = static_cast<double>(vectors.size());
    NormalizationStats stats{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
    for (const auto& v : vectors)
        for (std::size_t d = 0; d < dim; ++d) stats.mean[d] += v[d];
    for (double& m : stats.mean) m /= n;
    for (const auto& v : vectors)
        for (std::size_t d = 0; d < dim; ++d) {
            const double dev = v[d] - stats.mean[d];
            stats.std[d] += dev * dev;
        }
    for (double& s : stats.std) s = std::max(std::sqrt(s / n), kStdFloor);
    return stats;
}

std::vector<double> standardize(std::span<const double> raw, const NormalizationStats& stats) {
    if (raw.size() != stats.dim() || stats.std.size() != stats.dim())
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("vector dimension {} does not match normalization dimension {}",
                                raw.size(), stats.dim()));
    std::vector<double> z(raw.size());
    for (std::size_t d = 0; d < raw.size(); ++d) {
        const float q = static_cast<float>((raw[d] - stats.mean[d]) / stats.std[d]);
        if (!std::isfinite(q))
            throw Error(ErrorKind::InvalidArgument, fmt::format("non-finite embedding component {}", d));
        z[d] = static_cast<double>(q);
    }
    return z;
}

std::vector<double> spectral_features(const AudioClip& clip) {
    const Spectrogram spec = stft_power(clip);
    if (!(spec.mean_frame_power() > kSilenceThreshold))
        throw Error(ErrorKind::SilentInput, "silent input");
    const double fmax = std::min(8000.0, clip.sample_rate() / 2.0);
    const auto fb = mel_filterbank(kMelBands, spec.bin_freqs, 0.0, fmax);

    std::vector<double> mean(kMelBands, 0.0);
    std::vector<double> sq(kMelBands, 0.0);
    std::vector<double> logmel(spec.frames * kMelBands);
    for (std::size_t f = 0; f < spec.frames; ++f) {
        const auto row = spec.frame(f);
        for (std::size_t m = 0; m < kMelBands; ++m) {
            double e = 0.0;
            const double* w = fb.data() + m * spec.bins;
            for (std::size_t k = 0; k < spec.bins; ++k) e += w[k] * row[k];
            const double lm = std::log(std::max(e, kLogMelFloor));
            logmel[f * kMelBands + m] = lm;
            mean[m] += lm;
        }
    }
    const double n = static_cast<double>(spec.frames);
    for (double& m : mean) m /= n;
    for (std::size_t f = 0; f < spec.frames; ++f)
        for (std::size_t m = 0; m < kMelBands; ++m) {
            const double dev = logmel[f * kMelBands + m] - mean[m];
            sq[m] += dev * dev;
        }

    std::vector<double> features;
    features.reserve(kSpectralEmbeddingDim);
    features.insert(features.end(), mean.begin(), mean.end());
    for (double s : sq) features.push_back(std::sqrt(s / n));
    return features;
}

Embedding embed_timbre(const TimbreVector& vec, const NormalizationStats& stats, std::string clip_id) {
    if (stats.dim() != kTimbreEmbeddingDim)
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("timbre normalization must have dimension 5, got {}", stats.dim()));
    return {standardize(vec.values, stats), std::string(to_string(ProviderKind::Timbre)),
            std::move(clip_id)};
}

Embedding embed_spectral(const AudioClip& clip, const NormalizationStats& stats, std::string clip_id) {
    if (stats.dim() != kSpectralEmbeddingDim)
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("spectral normalization must have dimension 80, got {}", stats.dim()));
    return {standardize(spectral_features(clip), stats), std::string(to_string(ProviderKind::Spectral)),
            std::move(clip_id)};
}

double distance(std::span<const double> u, std::span<const double> v, DistanceKind kind) {
    if (u.size() != v.size())
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("distance between vectors of dimension {} and {}", u.size(), v.size()));
    if (kind == DistanceKind::Euclidean) {
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = u[i] - v[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    }
    double dot = 0.0;
    double nu = 0.0;
    double nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) return 1.0;
    return std::clamp(1.0 - dot / std::sqrt(nu * nv), 0.0, 2.0);
}

double distance(const Embedding& u, const Embedding& v, DistanceKind kind) {
    if (u.provider_id != v.provider_id)
        throw Error(ErrorKind::ProviderMismatch,
                    fmt::format("cannot compare '{}' and '{}' embeddings", u.provider_id, v.provider_id));
    return distance(std::span<const double>(u.vector), std::span<const double>(v.vector), kind);
}

// ------------------------------------------------------------------ TDCE

namespace {

constexpr std::uint32_t kTdceVersion = 1;
constexpr std::size_t kTdceHeaderBytes = 16;

void put_u32(std::string& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string& b, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + i])) << (8 * i);
    return v;
}

}  // namespace

std::filesystem::path ids_sidecar_path(const std::filesystem::path& tdce_path) {
    std::filesystem::path p = tdce_path;
    p += ".ids.csv";
    return p;
}

void write_tdce(const std::filesystem::path& path, std::span<const Embedding> embeddings) {
    const std::size_t dim = embeddings.empty() ? 0 : embeddings.front().dim();
    std::string b = "TDCE";
    put_u32(b, kTdceVersion);
    put_u32(b, static_cast<std::uint32_t>(dim));
    put_u32(b, static_cast<std::uint32_t>(embeddings.size()));
    std::string ids = "row,clip_id\n";
    for (std::size_t r = 0; r < embeddings.size(); ++r) {
        const auto& e = embeddings[r];
        if (e.dim() != dim)
            throw Error(ErrorKind::DimensionMismatch,
                        fmt::format("embedding {} has dimension {}, expected {}", r, e.dim(), dim));
        for (double x : e.vector) put_u32(b, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
        ids += fmt::format("{},{}\n", r, detail::csv_escape(e.clip_id));
    }
    detail::write_file_atomic(path, b);
    detail::write_file_atomic(ids_sidecar_path(path), ids);
}

std::vector<Embedding> import_embeddings(const std::filesystem::path& path, std::string provider_id) {
    if (!std::filesystem::exists(path))
        throw Error(ErrorKind::MissingFile, fmt::format("no such file: {}", path.string()));
    const std::string b = detail::read_file(path);
    if (b.size() < 4 || b.compare(0, 4, "TDCE") != 0)
        throw Error(ErrorKind::BadMagic, fmt::format("{}: not a TDCE embedding file", path.string()));
    if (b.size() < kTdceHeaderBytes)
        throw Error(ErrorKind::Truncated, fmt::format("{}: truncated header", path.string()));
    const std::uint32_t version = get_u32(b, 4);
    if (version != kTdceVersion)
        throw Error(ErrorKind::MalformedHeader,
                    fmt::format("{}: unsupported TDCE version {}", path.string(), version));
    const std::size_t dim = get_u32(b, 8);
    const std::size_t count = get_u32(b, 12);
    const std::size_t need = kTdceHeaderBytes + count * dim * 4;
    if (b.size() < need)
        throw Error(ErrorKind::Truncated,
                    fmt::format("{}: payload holds {} bytes, expected {}", path.string(),
                                b.size() - kTdceHeaderBytes, need - kTdceHeaderBytes));

    std::vector<std::string> ids(count);
    const auto sidecar = ids_sidecar_path(path);
    if (count > 0 || std::filesystem::exists(sidecar)) {
        const auto lines = detail::read_lines(sidecar);
        if (lines.empty() || lines[0] != "row,clip_id")
            throw Error(ErrorKind::Parse, fmt::format("{}: bad header", sidecar.string()));
        std::vector<bool> seen(count, false);
        std::size_t rows = 0;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (detail::trim(lines[i]).empty()) continue;
            const auto fields = detail::split_csv_line(lines[i]);
            if (fields.size() != 2)
                throw Error(ErrorKind::Parse, fmt::format("{}:{}: expected 2 fields", sidecar.string(), i + 1));
            const long long row = detail::parse_int(fields[0], "row");
            if (row < 0 || static_cast<std::size_t>(row) >= count || seen[row])
                throw Error(ErrorKind::IdMismatch,
                            fmt::format("{}:{}: row {} is out of range or repeated", sidecar.string(), i + 1, row));
            seen[row] = true;
            ids[row] = fields[1];
            ++rows;
        }
        if (rows != count)
            throw Error(ErrorKind::IdMismatch,
                        fmt::format("{} lists {} ids for {} embeddings", sidecar.string(), rows, count));
    }

    std::vector<Embedding> out;
    out.reserve(count);
    for (std::size_t r = 0; r < count; ++r) {
        Embedding e{std::vector<double>(dim), provider_id, std::move(ids[r])};
        for (std::size_t d = 0; d < dim; ++d) {
            const float x = std::bit_cast<float>(get_u32(b, kTdceHeaderBytes + (r * dim + d) * 4));
            if (!std::isfinite(x))
                throw Error(ErrorKind::InvalidArgument,
                            fmt::format("{}: non-finite value at row {}", path.string(), r));
            e.vector[d] = x;
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace tdc
