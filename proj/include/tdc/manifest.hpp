#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tdc {

enum class Split { Train, Test };
enum class State { Normal, Anomalous };
enum class Domain { Source, Target };

std::string_view to_string(Split s);
std::string_view to_string(State s);
std::string_view to_string(Domain d);

struct ManifestEntry {
    std::string clip_id;
    std::string path;  // relative to the audio root
    Split split = Split::Train;
    State state = State::Normal;
    std::string condition;
    std::string cause;  // empty for normal clips
    Domain domain = Domain::Source;

    bool operator==(const ManifestEntry&) const = default;
};

/// Manifest CSV header: `clip_id,path,split,state,condition,cause,domain`.
inline constexpr std::string_view kManifestHeader = "clip_id,path,split,state,condition,cause,domain";

/// Parses and validates a manifest. Errors name the 1-based file line.
std::vector<ManifestEntry> parse_manifest(std::istream& in, std::string_view source = "manifest");
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

/// Throws Validation for anomalous training rows, anomalous rows without a
/// cause, and duplicate clip ids.
void validate_manifest(std::span<const ManifestEntry> entries);

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries);

}  // namespace tdc
