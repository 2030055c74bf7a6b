#include "tdc/manifest.hpp"

#include <istream>
#include <sstream>
#include <set>
#include <string>

#include <fmt/format.h>

#include "io_util.hpp"
#include "tdc/error.hpp"

namespace tdc {

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }
std::string_view to_string(State s) { return s == State::Normal ? "normal" : "anomalous"; }
std::string_view to_string(Domain d) { return d == Domain::Source ? "source" : "target"; }

namespace {

// `where(i)` describes entry i for error messages.
template <typename Where>
void check_entries(std::span<const ManifestEntry> entries, Where where) {
    std::set<std::string> ids;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.clip_id.empty()) throw Error(ErrorKind::Validation, fmt::format("{}: empty clip_id", where(i)));
        if (e.split == Split::Train && e.state == State::Anomalous)
            throw Error(ErrorKind::Validation,
                        fmt::format("{}: training clip '{}' is anomalous; training data must be normal",
                                    where(i), e.clip_id));
        if (e.state == State::Anomalous && e.cause.empty())
            throw Error(ErrorKind::Validation,
                        fmt::format("{}: anomalous clip '{}' has no cause", where(i), e.clip_id));
        if (!ids.insert(e.clip_id).second)
            throw Error(ErrorKind::Validation, fmt::format("{}: duplicate clip_id '{}'", where(i), e.clip_id));
    }
}

}  // namespace

void validate_manifest(std::span<const ManifestEntry> entries) {
    check_entries(entries, [](std::size_t i) { return fmt::format("row {}", i + 1); });
}

std::vector<ManifestEntry> parse_manifest(std::istream& in, std::string_view source) {
    std::string line;
    std::size_t line_no = 0;
    const auto fail = [&](const std::string& why) {
        return Error(ErrorKind::Parse, fmt::format("{}:{}: {}", source, line_no, why));
    };

    if (!std::getline(in, line)) throw Error(ErrorKind::Parse, fmt::format("{}: empty manifest", source));
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kManifestHeader) throw fail(fmt::format("expected header '{}'", kManifestHeader));

    std::vector<ManifestEntry> entries;
    std::vector<std::size_t> lines;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 7) throw fail(fmt::format("expected 7 fields, got {}", f.size()));
        ManifestEntry e;
        e.clip_id = detail::trim(f[0]);
        e.path = detail::trim(f[1]);
        const std::string split = detail::trim(f[2]);
        const std::string state = detail::trim(f[3]);
        const std::string domain = detail::trim(f[6]);
        if (split == "train") e.split = Split::Train;
        else if (split == "test") e.split = Split::Test;
        else throw fail(fmt::format("split must be train or test, got '{}'", split));
        if (state == "normal") e.state = State::Normal;
        else if (state == "anomalous") e.state = State::Anomalous;
        else throw fail(fmt::format("state must be normal or anomalous, got '{}'", state));
        e.condition = detail::trim(f[4]);
        e.cause = detail::trim(f[5]);
        if (domain.empty() || domain == "source") e.domain = Domain::Source;
        else if (domain == "target") e.domain = Domain::Target;
        else throw fail(fmt::format("domain must be source or target, got '{}'", domain));
        entries.push_back(std::move(e));
        lines.push_back(line_no);
    }
    check_entries(entries, [&](std::size_t i) { return fmt::format("{}:{}", source, lines[i]); });
    return entries;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    const std::string text = detail::read_file(path);
    std::istringstream in(text);
    return parse_manifest(in, path.string());
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries) {
    validate_manifest(entries);
    std::string out(kManifestHeader);
    out += '\n';
    for (const auto& e : entries) {
        out += fmt::format("{},{},{},{},{},{},{}\n", detail::csv_escape(e.clip_id), detail::csv_escape(e.path),
                           to_string(e.split), to_string(e.state), detail::csv_escape(e.condition),
                           detail::csv_escape(e.cause), to_string(e.domain));
    }
    detail::write_file_atomic(path, out);
}

}  // namespace tdc
