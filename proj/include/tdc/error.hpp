#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tdc {

enum class ErrorKind {
    InvalidArgument,
    MissingFile,
    MalformedHeader,
    UnsupportedCodec,
    SilentInput,
    TooShort,
    EmptyBand,
    DimensionMismatch,
    ProviderMismatch,
    BadMagic,
    Truncated,
    IdMismatch,
    Parse,
    Validation,
    MissingData,
    Coverage,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Library error. Every failure path throws this with a kind that callers can
/// branch on; the message is meant for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace tdc
