#include "tdc/error.hpp"

namespace tdc {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::MissingFile: return "missing file";
    case ErrorKind::MalformedHeader: return "malformed header";
    case ErrorKind::UnsupportedCodec: return "unsupported codec";
    case ErrorKind::SilentInput: return "silent input";
    case ErrorKind::TooShort: return "too short";
    case ErrorKind::EmptyBand: return "empty band";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::ProviderMismatch: return "provider mismatch";
    case ErrorKind::BadMagic: return "bad magic";
    case ErrorKind::Truncated: return "truncated";
    case ErrorKind::IdMismatch: return "id mismatch";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::MissingData: return "missing data";
    case ErrorKind::Coverage: return "coverage gap";
    case ErrorKind::Io: return "I/O error";
    }
    return "error";
}

}  // namespace tdc
