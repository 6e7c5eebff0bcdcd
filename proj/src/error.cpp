#include "atlaspaint/error.hpp"

namespace atlaspaint {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingMagic: return "MissingMagic";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateRegion: return "DuplicateRegion";
    case ErrorCode::MissingMesh: return "MissingMesh";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::UnknownRegion: return "UnknownRegion";
    case ErrorCode::NonNumericValue: return "NonNumericValue";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::BadColor: return "BadColor";
    case ErrorCode::EmptyScene: return "EmptyScene";
    case ErrorCode::UnknownStage: return "UnknownStage";
    case ErrorCode::UnsupportedView: return "UnsupportedView";
    case ErrorCode::TooFewStages: return "TooFewStages";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_io_error(ErrorCode code) { return code == ErrorCode::IoError; }

Error::Error(ErrorCode code, const std::string& message, std::string context)
    : std::runtime_error(message), code_(code), context_(std::move(context)) {}

Error Error::annotated(std::string_view prefix) const {
  return Error(code_, std::string(prefix) + ": " + what(), context_);
}

}  // namespace atlaspaint
