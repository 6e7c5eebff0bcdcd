#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atlaspaint {

enum class ErrorCode {
  // mesh-io
  MissingMagic,
  UnsupportedFormat,
  CountMismatch,
  IndexOutOfRange,
  // atlas
  ParseError,
  DuplicateRegion,
  MissingMesh,
  SingularTransform,
  // biomarker
  BadHeader,
  UnknownRegion,
  NonNumericValue,
  OutOfRange,
  NegativeValue,
  // colormap
  BadColor,
  // renderer / compose
  EmptyScene,
  UnknownStage,
  UnsupportedView,
  TooFewStages,
  // cli
  ConfigError,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code);

// True for errors caused by the environment (files, disks) rather than by
// the content of the inputs. The CLI maps these to a distinct exit code.
bool is_io_error(ErrorCode code);

// Every failure in the library is reported as an Error. `context` carries a
// locator for the offending input where one exists: a config key path such as
// `colors[0]`, a CSV column name, or a region id.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string context = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& context() const noexcept { return context_; }

  // Returns a copy whose message is prefixed with `prefix: `.
  Error annotated(std::string_view prefix) const;

 private:
  ErrorCode code_;
  std::string context_;
};

}  // namespace atlaspaint
