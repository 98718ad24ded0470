#pragma once

#include <stdexcept>
#include <string>

namespace fpad {

enum class Errc {
  InvalidSpace,
  InvalidData,
  InsufficientData,
  DegenerateConfiguration,
  MissingMetadata,
  Unsupported,
  OutOfBounds,
  DimensionMismatch,
  ImageTooSmall,
  DescriptorMismatch,
  DegenerateLabels,
  ParseError,
  ProtocolInfeasible,
  MissingStream,
  EmptyInput,
  IoError,
  InvalidArgument,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fpad
