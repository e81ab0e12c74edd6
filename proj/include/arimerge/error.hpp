#pragma once

#include <stdexcept>
#include <string>

namespace arimerge {

enum class ErrorKind {
  SeriesTooShort,
  SeedMismatch,
  NonFinite,
  UnsupportedSpec,
  DegenerateData,
  InsufficientHistory,
  SpecMismatch,
  WindowLengthMismatch,
  OddInput,
  Overflow,
  TooLarge,
  EmptyInput,
  EmptySubtree,
  InconsistentColumns,
  InvalidInput,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::SeedMismatch: return "SeedMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::UnsupportedSpec: return "UnsupportedSpec";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::InsufficientHistory: return "InsufficientHistory";
    case ErrorKind::SpecMismatch: return "SpecMismatch";
    case ErrorKind::WindowLengthMismatch: return "WindowLengthMismatch";
    case ErrorKind::OddInput: return "OddInput";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptySubtree: return "EmptySubtree";
    case ErrorKind::InconsistentColumns: return "InconsistentColumns";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

/// Numeric failures (as opposed to bad input) map to CLI exit code 2.
inline bool is_numeric_failure(ErrorKind kind) {
  return kind == ErrorKind::DegenerateData || kind == ErrorKind::Overflow;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace arimerge
