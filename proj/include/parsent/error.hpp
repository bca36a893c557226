#pragma once

#include <stdexcept>
#include <string>

namespace parsent {

/// Broad failure category; the CLI maps each one to a process exit code.
enum class ErrorKind {
  Config,   // exit 2
  Format,   // exit 3
  Numeric,  // exit 4
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define PARSENT_DEFINE_ERROR(Name, Kind)                          \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what)                        \
        : Error(ErrorKind::Kind, std::string(#Name ": ") + what) {} \
  };

PARSENT_DEFINE_ERROR(ConfigError, Config)
PARSENT_DEFINE_ERROR(FormatError, Format)
PARSENT_DEFINE_ERROR(EmptyDataset, Format)
PARSENT_DEFINE_ERROR(DimensionMismatch, Format)
PARSENT_DEFINE_ERROR(LengthMismatch, Format)
PARSENT_DEFINE_ERROR(EmptyVocabulary, Numeric)
PARSENT_DEFINE_ERROR(DegenerateClass, Numeric)
PARSENT_DEFINE_ERROR(EmptyClass, Numeric)
PARSENT_DEFINE_ERROR(SequenceTooShort, Numeric)

#undef PARSENT_DEFINE_ERROR

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Format: return 3;
    case ErrorKind::Numeric: return 4;
  }
  return 1;
}

}  // namespace parsent
