#ifndef PLANET_ERROR_HPP
#define PLANET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace planet {

// One code per user-facing failure mode. The CLI maps these onto exit codes.
enum class Errc {
  // source-language diagnostics
  SyntaxError,
  DuplicateVariable,
  DuplicateName,
  UnknownIdentifier,
  ArityError,
  InvalidLevel,
  MissingAssign,
  DuplicateAssign,

  // condition algebra
  ProjectionError,
  VariableOverlap,

  // design resolution
  UnsatisfiableShape,
  MissingTrialCount,
  CrossArityMismatch,
  PartialNestingUnsupported,
  UnsupportedMethod,

  // solving
  Unsatisfiable,
  Timeout,
  DesignTooLarge,

  // assignment
  UnevenPartition,

  // verification and file I/O
  ShapeMismatch,
  DivisibilityError,
  CsvFormat,
  IoError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message);
  Error(Errc code, const std::string& message, int line, int col);

  Errc code() const noexcept { return code_; }
  // 1-based source position; 0 when the error has no source location.
  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }

private:
  Errc code_;
  int line_ = 0;
  int col_ = 0;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace planet

#endif  // PLANET_ERROR_HPP
