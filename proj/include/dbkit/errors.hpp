#pragma once

#include <stdexcept>
#include <string>

namespace dbkit {

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct OverflowError : Error {
  explicit OverflowError(const std::string& m) : Error("integer overflow: " + m) {}
};

struct DivideByZero : Error {
  explicit DivideByZero(const std::string& m) : Error("division by zero: " + m) {}
};

// Parse errors carry a source location (1-based line/column).
struct ParseError : Error {
  int line, col;
  ParseError(const std::string& m, int line_, int col_)
      : Error(m + " (line " + std::to_string(line_) + ", col " + std::to_string(col_) + ")"),
        line(line_), col(col_) {}
};

struct SemanticError : Error {
  explicit SemanticError(const std::string& m) : Error(m) {}
};

struct SingularMatrix : Error {
  explicit SingularMatrix(const std::string& m) : Error("singular matrix: " + m) {}
};

struct GaugeIncomplete : Error {
  std::string kernel_description;
  explicit GaugeIncomplete(const std::string& kernel)
      : Error("gauge fixing incomplete: residual first-class directions remain: " + kernel),
        kernel_description(kernel) {}
};

struct NonTermination : Error {
  explicit NonTermination(const std::string& m) : Error("consistency chain did not terminate: " + m) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error(m) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& m) : Error("internal error: " + m) {}
};

}  // namespace dbkit
