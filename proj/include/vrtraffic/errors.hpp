#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace vrtraffic {

// Input bytes could not be parsed (trace file, frames file, model file).
// Carries the 1-based physical line and the offending field when known.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& message, std::size_t line = 0,
                      std::string field = {})
      : std::runtime_error(format(message, line, field)),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

private:
  static std::string format(const std::string& message, std::size_t line,
                            const std::string& field) {
    std::string out = message;
    if (line > 0) {
      out += " (line " + std::to_string(line);
      if (!field.empty()) out += ", field " + field;
      out += ")";
    } else if (!field.empty()) {
      out += " (field " + field + ")";
    }
    return out;
  }

  std::size_t line_;
  std::string field_;
};

// Well-formed input on which the requested computation is undefined:
// no video flow, too few frames, degenerate samples, bad parameters.
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string& message)
      : std::runtime_error(message) {}
};

}  // namespace vrtraffic
