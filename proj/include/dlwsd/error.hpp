#ifndef DLWSD_ERROR_HPP
#define DLWSD_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dlwsd {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

} // namespace dlwsd

#endif
