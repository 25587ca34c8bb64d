#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace satira {

// Any failure caused by input data (malformed files, degenerate samples,
// mismatched dimensions). The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// DataError tied to a 1-based line of an input file.
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace satira
