#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tnorm {

// Malformed input data. Carries the source name and 1-based line; line 0 means
// the problem concerns the whole input.
class FormatError : public std::runtime_error {
public:
    FormatError(std::string source, std::size_t line, const std::string& what)
        : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          source_(std::move(source)),
          line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tnorm
