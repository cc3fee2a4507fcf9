#pragma once

#include <stdexcept>
#include <string>

namespace cohortc {

/// Base error for every failure the library reports by exception.
///
/// `code()` is a stable machine-readable reason ("SyntaxError",
/// "UnknownSmm", ...) that the CLI and the HTTP layer surface verbatim.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// An error anchored at a character offset in some input text.
class PositionedError : public Error {
public:
    PositionedError(std::string code, std::size_t position, const std::string& message)
        : Error(std::move(code), message + " at offset " + std::to_string(position)),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// An error anchored at a 1-based line of an input file.
class LineError : public Error {
public:
    LineError(std::string code, std::size_t line, const std::string& message)
        : Error(std::move(code), "line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace cohortc
