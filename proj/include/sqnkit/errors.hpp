#pragma once

#include <stdexcept>
#include <string>

namespace sqnkit {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error { using Error::Error; };
class NumericError : public Error { using Error::Error; };
class IndexError : public Error { using Error::Error; };
class ArgumentError : public Error { using Error::Error; };
class SamplingError : public Error { using Error::Error; };
class ScheduleError : public Error { using Error::Error; };
class DegenerateStepError : public Error { using Error::Error; };

/// Malformed dataset text. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class LabelError : public ParseError { using ParseError::ParseError; };

class IoError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };

} // namespace sqnkit
