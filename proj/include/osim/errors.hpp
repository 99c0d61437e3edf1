#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace osim {

// Base class for all simulator errors.
class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Out-of-range or malformed parameter; carries the offending parameter name.
class InvalidParams : public SimError {
public:
    InvalidParams(std::string param, const std::string& reason)
        : SimError(param + ": " + reason), param_(std::move(param)) {}
    const std::string& param() const noexcept { return param_; }

private:
    std::string param_;
};

class ParseError : public SimError {
public:
    ParseError(std::size_t line, const std::string& reason)
        : SimError("line " + std::to_string(line) + ": " + reason), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

class SelfLoopError : public SimError {
public:
    explicit SelfLoopError(std::size_t line)
        : SimError("line " + std::to_string(line) + ": self-loop edge"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

class IdOutOfRangeError : public SimError {
public:
    IdOutOfRangeError(std::size_t line, unsigned long long id, unsigned long long n)
        : SimError("line " + std::to_string(line) + ": node id " + std::to_string(id) +
                   " out of range for node count " + std::to_string(n)),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

// Config or field validation failure; carries the dotted field path.
class ValidationError : public SimError {
public:
    ValidationError(std::string field, const std::string& reason)
        : SimError(field + ": " + reason), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class PotencyOutOfRange : public SimError {
public:
    PotencyOutOfRange(int potency, int p_max)
        : SimError("potency " + std::to_string(potency) + " outside [1, " +
                   std::to_string(p_max) + "]") {}
};

class NonFiniteError : public SimError {
public:
    NonFiniteError() : SimError("non-finite value") {}
};

// Remote agent backend failed after all retries.
class BackendUnavailable : public SimError {
public:
    using SimError::SimError;
};

// Required API key environment variable is unset.
class AuthMissing : public SimError {
public:
    using SimError::SimError;
};

class TranscriptExhausted : public SimError {
public:
    TranscriptExhausted() : SimError("transcript has no recorded messages") {}
};

class RoundMismatch : public SimError {
public:
    explicit RoundMismatch(int round)
        : SimError("transcript has no entry for round " + std::to_string(round)), round_(round) {}
    int round() const noexcept { return round_; }

private:
    int round_ = 0;
};

// Run bundle failed a cross-file consistency check; carries the failing file.
class BundleError : public SimError {
public:
    BundleError(std::string file, const std::string& reason)
        : SimError(file + ": " + reason), file_(std::move(file)) {}
    const std::string& file() const noexcept { return file_; }

private:
    std::string file_;
};

}  // namespace osim
