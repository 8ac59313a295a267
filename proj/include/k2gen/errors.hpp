#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace k2gen {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Contract violation on an argument (bad K, size mismatch, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The graph has no edges and the requested operation needs at least one.
class EmptyGraphError : public Error {
public:
    EmptyGraphError() : Error("empty graph: no edges to encode") {}
};

enum class DecodeErrc {
    trailing_tokens,   // queue emptied before the sequence ended
    truncated,         // sequence ended with frontier nodes still queued
    kind_mismatch,     // diagonal token where off-diagonal expected or vice versa
    arity_mismatch,    // wrong number of elements for the token kind
    all_zero,          // all-zero group under an attr-1 parent
    invalid_value,     // element outside its admissible domain
    padding_violation, // nonzero cell outside the original node range
    invalid_tree,      // tree arena violates the structural conditions
    already_complete,  // step applied to a finished builder
};

const char* to_string(DecodeErrc code) noexcept;

class DecodeError : public Error {
public:
    DecodeError(DecodeErrc code, const std::string& detail)
        : Error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    DecodeErrc code() const noexcept { return code_; }

private:
    DecodeErrc code_;
};

enum class SamplingErrc { max_length, zero_mass, no_admissible_token };

class SamplingError : public Error {
public:
    SamplingError(SamplingErrc code, const std::string& what) : Error(what), code_(code) {}

    SamplingErrc code() const noexcept { return code_; }

private:
    SamplingErrc code_;
};

} // namespace k2gen
