#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace supertok {

// Error taxonomy mirrored by the CLI exit codes:
//   ValidationError -> 1, IoError -> 2, InternalError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class InternalError : public Error {
public:
    using Error::Error;
};

class MalformedRecord : public ValidationError {
public:
    MalformedRecord(std::size_t line, const std::string& what)
        : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class OffsetMismatch : public ValidationError {
public:
    OffsetMismatch(std::string trace_id, const std::string& what)
        : ValidationError("trace '" + trace_id + "': " + what), trace_id_(std::move(trace_id)) {}
    const std::string& trace_id() const { return trace_id_; }

private:
    std::string trace_id_;
};

class EntropyLengthMismatch : public ValidationError {
public:
    EntropyLengthMismatch(std::string trace_id, std::size_t entropies, std::size_t tokens)
        : ValidationError("trace '" + trace_id + "': " + std::to_string(entropies) +
                          " entropy values for " + std::to_string(tokens) + " tokens"),
          trace_id_(std::move(trace_id)) {}
    const std::string& trace_id() const { return trace_id_; }

private:
    std::string trace_id_;
};

class MissingEntropy : public ValidationError {
public:
    explicit MissingEntropy(std::string trace_id)
        : ValidationError("trace '" + trace_id + "' carries no entropy values"),
          trace_id_(std::move(trace_id)) {}
    const std::string& trace_id() const { return trace_id_; }

private:
    std::string trace_id_;
};

class PrefixOutOfRange : public ValidationError {
public:
    PrefixOutOfRange(std::size_t prefix, std::size_t table_size)
        : ValidationError("prefix " + std::to_string(prefix) + " exceeds table size " +
                          std::to_string(table_size)) {}
};

class UnknownBaseToken : public ValidationError {
public:
    UnknownBaseToken(std::size_t position, const std::string& text)
        : ValidationError("token '" + text + "' at position " + std::to_string(position) +
                          " is not in the base vocabulary"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class InconsistentTable : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DimensionMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NonPositiveVocab : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class RoleMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnmappedSupertoken : public ValidationError {
public:
    explicit UnmappedSupertoken(std::uint32_t id)
        : ValidationError("supertoken id " + std::to_string(id) + " is not in the category map"),
          id_(id) {}
    std::uint32_t id() const { return id_; }

private:
    std::uint32_t id_;
};

class EmptyGroup : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class WindowOutOfRange : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidProportion : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidInput : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace supertok
