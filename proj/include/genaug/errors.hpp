#pragma once

#include <stdexcept>
#include <string>

namespace genaug {

// Base of all library errors. CLI maps UsageError -> exit 1,
// DataError -> exit 2, everything else -> exit 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct MissingFileError : DataError {
    explicit MissingFileError(const std::string& path)
        : DataError("missing file: " + path) {}
};

struct IoError : DataError {
    explicit IoError(const std::string& what) : DataError("io error: " + what) {}
};

struct MalformedRowError : DataError {
    MalformedRowError(std::size_t line, const std::string& what)
        : DataError("malformed row at line " + std::to_string(line) + ": " + what),
          line(line) {}
    std::size_t line;
};

struct UnknownLabelError : DataError {
    UnknownLabelError(const std::string& value, std::size_t line)
        : DataError("unknown label \"" + value + "\" at line " + std::to_string(line)),
          value(value),
          line(line) {}
    std::string value;
    std::size_t line;
};

struct DatasetTooSmallError : DataError {
    explicit DatasetTooSmallError(std::size_t size)
        : DataError("dataset too small to split: " + std::to_string(size) + " examples") {}
};

struct NotEnoughNonHateError : DataError {
    NotEnoughNonHateError(std::size_t needed, std::size_t available)
        : DataError("not enough non-hate examples: need " + std::to_string(needed) +
                    ", have " + std::to_string(available)),
          needed(needed),
          available(available) {}
    std::size_t needed;
    std::size_t available;
};

struct EmptyCorpusError : DataError {
    using DataError::DataError;
};

struct SingleClassCorpusError : DataError {
    using DataError::DataError;
};

struct TokenIdOutOfRangeError : DataError {
    TokenIdOutOfRangeError(long long id, long long vocab_size)
        : DataError("token id " + std::to_string(id) + " out of range for vocabulary of " +
                    std::to_string(vocab_size)) {}
};

struct EmptyEvaluationError : DataError {
    using DataError::DataError;
};

struct EmptySequenceError : DataError {
    using DataError::DataError;
};

struct RowSumMismatchError : DataError {
    RowSumMismatchError(std::size_t row, long long sum, long long expected)
        : DataError("ratings row " + std::to_string(row) + " sums to " + std::to_string(sum) +
                    ", expected " + std::to_string(expected)) {}
};

struct ZeroBaselineError : DataError {
    ZeroBaselineError() : DataError("relative change undefined for zero baseline") {}
};

struct MissingArtifactsError : DataError {
    explicit MissingArtifactsError(const std::string& listing)
        : DataError("missing artifacts: " + listing) {}
};

struct InsufficientAnnotatorsError : DataError {
    explicit InsufficientAnnotatorsError(std::size_t n)
        : DataError("need at least 2 annotators for agreement, have " + std::to_string(n)) {}
};

struct IncompleteReplayFileError : DataError {
    explicit IncompleteReplayFileError(const std::string& what) : DataError("replay file: " + what) {}
    IncompleteReplayFileError(std::size_t line, const std::string& what)
        : DataError("replay file line " + std::to_string(line) + ": " + what) {}
};

// Raised when a test-side example reaches a training path.
struct LeakageError : Error {
    explicit LeakageError(const std::string& where)
        : Error("test-side example reached " + where) {}
};

}  // namespace genaug
