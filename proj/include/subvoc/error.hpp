#pragma once

#include <stdexcept>
#include <string>

namespace subvoc {

// Base class for all toolkit errors. The CLI maps UsageError to exit code 1
// and every other Error to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments or preconditions violated by the caller.
class UsageError : public Error {
public:
    using Error::Error;
};

// Stream or file I/O failure. Message carries the source and the line
// number reached when known.
class IoError : public Error {
public:
    using Error::Error;
};

// Invalid text encoding. Message names the byte offset of the offending
// byte within the line.
class DecodeError : public Error {
public:
    using Error::Error;
};

// Malformed file contents (headers, dimensions, numeric fields).
class FormatError : public Error {
public:
    using Error::Error;
};

// Semantically invalid data: empty corpora, vocabulary mismatches,
// model/tokenization disagreements.
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace subvoc
