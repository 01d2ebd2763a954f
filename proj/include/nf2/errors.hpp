#pragma once

#include <stdexcept>
#include <string>

namespace nf2 {

/// Input data violates the event schema or a value-range invariant.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// A dataset file is structurally broken (bad magic, truncation, checksum).
struct FileFormatError : std::runtime_error {
    explicit FileFormatError(const std::string& what) : std::runtime_error(what) {}
};

/// A column path was requested that the projection or catalog does not contain.
struct UnknownColumnError : std::runtime_error {
    explicit UnknownColumnError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nf2
