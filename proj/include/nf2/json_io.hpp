#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

#include "nf2/model.hpp"

namespace nf2 {

/// Parses one JSON-lines event. All keys are mandatory; lists may be empty.
/// Throws SchemaError with the offending key or type on malformed input.
Event parse_event_line(std::string_view line);

/// Serializes an event to a single JSON line (no trailing newline).
/// Numbers use shortest round-trip decimals, so output is deterministic.
std::string to_json_line(const Event& e);

/// Reads a JSON-lines stream, invoking sink per event. Parse errors are
/// rethrown as SchemaError prefixed with the 1-based line number.
void for_each_jsonl_event(std::istream& in, const std::function<void(Event&&)>& sink);

}  // namespace nf2
