#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nf2/columnar.hpp"
#include "nf2/errors.hpp"

namespace nf2 {

inline constexpr std::int64_t kDefaultRowGroupSize = 400000;

struct RowGroupMeta {
    std::uint64_t byte_offset = 0;  // payload position from file start
    std::uint64_t byte_size = 0;
    std::int64_t num_events = 0;
};

/// Streams events into a native dataset file. Events are partitioned in
/// append order into row groups of row_group_size (the last may be smaller).
/// Nothing is visible at `path` until finish() succeeds.
class DatasetWriter {
public:
    explicit DatasetWriter(std::string path, std::int64_t row_group_size = kDefaultRowGroupSize);
    ~DatasetWriter();
    DatasetWriter(const DatasetWriter&) = delete;
    DatasetWriter& operator=(const DatasetWriter&) = delete;

    void append(const Event& event);
    /// Appends a pre-encoded row-group payload verbatim (used for scaling).
    void append_raw_row_group(std::span<const std::byte> payload, std::int64_t num_events);

    /// Flushes buffered events and writes the final file. Returns the
    /// row-group count.
    std::int64_t finish();

    std::int64_t events_written() const { return total_events_; }

private:
    void flush_buffer();
    void stage_payload(std::span<const std::byte> payload, std::int64_t num_events);

    std::string path_;
    std::string tmp_path_;
    std::int64_t row_group_size_;
    std::vector<Event> buffer_;
    std::vector<RowGroupMeta> groups_;  // byte_offset filled in at finish()
    std::int64_t total_events_ = 0;
    bool finished_ = false;
};

/// Memory-light random-access reader. Positioned reads keep concurrent
/// read_row_group calls safe without locking.
class DatasetReader {
public:
    explicit DatasetReader(std::string path);  // throws FileFormatError
    ~DatasetReader();
    DatasetReader(const DatasetReader&) = delete;
    DatasetReader& operator=(const DatasetReader&) = delete;

    std::int64_t num_row_groups() const { return static_cast<std::int64_t>(groups_.size()); }
    std::int64_t total_events() const { return total_events_; }
    const std::vector<RowGroupMeta>& row_groups() const { return groups_; }
    const std::string& path() const { return path_; }

    struct ReadResult {
        ColumnarRowGroup rg;
        std::uint64_t bytes_read = 0;  // sum of decoded column blob sizes
    };
    ReadResult read_row_group(std::int64_t index, const Projection& projection) const;

    /// Raw payload bytes of one row group, for verbatim re-writing.
    std::vector<std::byte> read_raw_payload(std::int64_t index) const;

private:
    void pread_exact(void* dst, std::size_t len, std::uint64_t offset) const;

    std::string path_;
    int fd_ = -1;
    std::uint64_t file_size_ = 0;
    std::int64_t total_events_ = 0;
    std::vector<RowGroupMeta> groups_;
};

/// Converts a JSON-lines event file into a native dataset. Returns the
/// row-group count. Malformed lines raise SchemaError naming the line;
/// invariant violations raise SchemaError naming event_id and field.
std::int64_t ingest_jsonl(const std::string& in_path, const std::string& out_path,
                          std::int64_t row_group_size = kDefaultRowGroupSize);

/// Writes a copy of `in_path` scaled by sf = 2^exponent, exponent in
/// [-16, 7]. sf >= 1 repeats the whole file sf times in order; sf < 1 keeps
/// the first ceil(sf * num_events) events. Returns events written.
std::int64_t replicate_scale(const std::string& in_path, const std::string& out_path,
                             int exponent);

/// Full structural validation: header, checksum, row-group invariants, and
/// per-event value constraints. Returns a description of the first problem,
/// or nullopt if the file is valid.
std::optional<std::string> validate_file(const std::string& path);

}  // namespace nf2
