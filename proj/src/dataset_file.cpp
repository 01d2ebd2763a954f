#include "nf2/dataset_file.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <utility>

#include "nf2/json_io.hpp"
#include "nf2/model.hpp"

namespace nf2 {

namespace {

constexpr std::array<char, 4> kMagic = {'N', 'F', '2', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kIndexEntrySize = 3 * sizeof(std::uint64_t);
constexpr std::size_t kDirEntrySize = 2 * sizeof(std::uint64_t);
constexpr std::size_t kNumColumns = 23;
// payload: u64 num_events, column directory, column blobs
constexpr std::size_t kPayloadHeaderSize = sizeof(std::uint64_t) + kNumColumns * kDirEntrySize;

enum class ColType { i64, f32, i8 };

ColType column_type(std::string_view path) {
    if (path == "event_id" || path == "run" || path.ends_with(".offsets")) return ColType::i64;
    if (path.ends_with(".charge")) return ColType::i8;
    return ColType::f32;
}

std::size_t elem_size(ColType t) {
    switch (t) {
        case ColType::i64: return 8;
        case ColType::f32: return 4;
        case ColType::i8: return 1;
    }
    return 0;
}

struct Fnv1a {
    std::uint64_t state = 14695981039346656037ull;
    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            state ^= p[i];
            state *= 1099511628211ull;
        }
    }
};

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<std::byte>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::byte* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(std::to_integer<unsigned>(p[i])) << (8 * i);
    return v;
}

std::uint64_t get_u64(const std::byte* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(std::to_integer<unsigned>(p[i])) << (8 * i);
    return v;
}

void append_blob_i64(std::vector<std::byte>& out, const std::vector<std::int64_t>& values) {
    put_u64(out, values.size());
    for (std::int64_t v : values) put_u64(out, static_cast<std::uint64_t>(v));
}

void append_blob_f32(std::vector<std::byte>& out, const std::vector<double>& values) {
    put_u64(out, values.size());
    for (double v : values) {
        const float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(out, bits);
    }
}

void append_blob_i8(std::vector<std::byte>& out, const std::vector<double>& values) {
    put_u64(out, values.size());
    for (double v : values)
        out.push_back(static_cast<std::byte>(static_cast<std::int8_t>(std::llround(v))));
}

const NestedListColumn& collection_of(const ColumnarRowGroup& rg, std::string_view name) {
    if (name == "jets") return rg.jets;
    if (name == "muons") return rg.muons;
    return rg.electrons;
}

NestedListColumn& collection_of(ColumnarRowGroup& rg, std::string_view name) {
    if (name == "jets") return rg.jets;
    if (name == "muons") return rg.muons;
    return rg.electrons;
}

/// Encodes a fully-projected row group into its on-disk payload.
std::vector<std::byte> encode_row_group(const ColumnarRowGroup& rg) {
    const auto catalog = column_catalog();
    std::vector<std::byte> blobs;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> dir;  // rel_offset, byte_size
    dir.reserve(kNumColumns);

    for (std::string_view path : catalog) {
        const std::size_t start = blobs.size();
        if (path == "event_id") {
            append_blob_i64(blobs, rg.event_id_col());
        } else if (path == "run") {
            append_blob_i64(blobs, rg.run_col());
        } else if (path == "met.pt") {
            append_blob_f32(blobs, rg.met_pt_col());
        } else if (path == "met.phi") {
            append_blob_f32(blobs, rg.met_phi_col());
        } else if (path == "met.sumet") {
            append_blob_f32(blobs, rg.met_sumet_col());
        } else {
            const auto dot = path.find('.');
            const NestedListColumn& col = collection_of(rg, path.substr(0, dot));
            const std::string_view field = path.substr(dot + 1);
            if (field == "offsets")
                append_blob_i64(blobs, col.offsets);
            else if (field == "charge")
                append_blob_i8(blobs, col.field(field));
            else
                append_blob_f32(blobs, col.field(field));
        }
        dir.emplace_back(kPayloadHeaderSize + start, blobs.size() - start);
    }

    std::vector<std::byte> payload;
    payload.reserve(kPayloadHeaderSize + blobs.size());
    put_u64(payload, static_cast<std::uint64_t>(rg.num_events));
    for (const auto& [off, size] : dir) {
        put_u64(payload, off);
        put_u64(payload, size);
    }
    payload.insert(payload.end(), blobs.begin(), blobs.end());
    return payload;
}

void write_all(std::ofstream& out, std::span<const std::byte> bytes) {
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

DatasetWriter::DatasetWriter(std::string path, std::int64_t row_group_size)
    : path_(std::move(path)), tmp_path_(path_ + ".tmp"), row_group_size_(row_group_size) {
    if (row_group_size_ < 1) throw std::invalid_argument("row_group_size must be >= 1");
    std::ofstream probe(tmp_path_, std::ios::binary | std::ios::trunc);
    if (!probe) throw FileFormatError("cannot open '" + tmp_path_ + "' for writing");
}

DatasetWriter::~DatasetWriter() {
    if (!finished_) std::remove(tmp_path_.c_str());
}

void DatasetWriter::append(const Event& event) {
    buffer_.push_back(event);
    if (static_cast<std::int64_t>(buffer_.size()) == row_group_size_) flush_buffer();
}

void DatasetWriter::flush_buffer() {
    if (buffer_.empty()) return;
    const auto payload = encode_row_group(events_to_row_group(buffer_));
    stage_payload(payload, static_cast<std::int64_t>(buffer_.size()));
    buffer_.clear();
}

void DatasetWriter::append_raw_row_group(std::span<const std::byte> payload,
                                         std::int64_t num_events) {
    flush_buffer();
    stage_payload(payload, num_events);
}

void DatasetWriter::stage_payload(std::span<const std::byte> payload, std::int64_t num_events) {
    std::ofstream tmp(tmp_path_, std::ios::binary | std::ios::app);
    write_all(tmp, payload);
    if (!tmp) throw FileFormatError("write to '" + tmp_path_ + "' failed");
    groups_.push_back({0, payload.size(), num_events});
    total_events_ += num_events;
}

std::int64_t DatasetWriter::finish() {
    if (finished_) throw std::logic_error("DatasetWriter::finish called twice");
    flush_buffer();

    const std::uint64_t header_size =
        kMagic.size() + sizeof(kVersion) + 2 * sizeof(std::uint64_t) + groups_.size() * kIndexEntrySize;
    std::uint64_t offset = header_size;
    for (auto& g : groups_) {
        g.byte_offset = offset;
        offset += g.byte_size;
    }

    std::vector<std::byte> header;
    header.reserve(header_size);
    for (char c : kMagic) header.push_back(static_cast<std::byte>(c));
    put_u32(header, kVersion);
    put_u64(header, groups_.size());
    put_u64(header, static_cast<std::uint64_t>(total_events_));
    for (const auto& g : groups_) {
        put_u64(header, g.byte_offset);
        put_u64(header, g.byte_size);
        put_u64(header, static_cast<std::uint64_t>(g.num_events));
    }

    Fnv1a hash;
    const std::string staged = path_ + ".staged";
    std::ofstream out(staged, std::ios::binary | std::ios::trunc);
    if (!out) throw FileFormatError("cannot open '" + staged + "' for writing");
    write_all(out, header);
    hash.update(header.data(), header.size());

    std::ifstream tmp(tmp_path_, std::ios::binary);
    std::vector<char> chunk(1 << 20);
    while (tmp) {
        tmp.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
        const auto got = tmp.gcount();
        if (got <= 0) break;
        out.write(chunk.data(), got);
        hash.update(chunk.data(), static_cast<std::size_t>(got));
    }

    std::vector<std::byte> footer;
    put_u64(footer, hash.state);
    write_all(out, footer);
    out.close();
    if (!out || std::rename(staged.c_str(), path_.c_str()) != 0) {
        std::remove(staged.c_str());
        throw FileFormatError("write to '" + path_ + "' failed");
    }
    finished_ = true;
    std::remove(tmp_path_.c_str());
    return static_cast<std::int64_t>(groups_.size());
}

DatasetReader::DatasetReader(std::string path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_RDONLY);
    if (fd_ < 0)
        throw FileFormatError("cannot open '" + path_ + "': " + std::strerror(errno));
    struct stat st {};
    if (::fstat(fd_, &st) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw FileFormatError("cannot stat '" + path_ + "'");
    }
    file_size_ = static_cast<std::uint64_t>(st.st_size);

    try {
        const std::size_t fixed = kMagic.size() + 4 + 16;
        if (file_size_ < fixed + 8) throw FileFormatError("file too small for header and footer");
        std::vector<std::byte> head(fixed);
        pread_exact(head.data(), head.size(), 0);
        if (std::memcmp(head.data(), kMagic.data(), kMagic.size()) != 0)
            throw FileFormatError("bad magic, not a dataset file");
        if (const auto v = get_u32(head.data() + 4); v != kVersion)
            throw FileFormatError("unsupported format version " + std::to_string(v));
        const std::uint64_t num_groups = get_u64(head.data() + 8);
        total_events_ = static_cast<std::int64_t>(get_u64(head.data() + 16));

        const std::uint64_t index_bytes = num_groups * kIndexEntrySize;
        if (file_size_ < fixed + index_bytes + 8)
            throw FileFormatError("file too small for declared row-group index");
        std::vector<std::byte> index(index_bytes);
        if (index_bytes > 0) pread_exact(index.data(), index.size(), fixed);

        groups_.reserve(num_groups);
        std::int64_t counted = 0;
        for (std::uint64_t g = 0; g < num_groups; ++g) {
            const std::byte* e = index.data() + g * kIndexEntrySize;
            RowGroupMeta meta{get_u64(e), get_u64(e + 8), static_cast<std::int64_t>(get_u64(e + 16))};
            if (meta.byte_offset < fixed + index_bytes || meta.byte_offset > file_size_ - 8 ||
                meta.byte_size > file_size_ - 8 - meta.byte_offset ||
                meta.byte_size < kPayloadHeaderSize)
                throw FileFormatError("row group " + std::to_string(g) + " extent out of bounds");
            counted += meta.num_events;
            groups_.push_back(meta);
        }
        if (counted != total_events_)
            throw FileFormatError("header event total does not match row-group index");
    } catch (...) {
        ::close(fd_);
        fd_ = -1;
        throw;
    }
}

DatasetReader::~DatasetReader() {
    if (fd_ >= 0) ::close(fd_);
}

void DatasetReader::pread_exact(void* dst, std::size_t len, std::uint64_t offset) const {
    auto* p = static_cast<char*>(dst);
    while (len > 0) {
        const ssize_t got = ::pread(fd_, p, len, static_cast<off_t>(offset));
        if (got < 0) {
            if (errno == EINTR) continue;
            throw FileFormatError("read of '" + path_ + "' failed: " + std::strerror(errno));
        }
        if (got == 0) throw FileFormatError("unexpected end of '" + path_ + "'");
        p += got;
        len -= static_cast<std::size_t>(got);
        offset += static_cast<std::uint64_t>(got);
    }
}

std::vector<std::byte> DatasetReader::read_raw_payload(std::int64_t index) const {
    if (index < 0 || index >= num_row_groups())
        throw std::out_of_range("row-group index out of range");
    const auto& meta = groups_[static_cast<std::size_t>(index)];
    std::vector<std::byte> payload(meta.byte_size);
    pread_exact(payload.data(), payload.size(), meta.byte_offset);
    return payload;
}

DatasetReader::ReadResult DatasetReader::read_row_group(std::int64_t index,
                                                        const Projection& projection) const {
    if (index < 0 || index >= num_row_groups())
        throw std::out_of_range("row-group index out of range");
    const auto& meta = groups_[static_cast<std::size_t>(index)];

    std::array<std::byte, kPayloadHeaderSize> head;
    pread_exact(head.data(), head.size(), meta.byte_offset);
    const auto declared = static_cast<std::int64_t>(get_u64(head.data()));
    if (declared != meta.num_events)
        throw FileFormatError("row group " + std::to_string(index) +
                              " payload event count disagrees with index");

    ReadResult result;
    ColumnarRowGroup& rg = result.rg;
    rg.num_events = meta.num_events;

    const auto catalog = column_catalog();
    for (std::size_t c = 0; c < kNumColumns; ++c) {
        const std::string_view path = catalog[c];
        if (!projection.contains(path)) continue;

        const std::byte* e = head.data() + 8 + c * kDirEntrySize;
        const std::uint64_t rel = get_u64(e);
        const std::uint64_t size = get_u64(e + 8);
        if (size < 8 || rel > meta.byte_size || size > meta.byte_size - rel)
            throw FileFormatError("column '" + std::string(path) + "' extent out of bounds");

        std::vector<std::byte> blob(size);
        pread_exact(blob.data(), blob.size(), meta.byte_offset + rel);
        const std::uint64_t count = get_u64(blob.data());
        const ColType type = column_type(path);
        if ((size - 8) % elem_size(type) != 0 || count != (size - 8) / elem_size(type))
            throw FileFormatError("column '" + std::string(path) + "' length prefix disagrees");
        result.bytes_read += size;

        const std::byte* data = blob.data() + 8;
        if (path == "event_id" || path == "run") {
            std::vector<std::int64_t> values(count);
            for (std::uint64_t i = 0; i < count; ++i)
                values[i] = static_cast<std::int64_t>(get_u64(data + i * 8));
            (path == "event_id" ? rg.event_id : rg.run) = std::move(values);
        } else if (path.starts_with("met.")) {
            std::vector<double> values(count);
            for (std::uint64_t i = 0; i < count; ++i) {
                const std::uint32_t bits = get_u32(data + i * 4);
                float f;
                std::memcpy(&f, &bits, 4);
                values[i] = static_cast<double>(f);
            }
            auto& slot = path == "met.pt" ? rg.met_pt : path == "met.phi" ? rg.met_phi : rg.met_sumet;
            slot = std::move(values);
        } else {
            const auto dot = path.find('.');
            NestedListColumn& col = collection_of(rg, path.substr(0, dot));
            const std::string_view field = path.substr(dot + 1);
            if (field == "offsets") {
                col.offsets.resize(count);
                for (std::uint64_t i = 0; i < count; ++i)
                    col.offsets[i] = static_cast<std::int64_t>(get_u64(data + i * 8));
            } else if (type == ColType::i8) {
                std::vector<double> values(count);
                for (std::uint64_t i = 0; i < count; ++i)
                    values[i] = static_cast<double>(static_cast<std::int8_t>(std::to_integer<unsigned char>(data[i])));
                col.fields[std::string(field)] = std::move(values);
            } else {
                std::vector<double> values(count);
                for (std::uint64_t i = 0; i < count; ++i) {
                    const std::uint32_t bits = get_u32(data + i * 4);
                    float f;
                    std::memcpy(&f, &bits, 4);
                    values[i] = static_cast<double>(f);
                }
                col.fields[std::string(field)] = std::move(values);
            }
        }
    }

    if (auto problem = check_row_group(rg))
        throw FileFormatError("row group " + std::to_string(index) + ": " + *problem);
    return result;
}

std::int64_t ingest_jsonl(const std::string& in_path, const std::string& out_path,
                          std::int64_t row_group_size) {
    std::ifstream in(in_path);
    if (!in) throw FileFormatError("cannot open '" + in_path + "'");
    DatasetWriter writer(out_path, row_group_size);
    for_each_jsonl_event(in, [&](Event&& event) {
        if (auto problem = validate_event(event))
            throw SchemaError("event_id " + std::to_string(event.event_id) + ": " + *problem);
        writer.append(event);
    });
    return writer.finish();
}

std::int64_t replicate_scale(const std::string& in_path, const std::string& out_path,
                             int exponent) {
    if (exponent < -16 || exponent > 7)
        throw std::invalid_argument("scale exponent must be in [-16, 7]");
    DatasetReader reader(in_path);
    DatasetWriter writer(out_path);

    if (exponent >= 0) {
        const std::int64_t sf = std::int64_t{1} << exponent;
        for (std::int64_t rep = 0; rep < sf; ++rep)
            for (std::int64_t g = 0; g < reader.num_row_groups(); ++g)
                writer.append_raw_row_group(reader.read_raw_payload(g),
                                            reader.row_groups()[static_cast<std::size_t>(g)].num_events);
    } else {
        if (reader.total_events() == 0)
            throw std::invalid_argument("cannot scale down an empty dataset");
        const std::int64_t denom = std::int64_t{1} << -exponent;
        std::int64_t remaining = (reader.total_events() + denom - 1) / denom;
        for (std::int64_t g = 0; g < reader.num_row_groups() && remaining > 0; ++g) {
            const auto& meta = reader.row_groups()[static_cast<std::size_t>(g)];
            if (meta.num_events <= remaining) {
                writer.append_raw_row_group(reader.read_raw_payload(g), meta.num_events);
                remaining -= meta.num_events;
            } else {
                auto full = reader.read_row_group(g, Projection::all());
                const auto sliced = slice_row_group_prefix(full.rg, remaining);
                writer.append_raw_row_group(encode_row_group(sliced), remaining);
                remaining = 0;
            }
        }
    }
    writer.finish();
    return writer.events_written();
}

std::optional<std::string> validate_file(const std::string& path) {
    // checksum pass over everything before the 8-byte footer
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) return "cannot open '" + path + "'";
        in.seekg(0, std::ios::end);
        const auto size = static_cast<std::uint64_t>(in.tellg());
        if (size < 8) return "file too small for checksum footer";
        in.seekg(0);
        Fnv1a hash;
        std::uint64_t left = size - 8;
        std::vector<char> chunk(1 << 20);
        while (left > 0) {
            const auto want = static_cast<std::streamsize>(std::min<std::uint64_t>(left, chunk.size()));
            in.read(chunk.data(), want);
            if (in.gcount() != want) return "short read during checksum pass";
            hash.update(chunk.data(), static_cast<std::size_t>(want));
            left -= static_cast<std::uint64_t>(want);
        }
        std::array<std::byte, 8> footer;
        in.read(reinterpret_cast<char*>(footer.data()), 8);
        if (in.gcount() != 8) return "short read of checksum footer";
        if (get_u64(footer.data()) != hash.state) return "checksum mismatch";
    }

    try {
        DatasetReader reader(path);
        for (std::int64_t g = 0; g < reader.num_row_groups(); ++g) {
            auto read = reader.read_row_group(g, Projection::all());
            for (const Event& event : row_group_to_events(read.rg))
                if (auto problem = validate_event(event))
                    return "row group " + std::to_string(g) + ", event_id " +
                           std::to_string(event.event_id) + ": " + *problem;
        }
    } catch (const std::exception& ex) {
        return std::string(ex.what());
    }
    return std::nullopt;
}

}  // namespace nf2
