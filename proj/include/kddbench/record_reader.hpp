#pragma once

// Streaming KDD text parser. Single forward scan per line, constant memory
// regardless of file size; throughput is a contract (see the acceptance
// suite), so the field tokenizer and the numeric parser are fused into one
// pass instead of split/convert phases.

#include <cstdint>
#include <string>
#include <vector>

#include "kddbench/byte_source.hpp"
#include "kddbench/record.hpp"
#include "kddbench/schema.hpp"

namespace kdd {

struct ParseStats {
    std::uint64_t lines = 0;            // non-blank lines seen
    std::uint64_t parsed = 0;           // records yielded
    std::uint64_t skipped = 0;          // lines dropped under OnError::Skip
    std::uint64_t unseen_symbols = 0;   // nominal values mapped to the unseen index
    std::string last_error;             // message of the most recent bad line
    std::uint64_t last_error_line = 0;  // 1-based
};

class RecordReader {
public:
    enum class OnError {
        Abort,  // throw RecordError on the first bad line
        Skip,   // count the line in stats and continue
    };

    RecordReader(ByteSource& source, const FeatureSchema& schema,
                 OnError policy = OnError::Abort);

    // Parses the next record into `out`, reusing its buffers.
    // Returns false at end of stream.
    bool next(ConnectionRecord& out);

    const ParseStats& stats() const { return stats_; }
    const FeatureSchema& schema() const { return schema_; }

private:
    bool next_line(const char*& begin, const char*& end);
    bool parse_line(const char* begin, const char* end, ConnectionRecord& out,
                    std::string& error);

    ByteSource& source_;
    const FeatureSchema& schema_;
    OnError policy_;
    ParseStats stats_;
    std::vector<char> buffer_;
    std::size_t pos_ = 0;
    std::size_t filled_ = 0;
    std::uint64_t file_line_ = 0;
    bool eof_ = false;
};

// Renders a record back to KDD text (no trailing newline, label unterminated).
// Doubles are printed in shortest round-trip form, so parsing the output
// reproduces the record exactly. Unseen nominal values render as a token
// outside every declared domain and therefore survive a round trip too.
std::string serialize_record(const ConnectionRecord& record, const FeatureSchema& schema);

// Reads every record from `path` (gzip or plain) into memory.
std::vector<ConnectionRecord> read_all_records(const std::string& path,
                                               const FeatureSchema& schema,
                                               RecordReader::OnError policy,
                                               ParseStats* stats_out = nullptr);

}  // namespace kdd
