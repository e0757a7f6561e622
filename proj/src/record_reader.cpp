#include "kddbench/record_reader.hpp"

#include <charconv>
#include <cstring>

#include "kddbench/error.hpp"

namespace kdd {

namespace {

constexpr std::size_t kBufferSize = 1 << 22;
constexpr const char* kUnseenToken = "__unseen__";

constexpr double kPow10[] = {
    1e0,  1e1,  1e2,  1e3,  1e4,  1e5,  1e6,  1e7,  1e8,  1e9,  1e10, 1e11,
    1e12, 1e13, 1e14, 1e15, 1e16, 1e17, 1e18, 1e19, 1e20, 1e21, 1e22};

// Parses a decimal token in [b, e). Accepts [+-]digits[.digits][(e|E)[+-]digits]
// with at least one digit. Values whose significand fits 15 digits and whose
// scale fits the exact pow-10 table take the single-rounding fast path; the
// rest fall back to from_chars, so results are always correctly rounded.
bool parse_number(const char* b, const char* e, double& out) {
    const char* const token_begin = b;
    if (b == e) return false;
    bool negative = false;
    if (*b == '-' || *b == '+') {
        negative = (*b == '-');
        if (++b == e) return false;
    }
    std::uint64_t mantissa = 0;
    int digits = 0;
    int scale = 0;
    bool any_digit = false;
    for (; b < e && static_cast<unsigned char>(*b - '0') < 10; ++b) {
        any_digit = true;
        if (digits < 19) {
            mantissa = mantissa * 10 + static_cast<std::uint64_t>(*b - '0');
            if (mantissa != 0) ++digits;
        } else {
            ++scale;
        }
    }
    if (b < e && *b == '.') {
        for (++b; b < e && static_cast<unsigned char>(*b - '0') < 10; ++b) {
            any_digit = true;
            if (digits < 19) {
                mantissa = mantissa * 10 + static_cast<std::uint64_t>(*b - '0');
                if (mantissa != 0) ++digits;
                --scale;
            }
        }
    }
    if (!any_digit) return false;
    if (b < e && (*b == 'e' || *b == 'E')) {
        if (++b == e) return false;
        bool exp_neg = false;
        if (*b == '-' || *b == '+') {
            exp_neg = (*b == '-');
            if (++b == e) return false;
        }
        int exp_val = 0;
        bool exp_digit = false;
        for (; b < e && static_cast<unsigned char>(*b - '0') < 10; ++b) {
            exp_digit = true;
            if (exp_val < 100000) exp_val = exp_val * 10 + (*b - '0');
        }
        if (!exp_digit) return false;
        scale += exp_neg ? -exp_val : exp_val;
    }
    if (b != e) return false;

    if (digits <= 15 && scale >= -22 && scale <= 22) {
        double value = static_cast<double>(mantissa);
        value = scale >= 0 ? value * kPow10[scale] : value / kPow10[-scale];
        out = negative ? -value : value;
        return true;
    }
    const auto rc = std::from_chars(token_begin, e, out);
    return rc.ec == std::errc() && rc.ptr == e;
}

}  // namespace

RecordReader::RecordReader(ByteSource& source, const FeatureSchema& schema, OnError policy)
    : source_(source), schema_(schema), policy_(policy) {
    buffer_.resize(kBufferSize);
}

bool RecordReader::next_line(const char*& begin, const char*& end) {
    for (;;) {
        const char* base = buffer_.data();
        if (pos_ < filled_) {
            const void* nl = std::memchr(base + pos_, '\n', filled_ - pos_);
            if (nl != nullptr) {
                begin = base + pos_;
                end = static_cast<const char*>(nl);
                pos_ = static_cast<std::size_t>(end - base) + 1;
                if (end > begin && end[-1] == '\r') --end;
                return true;
            }
            if (eof_) {  // final unterminated line
                begin = base + pos_;
                end = base + filled_;
                pos_ = filled_;
                if (end > begin && end[-1] == '\r') --end;
                return true;
            }
        } else if (eof_) {
            return false;
        }
        // Compact the partial line to the front and refill.
        const std::size_t remaining = filled_ - pos_;
        std::memmove(buffer_.data(), buffer_.data() + pos_, remaining);
        pos_ = 0;
        filled_ = remaining;
        if (filled_ == buffer_.size()) buffer_.resize(buffer_.size() * 2);
        const std::size_t got =
            source_.read(buffer_.data() + filled_, buffer_.size() - filled_);
        if (got == 0) eof_ = true;
        filled_ += got;
    }
}

bool RecordReader::parse_line(const char* p, const char* end, ConnectionRecord& out,
                              std::string& error) {
    const auto& columns = schema_.columns();
    out.numeric.resize(schema_.numeric_count());
    out.nominal.resize(schema_.nominal_count());

    for (std::size_t f = 0; f < columns.size(); ++f) {
        const char* field = p;
        while (p < end && *p != ',') ++p;
        if (p == end) {
            error = "expected " + std::to_string(columns.size() + 1) + " fields, found " +
                    std::to_string(f + 1);
            return false;
        }
        if (columns[f].kind == ColumnKind::Numeric) {
            double value;
            if (!parse_number(field, p, value)) {
                error = "non-numeric value '" + std::string(field, p) + "' in column '" +
                        columns[f].name + "'";
                return false;
            }
            out.numeric[schema_.slot_of(f)] = value;
        } else {
            const std::int32_t idx =
                schema_.symbol_index(f, std::string_view(field, static_cast<std::size_t>(p - field)));
            if (idx == schema_.unseen_index(f)) ++stats_.unseen_symbols;
            out.nominal[schema_.slot_of(f)] = idx;
        }
        ++p;  // past the comma
    }

    // Remainder is the label; a stray comma means too many fields.
    const char* label_begin = p;
    while (p < end && *p != ',') ++p;
    if (p != end) {
        error = "more fields than the schema declares";
        return false;
    }
    if (p > label_begin && p[-1] == '.') --p;  // public files terminate labels with '.'
    if (p == label_begin) {
        error = "empty label";
        return false;
    }
    out.label.assign(label_begin, p);
    return true;
}

bool RecordReader::next(ConnectionRecord& out) {
    const char* begin;
    const char* end;
    std::string error;
    while (next_line(begin, end)) {
        ++file_line_;
        if (begin == end) continue;  // blank line
        ++stats_.lines;
        if (parse_line(begin, end, out, error)) {
            ++stats_.parsed;
            return true;
        }
        stats_.last_error = error;
        stats_.last_error_line = file_line_;
        if (policy_ == OnError::Abort) {
            throw RecordError("line " + std::to_string(file_line_) + ": " + error,
                              file_line_);
        }
        ++stats_.skipped;
    }
    return false;
}

std::string serialize_record(const ConnectionRecord& record, const FeatureSchema& schema) {
    std::string out;
    out.reserve(256);
    char buf[32];
    const auto& columns = schema.columns();
    for (std::size_t f = 0; f < columns.size(); ++f) {
        if (columns[f].kind == ColumnKind::Numeric) {
            const double v = record.numeric[schema.slot_of(f)];
            const auto rc = std::to_chars(buf, buf + sizeof(buf), v);
            out.append(buf, rc.ptr);
        } else {
            const std::int32_t idx = record.nominal[schema.slot_of(f)];
            if (idx == schema.unseen_index(f)) {
                out.append(kUnseenToken);
            } else {
                out.append(columns[f].domain[static_cast<std::size_t>(idx)]);
            }
        }
        out.push_back(',');
    }
    out.append(record.label);
    return out;
}

std::vector<ConnectionRecord> read_all_records(const std::string& path,
                                               const FeatureSchema& schema,
                                               RecordReader::OnError policy,
                                               ParseStats* stats_out) {
    auto source = open_source(path);
    RecordReader reader(*source, schema, policy);
    std::vector<ConnectionRecord> records;
    ConnectionRecord rec;
    while (reader.next(rec)) records.push_back(rec);
    if (stats_out != nullptr) *stats_out = reader.stats();
    return records;
}

}  // namespace kdd
