#pragma once

// Pull-style byte sources feeding the record parser. File sources sniff the
// gzip magic and inflate transparently, so callers never care whether a
// corpus is compressed.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace kdd {

class ByteSource {
public:
    virtual ~ByteSource() = default;
    // Fills up to `capacity` bytes into `out`, returns the byte count;
    // 0 means end of stream.
    virtual std::size_t read(char* out, std::size_t capacity) = 0;
};

class MemorySource final : public ByteSource {
public:
    explicit MemorySource(std::string_view data) : data_(data) {}
    std::size_t read(char* out, std::size_t capacity) override;

private:
    std::string_view data_;
    std::size_t pos_ = 0;
};

// Opens `path`, inflating on the fly when the gzip magic is present.
std::unique_ptr<ByteSource> open_source(const std::string& path);

}  // namespace kdd
