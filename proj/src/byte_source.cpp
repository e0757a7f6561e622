#include "kddbench/byte_source.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <vector>

#include "kddbench/error.hpp"

namespace kdd {

std::size_t MemorySource::read(char* out, std::size_t capacity) {
    const std::size_t n = std::min(capacity, data_.size() - pos_);
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
    return n;
}

namespace {

class FileSource final : public ByteSource {
public:
    explicit FileSource(const std::string& path) : file_(std::fopen(path.c_str(), "rb")) {
        if (!file_) throw IoError("cannot open file: " + path);
        std::setvbuf(file_, nullptr, _IONBF, 0);  // we do our own buffering
    }
    ~FileSource() override {
        if (file_) std::fclose(file_);
    }

    std::size_t read(char* out, std::size_t capacity) override {
        return std::fread(out, 1, capacity, file_);
    }

    // Hand the FILE* over to the gzip wrapper after magic sniffing.
    std::FILE* release() {
        auto* f = file_;
        file_ = nullptr;
        return f;
    }

private:
    std::FILE* file_;
};

class GzipSource final : public ByteSource {
public:
    GzipSource(std::FILE* file, const std::string& path) : file_(file), path_(path) {
        std::rewind(file_);
        std::memset(&strm_, 0, sizeof(strm_));
        // 15 window bits + 16 selects gzip decoding.
        if (inflateInit2(&strm_, 15 + 16) != Z_OK) {
            std::fclose(file_);
            throw IoError("inflateInit failed for " + path_);
        }
        raw_.resize(1 << 16);
    }
    ~GzipSource() override {
        inflateEnd(&strm_);
        std::fclose(file_);
    }

    std::size_t read(char* out, std::size_t capacity) override {
        if (finished_) return 0;
        strm_.next_out = reinterpret_cast<Bytef*>(out);
        strm_.avail_out = static_cast<uInt>(capacity);
        while (strm_.avail_out > 0) {
            if (strm_.avail_in == 0) {
                const std::size_t got = std::fread(raw_.data(), 1, raw_.size(), file_);
                if (got == 0) {
                    if (strm_.avail_out == capacity) return 0;
                    break;
                }
                strm_.next_in = reinterpret_cast<Bytef*>(raw_.data());
                strm_.avail_in = static_cast<uInt>(got);
            }
            const int rc = inflate(&strm_, Z_NO_FLUSH);
            if (rc == Z_STREAM_END) {
                // Support concatenated gzip members.
                if (strm_.avail_in == 0 && std::feof(file_)) {
                    finished_ = true;
                    break;
                }
                if (inflateReset(&strm_) != Z_OK) {
                    throw IoError("gzip reset failed for " + path_);
                }
                continue;
            }
            if (rc != Z_OK) {
                throw IoError("gzip decode error in " + path_ + ": " +
                              (strm_.msg ? strm_.msg : "corrupt stream"));
            }
        }
        return capacity - strm_.avail_out;
    }

private:
    std::FILE* file_;
    std::string path_;
    z_stream strm_{};
    std::vector<char> raw_;
    bool finished_ = false;
};

}  // namespace

std::unique_ptr<ByteSource> open_source(const std::string& path) {
    auto plain = std::make_unique<FileSource>(path);
    unsigned char magic[2] = {0, 0};
    const std::size_t got = plain->read(reinterpret_cast<char*>(magic), 2);
    std::FILE* f = plain->release();
    if (got == 2 && magic[0] == 0x1f && magic[1] == 0x8b) {
        return std::make_unique<GzipSource>(f, path);
    }
    std::rewind(f);
    struct Reopened final : ByteSource {
        explicit Reopened(std::FILE* file) : file_(file) {}
        ~Reopened() override { std::fclose(file_); }
        std::size_t read(char* out, std::size_t capacity) override {
            return std::fread(out, 1, capacity, file_);
        }
        std::FILE* file_;
    };
    return std::make_unique<Reopened>(f);
}

}  // namespace kdd
