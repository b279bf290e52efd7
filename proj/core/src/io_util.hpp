#pragma once

// Little-endian binary file helpers shared by the volume and checkpoint
// readers. Not installed.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "trivol/errors.hpp"

namespace trivol::detail {

inline void put_u32le(std::string& out, std::uint32_t v) {
  char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
  out.append(b, 4);
}

inline void put_f32le(std::string& out, float f) {
  std::uint32_t v;
  std::memcpy(&v, &f, 4);
  put_u32le(out, v);
}

inline void put_f32le_block(std::string& out, const float* p, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    out.append(reinterpret_cast<const char*>(p), n * 4);
  } else {
    for (std::size_t i = 0; i < n; ++i) put_f32le(out, p[i]);
  }
}

// Whole-file reader; open failure is IoError.
inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path + ": read failed");
  return data;
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

// Sequential cursor over an in-memory file image. Running past the end
// raises TruncatedFileError naming how many bytes would have been needed.
class Cursor {
 public:
  Cursor(const std::string& path, const std::string& data) : path_(path), data_(data) {}

  std::uint32_t u32le() {
    need(4);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(data_.data()) + off_;
    off_ += 4;
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
  }

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[off_++]);
  }

  float f32le() {
    std::uint32_t v = u32le();
    float f;
    std::memcpy(&f, &v, 4);
    return f;
  }

  void f32le_block(float* dst, std::size_t n) {
    need(n * 4);
    if constexpr (std::endian::native == std::endian::little) {
      std::memcpy(dst, data_.data() + off_, n * 4);
      off_ += n * 4;
    } else {
      for (std::size_t i = 0; i < n; ++i) dst[i] = f32le();
    }
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(off_, n);
    off_ += n;
    return s;
  }

  std::uint64_t offset() const { return off_; }
  std::uint64_t remaining() const { return data_.size() - off_; }

  void expect_exhausted(const char* what) const {
    if (off_ != data_.size()) {
      throw PayloadSizeError(path_ + ": " + what + " implies " + std::to_string(off_) +
                             " bytes but file has " + std::to_string(data_.size()));
    }
  }

 private:
  void need(std::size_t n) {
    if (off_ + n > data_.size()) throw TruncatedFileError(path_, off_ + n, data_.size());
  }

  std::string path_;
  const std::string& data_;
  std::uint64_t off_ = 0;
};

}  // namespace trivol::detail
