#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "sketchspan/errors.hpp"

// Little-endian byte and bit streams used by every serialized layout.
namespace sketchspan::bytes {

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(std::span<const std::uint8_t> data) { out_.insert(out_.end(), data.begin(), data.end()); }

  std::size_t size() const { return out_.size(); }
  // Overwrite a previously written u64 (length prefixes).
  void patch_u64(std::size_t offset, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_[offset + i] = static_cast<std::uint8_t>(v >> (8 * i));
  }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::span<const std::uint8_t> raw(std::size_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw FormatError("truncated input at byte " + std::to_string(pos_));
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

// Packs fixed-width fields LSB-first; flush() pads the final byte with zeros.
class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void put(std::uint64_t value, unsigned width) {
    for (unsigned done = 0; done < width;) {
      unsigned take = std::min(width - done, 8u - fill_);
      std::uint64_t chunk = (value >> done) & ((std::uint64_t{1} << take) - 1);
      acc_ |= static_cast<std::uint8_t>(chunk << fill_);
      fill_ += take;
      done += take;
      if (fill_ == 8) {
        out_.push_back(acc_);
        acc_ = 0;
        fill_ = 0;
      }
    }
  }
  void flush() {
    if (fill_ != 0) {
      out_.push_back(acc_);
      acc_ = 0;
      fill_ = 0;
    }
  }

 private:
  std::vector<std::uint8_t>& out_;
  std::uint8_t acc_ = 0;
  unsigned fill_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint64_t get(unsigned width) {
    std::uint64_t value = 0;
    for (unsigned done = 0; done < width;) {
      if (byte_ >= in_.size()) throw FormatError("truncated bit stream");
      unsigned take = std::min(width - done, 8u - bit_);
      std::uint64_t chunk = (in_[byte_] >> bit_) & ((1u << take) - 1);
      value |= chunk << done;
      bit_ += take;
      done += take;
      if (bit_ == 8) {
        bit_ = 0;
        ++byte_;
      }
    }
    return value;
  }
  std::size_t bytes_consumed() const { return byte_ + (bit_ != 0 ? 1 : 0); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t byte_ = 0;
  unsigned bit_ = 0;
};

}  // namespace sketchspan::bytes
