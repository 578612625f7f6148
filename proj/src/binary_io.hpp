#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "flare/errors.hpp"

namespace flare::detail {

static_assert(std::endian::native == std::endian::little, "binary formats assume little-endian hosts");

/// Little-endian writer for the versioned index and weight files.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }

  void put_bytes(const void* data, std::size_t size) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  }

  void put_string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    put_bytes(s.data(), s.size());
  }

  void check() const {
    if (!out_) throw ValidationError("write failed");
  }

 private:
  std::ostream& out_;
};

/// Reader that turns any short read into a ValidationError naming what was
/// being read.
class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    T value{};
    get_bytes(&value, sizeof(T));
    return value;
  }

  void get_bytes(void* data, std::size_t size) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (static_cast<std::size_t>(in_.gcount()) != size) {
      throw ValidationError(what_ + ": truncated file");
    }
  }

  std::string get_string(std::uint32_t max_len = 1U << 30) {
    auto len = get<std::uint32_t>();
    if (len > max_len) throw ValidationError(what_ + ": corrupt string length");
    std::string s(len, '\0');
    get_bytes(s.data(), len);
    return s;
  }

  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw ValidationError(what_ + ": trailing bytes after payload");
    }
  }

 private:
  std::istream& in_;
  std::string what_;
};

}  // namespace flare::detail
