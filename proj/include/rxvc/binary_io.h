// Copyright 2026 The rxvc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian binary encoding helpers shared by the feature cache and the
// checkpoint container.

#ifndef RXVC_BINARY_IO_H_
#define RXVC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "rxvc/errors.h"

namespace rxvc::bin {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class Writer {
 public:
  template <typename T>
  void Put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.append(p, sizeof(T));
  }
  void PutBytes(std::string_view s) { buf_.append(s); }
  void PutString(std::string_view s) {
    Put<uint32_t>(static_cast<uint32_t>(s.size()));
    buf_.append(s);
  }
  const std::string& data() const { return buf_; }
  std::string& data() { return buf_; }

 private:
  std::string buf_;
};

// Bounds-checked reader; any overrun raises ParseError naming the context.
class Reader {
 public:
  Reader(std::string_view data, std::string context)
      : data_(data), context_(std::move(context)) {}

  template <typename T>
  T Get() {
    static_assert(std::is_trivially_copyable_v<T>);
    Need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string_view GetBytes(size_t n) {
    Need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string GetString() {
    const uint32_t n = Get<uint32_t>();
    return std::string(GetBytes(n));
  }
  bool AtEnd() const { return pos_ == data_.size(); }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  void Need(size_t n) const {
    if (data_.size() - pos_ < n)
      throw ParseError(context_ + ": truncated data");
  }
  std::string_view data_;
  size_t pos_ = 0;
  std::string context_;
};

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, const std::string& contents);

}  // namespace rxvc::bin

#endif  // RXVC_BINARY_IO_H_
