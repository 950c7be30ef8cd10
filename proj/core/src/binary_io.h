// Copyright 2026 The scdmetric Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian byte encoding and atomic file replacement shared by the
// binary formats. Internal to scdcore.

#ifndef SCD_SRC_BINARY_IO_H_
#define SCD_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

namespace scd::internal {

class ByteWriter {
 public:
  void PutBytes(std::string_view bytes) { buf_.append(bytes); }
  void PutU8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void PutU32(std::uint32_t v) { PutLittleEndian(v, 4); }
  void PutU64(std::uint64_t v) { PutLittleEndian(v, 8); }
  void PutF32(float v) { PutU32(std::bit_cast<std::uint32_t>(v)); }
  void PutF64(double v) { PutU64(std::bit_cast<std::uint64_t>(v)); }

  const std::string& bytes() const { return buf_; }

 private:
  void PutLittleEndian(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) {
      buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
  }

  std::string buf_;
};

// Reads from an in-memory buffer; running past the end throws FormatError
// naming the source.
class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string source)
      : bytes_(bytes), source_(std::move(source)) {}

  std::string_view GetBytes(std::size_t n);
  std::uint8_t GetU8();
  std::uint32_t GetU32();
  std::uint64_t GetU64();
  float GetF32() { return std::bit_cast<float>(GetU32()); }
  double GetF64() { return std::bit_cast<double>(GetU64()); }

  std::size_t remaining() const { return bytes_.size() - offset_; }
  const std::string& source() const { return source_; }
  // Throws FormatError if unread bytes remain.
  void ExpectEnd() const;

 private:
  std::uint64_t GetLittleEndian(int width);

  std::string_view bytes_;
  std::size_t offset_ = 0;
  std::string source_;
};

std::string ReadFileBytes(const std::string& path);

// Writes to a temporary sibling, fsyncs, then renames over path.
void WriteFileAtomic(const std::string& path, std::string_view bytes);

}  // namespace scd::internal

#endif  // SCD_SRC_BINARY_IO_H_
