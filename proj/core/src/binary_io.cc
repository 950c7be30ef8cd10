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

#include "binary_io.h"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "scd/errors.h"
#include "scd/fileio.h"

namespace scd::internal {

std::string_view ByteReader::GetBytes(std::size_t n) {
  if (remaining() < n) {
    throw FormatError(fmt::format("{}: truncated payload (need {} bytes at offset {}, have {})",
                                  source_, n, offset_, remaining()));
  }
  std::string_view out = bytes_.substr(offset_, n);
  offset_ += n;
  return out;
}

std::uint64_t ByteReader::GetLittleEndian(int width) {
  std::string_view raw = GetBytes(static_cast<std::size_t>(width));
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i])) << (8 * i);
  }
  return v;
}

std::uint8_t ByteReader::GetU8() {
  return static_cast<std::uint8_t>(GetLittleEndian(1));
}
std::uint32_t ByteReader::GetU32() {
  return static_cast<std::uint32_t>(GetLittleEndian(4));
}
std::uint64_t ByteReader::GetU64() { return GetLittleEndian(8); }

void ByteReader::ExpectEnd() const {
  if (remaining() != 0) {
    throw FormatError(fmt::format("{}: {} unexpected trailing bytes", source_,
                                  remaining()));
  }
}

std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("{}: cannot open for reading", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("{}: read failed", path));
  return std::move(ss).str();
}

void WriteFileAtomic(const std::string& path, std::string_view bytes) {
  const std::string tmp = path + ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) {
    throw IoError(fmt::format("{}: cannot open for writing: {}", tmp,
                              std::strerror(errno)));
  }
  std::size_t written = 0;
  while (written < bytes.size()) {
    ssize_t n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const int err = errno;
      ::close(fd);
      throw IoError(fmt::format("{}: write failed: {}", tmp, std::strerror(err)));
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    const int err = errno;
    ::close(fd);
    throw IoError(fmt::format("{}: fsync failed: {}", tmp, std::strerror(err)));
  }
  ::close(fd);
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw IoError(fmt::format("{}: rename failed: {}", path, std::strerror(errno)));
  }
}

}  // namespace scd::internal

namespace scd {

std::string ReadFile(const std::string& path) {
  return internal::ReadFileBytes(path);
}

void WriteFileAtomically(const std::string& path, std::string_view contents) {
  internal::WriteFileAtomic(path, contents);
}

}  // namespace scd
