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

#ifndef SCD_FILEIO_H_
#define SCD_FILEIO_H_

#include <string>
#include <string_view>

namespace scd {

// Whole-file read; throws IoError.
std::string ReadFile(const std::string& path);
// Write to "<path>.tmp", fsync, rename over path; throws IoError.
void WriteFileAtomically(const std::string& path, std::string_view contents);

}  // namespace scd

#endif  // SCD_FILEIO_H_
