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

#ifndef SCD_TOOLS_CLI_H_
#define SCD_TOOLS_CLI_H_

#include <iosfwd>

namespace scd {

// Entry point of the scd tool. Returns 0 on success, 1 on usage or
// validation errors, 2 on runtime failures.
int CliMain(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace scd

#endif  // SCD_TOOLS_CLI_H_
