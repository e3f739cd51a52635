// Copyright 2026 The HM-SGE Authors.
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

#ifndef HMSGE_CLI_H_
#define HMSGE_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace hmsge {

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitIo = 2,
  kExitNumeric = 3,
};

// Runs `hmsge <subcommand> ...`. args[0] is the program name. Tables go to
// `out` as TSV, or aligned columns when `tty` is set; diagnostics go to
// `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err, bool tty = false);

}  // namespace hmsge

#endif  // HMSGE_CLI_H_
