// Copyright 2026 The lingmt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ==============================================================================

#ifndef LINGMT_CLI_H_
#define LINGMT_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace lingmt {

// Entry point of the lingmt binary. Returns the process exit code; failures
// print one line "lingmt-error: <kind>: <message>" to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lingmt

#endif  // LINGMT_CLI_H_
