/* Copyright 2026 The trackkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef TRACKKIT_CLI_H_
#define TRACKKIT_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace trackkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Routes to build-dataset, evaluate, track, check-tselector, schedule or
// sample-frames. `args` excludes the program name. Data goes to `out` or
// files, diagnostics to `err`.
int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

int Main(int argc, char** argv);

}  // namespace trackkit::cli

#endif  // TRACKKIT_CLI_H_
