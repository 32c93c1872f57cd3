// Copyright 2026 The tmdl Authors. All Rights Reserved.
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


#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tmdl/config.hpp"
#include "tmdl/io.hpp"

namespace tmdl::cli {

// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

// Resolves defaults, the config file and flag overrides (in that order) for
// args = {subcommand, flags...}.
config::RunConfig resolve_config(const std::vector<std::string>& args);

// Runs one pipeline and assembles its CSV tables and metadata. Pure apart
// from the worker pool; writes nothing.
io::ResultBundle execute(const config::RunConfig& cfg);

// Full command line: resolve, execute, write the bundle. Errors go to err as
// one JSON object; the return value is the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace tmdl::cli
