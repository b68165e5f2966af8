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

#include "rxvc/log.h"

#include <atomic>
#include <iostream>

namespace rxvc::log {
namespace {
std::atomic<int64_t> g_warnings{0};
std::atomic<bool> g_quiet{false};
}  // namespace

void Warn(const std::string& msg) {
  ++g_warnings;
  if (!g_quiet) std::cerr << "WARNING: " << msg << std::endl;
}

void Info(const std::string& msg) {
  if (!g_quiet) std::cerr << "INFO: " << msg << std::endl;
}

int64_t WarningCount() { return g_warnings; }

void SetQuiet(bool quiet) { g_quiet = quiet; }

}  // namespace rxvc::log
