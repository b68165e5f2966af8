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

#ifndef RXVC_LOG_H_
#define RXVC_LOG_H_

#include <cstdint>
#include <string>

namespace rxvc::log {

// Writes "WARNING: <msg>" to stderr unless warnings are muted. The counter
// is maintained either way so tests can observe that a warning fired.
void Warn(const std::string& msg);
void Info(const std::string& msg);

int64_t WarningCount();
void SetQuiet(bool quiet);

}  // namespace rxvc::log

#endif  // RXVC_LOG_H_
