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

#ifndef RXVC_ERRORS_H_
#define RXVC_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rxvc {

// Base class for every error raised by the library. The CLI prints what()
// as its one-line diagnostic.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int64_t line = -1)
      : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  int64_t line() const { return line_; }

 private:
  int64_t line_;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class DegenerateCorpus : public Error {
 public:
  using Error::Error;
};

class WriteError : public Error {
 public:
  using Error::Error;
};

class InsufficientReferences : public Error {
 public:
  using Error::Error;
};

class InsufficientVoicedFrames : public Error {
 public:
  using Error::Error;
};

class IncompatibleCheckpoint : public Error {
 public:
  using Error::Error;
};

class NumericalDivergence : public Error {
 public:
  NumericalDivergence(int64_t step, const std::string& what)
      : Error("numerical divergence at step " + std::to_string(step) + ": " +
              what),
        step_(step) {}
  int64_t step() const { return step_; }

 private:
  int64_t step_;
};

}  // namespace rxvc

#endif  // RXVC_ERRORS_H_
