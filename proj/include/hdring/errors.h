// Copyright 2026 The hdring Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HDRING_ERRORS_H_
#define HDRING_ERRORS_H_

#include <stdexcept>
#include <string>

namespace hdring {

// Every error raised by the library derives from Error. The CLI maps the
// concrete type to an exit status and a one-line diagnostic.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
  virtual const char* kind() const noexcept = 0;
};

// Invalid configuration or parameters (exit 2).
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

// Unreadable or malformed input files (exit 3).
class LoadError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "load"; }
};

// Bad sample contents, e.g. a label outside [0, S).
class DataError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "data"; }
};

// The requested client split cannot be produced from the data.
class PartitionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "partition"; }
};

// Ring-order violations in the ledger or federation schedule (exit 4).
class ProtocolError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "protocol"; }
};

// A condition that can only arise from a bug; the run must stop (exit 4).
class InvariantError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invariant"; }
};

}  // namespace hdring

#endif  // HDRING_ERRORS_H_
