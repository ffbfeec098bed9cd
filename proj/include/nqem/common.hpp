// Copyright 2026 The nqem Authors
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

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace nqem {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Error carrying a machine-readable kind tag ("argument", "capability",
/// "data", "range", "io", "config"). The CLI maps the kind into its error
/// JSON; tests match on it.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void throw_argument(const std::string& msg) {
  throw Error("argument", msg);
}
[[noreturn]] inline void throw_capability(const std::string& msg) {
  throw Error("capability", msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
  throw Error("data", msg);
}
[[noreturn]] inline void throw_range(const std::string& msg) {
  throw Error("range", msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
  throw Error("io", msg);
}
[[noreturn]] inline void throw_config(const std::string& msg) {
  throw Error("config", msg);
}

inline void require(bool condition, const std::string& msg) {
  if (!condition) throw_argument(msg);
}

}  // namespace nqem
