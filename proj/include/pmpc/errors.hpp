// Copyright 2026 The PMPC Authors
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

#ifndef PMPC__ERRORS_HPP_
#define PMPC__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pmpc {

/// Invalid parameters, malformed configuration or violated preconditions.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string & what) : std::invalid_argument(what) {}
};

/// A model map or cost produced a non-finite value.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string & what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string join_values(const double * values, std::size_t count)
{
  std::string out = "[";
  for (std::size_t i = 0; i < count; ++i) {
    if (i != 0) {
      out += ", ";
    }
    out += std::to_string(values[i]);
  }
  return out + "]";
}

}  // namespace detail

}  // namespace pmpc

#endif  // PMPC__ERRORS_HPP_
