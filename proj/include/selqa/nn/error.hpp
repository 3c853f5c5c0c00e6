/*
 * Copyright 2026 The selqa Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SELQA_NN_ERROR_HPP_
#define SELQA_NN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace selqa {

// Precondition or contract violation on caller-supplied input. The CLI maps
// this to exit status 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Failure while running a well-formed request (I/O, non-finite loss,
// integrity check). The CLI maps this to exit status 1.
class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace selqa

#endif  // SELQA_NN_ERROR_HPP_
