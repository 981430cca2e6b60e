// Copyright 2026 The acdkit Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace acd {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or unreadable input: empty clouds, malformed files, size mismatches.
// The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

// A computation could not produce a result for valid-looking input.
// The CLI maps these to exit code 3.
class ComputeError : public Error {
 public:
  using Error::Error;
};

class DegenerateHull : public ComputeError {
 public:
  DegenerateHull(int affine_rank, const std::string& what)
      : ComputeError(what), affine_rank_(affine_rank) {}

  // 0 = single point, 1 = collinear, 2 = coplanar.
  int affine_rank() const { return affine_rank_; }

 private:
  int affine_rank_;
};

class InvalidPlane : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

class NoSplit : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

}  // namespace acd
