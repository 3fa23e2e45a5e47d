// Copyright 2026 The covox Authors
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

#include <stdexcept>
#include <string>

namespace covox {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid geometry (non-orthonormal rotation, degenerate triangle, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Invalid grid specification, scene or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Grid operation preconditions violated (shape mismatch, misaligned crop, ...).
class GridError : public Error {
 public:
  using Error::Error;
};

/// A voxel budget guard refused to run.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace covox
