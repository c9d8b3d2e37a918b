/* Copyright 2026 The Semap Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <stdexcept>
#include <string>

namespace semap {

/// Base for all library errors. `category()` is a stable machine-readable
/// token the CLI prints on failure.
class Error : public std::runtime_error {
  public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    const std::string& category() const { return category_; }

  private:
    std::string category_;
};

/// Malformed file contents (bad magic, token counts, truncation).
class FormatError : public Error {
  public:
    explicit FormatError(const std::string& message) : Error("format", message) {}
};

/// Inputs that parse but violate a contract (non-orthonormal rotation, rank).
class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string& message) : Error("validation", message) {}
};

/// Well-formed data with inadmissible values (negative scores, degenerate evidence).
class DataError : public Error {
  public:
    explicit DataError(const std::string& message) : Error("data", message) {}
};

/// Bad parameter values (non-positive voxel size, thresholds).
class ParamError : public Error {
  public:
    explicit ParamError(const std::string& message) : Error("parameter", message) {}
};

/// Inconsistent run configuration (count mismatches, voxel-size mismatch).
class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

/// Frames presented out of order.
class SequencingError : public Error {
  public:
    explicit SequencingError(const std::string& message) : Error("sequencing", message) {}
};

/// Filesystem failures (unreadable or unwritable paths).
class IoError : public Error {
  public:
    explicit IoError(const std::string& message) : Error("io", message) {}
};

}  // namespace semap
