/*
 * wifiloc - Wi-Fi fingerprint indoor localization engine
 * Copyright 2026 The wifiloc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace wifiloc {

/// Base class for all wifiloc errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or insufficient input data (bad fingerprints, unknown
/// locations, degenerate splits, ...). CLI exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Model training failed or would be meaningless. CLI exit code 4.
class TrainError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / serialization failure. CLI exit code 5.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wifiloc
