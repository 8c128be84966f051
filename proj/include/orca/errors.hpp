/*
 * Copyright 2026 The orcafd Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace orca {

// Error hierarchy. Every failure raised by the library derives from Error so
// callers can catch broadly; the CLI maps the two families below onto exit
// codes (InputError -> 2, IoError -> 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: configuration, file contents, parameters, shapes.
class InputError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures while reading or writing.
class IoError : public Error {
 public:
  using Error::Error;
};

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

class CorruptionError : public InputError {
 public:
  using InputError::InputError;
};

class UnsupportedDtypeError : public InputError {
 public:
  using InputError::InputError;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

// A manifest field points at a file that does not exist.
class ResolutionError : public InputError {
 public:
  using InputError::InputError;
};

class ShapeError : public InputError {
 public:
  using InputError::InputError;
};

// Normalization of a (near-)zero vector.
class DegenerateVectorError : public InputError {
 public:
  using InputError::InputError;
};

class ParameterError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigurationError : public InputError {
 public:
  using InputError::InputError;
};

// AUROC / FPR requested on outcomes that contain only one class.
class UndefinedMetricError : public InputError {
 public:
  using InputError::InputError;
};

class SelectionError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace orca
