// Copyright 2026 The geoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace geoprobe {

inline constexpr const char* kVersion = "0.1.0";

// Base class for all geoprobe failures that are not plain precondition
// violations (those throw std::invalid_argument).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class RasterError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace geoprobe
