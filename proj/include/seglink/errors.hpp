// Copyright 2026 The SegLink Authors. All Rights Reserved.
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

namespace seglink {

/// Base of every error raised by the library. The CLI maps these to exit
/// status 2 (data error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
  using Error::Error;
};
class InvalidSize : public Error {
  using Error::Error;
};
class IndexError : public Error {
  using Error::Error;
};
class NoPrecedingLayer : public Error {
  using Error::Error;
};
class InconsistentLabel : public Error {
  using Error::Error;
};
class InvalidSegment : public Error {
  using Error::Error;
};
class InvalidPrediction : public Error {
  using Error::Error;
};
class ShapeError : public Error {
  using Error::Error;
};
class TrainingDiverged : public Error {
  using Error::Error;
};
class FormatError : public Error {
  using Error::Error;
};

}  // namespace seglink
