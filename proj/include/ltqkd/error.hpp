// Copyright 2026 The ltqkd Authors
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

#ifndef LTQKD_ERROR_HPP
#define LTQKD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ltqkd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// An argument or value violates a documented invariant.
class ValidationError : public Error {
   public:
    using Error::Error;
};

/// The source states do not determine the transmission coefficients.
class WellPosednessError : public Error {
   public:
    using Error::Error;
};

/// Observed yields cannot be produced by any physical detection operator.
class InconsistentDataError : public Error {
   public:
    using Error::Error;
};

/// A rate is a ratio whose denominator vanished (no detections).
class UndefinedRateError : public Error {
   public:
    using Error::Error;
};

/// A planar functional was evaluated on a state off the X-Z plane.
class DimensionError : public Error {
   public:
    using Error::Error;
};

}  // namespace ltqkd

#endif
