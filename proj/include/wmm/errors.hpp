/*
*   Copyright (c) 2026 wmm contributors
*
*   Licensed under the Apache License, Version 2.0 (the "License");
*   you may not use this file except in compliance with the License.
*   You may obtain a copy of the License at
*
*       http://www.apache.org/licenses/LICENSE-2.0
*
*   Unless required by applicable law or agreed to in writing, software
*   distributed under the License is distributed on an "AS IS" BASIS,
*   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
*   See the License for the specific language governing permissions and
*   limitations under the License.
*/
#ifndef WMM_ERRORS_HPP
#define WMM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wmm {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A distribution parameter is outside its domain.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// No leaf has an observed count reachable through fully evidenced edges.
class EmptyPathSet : public Error {
 public:
  using Error::Error;
};

// The number of evidence combinations exceeds the configured cap.
class CombinatorialLimit : public Error {
 public:
  using Error::Error;
};

// Constrained sibling sampling accepted fewer than 1 in 1e4 proposals
// over a window of 1e5; the sibling evidence is mutually incompatible.
class RejectionStall : public Error {
 public:
  using Error::Error;
};

// A path edge has no sampled probability.
class MissingBranch : public Error {
 public:
  using Error::Error;
};

// The posterior grid contains no integer consistent with the counts.
class EmptySupport : public Error {
 public:
  using Error::Error;
};

// A correlation was requested for a constant series.
class ConstantSeries : public Error {
 public:
  using Error::Error;
};

// A document violates the JSON schema; message carries the JSON path.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure while reading or atomically writing a document.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wmm

#endif  // WMM_ERRORS_HPP
