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
#ifndef WMM_FORMAT_HPP
#define WMM_FORMAT_HPP

#include <charconv>
#include <string>
#include <system_error>

#include "wmm/errors.hpp"

namespace wmm::detail {

// Shortest round-trip decimal form; byte-stable across platforms, unlike
// locale-dependent stream formatting.
inline std::string format_double(double value) {
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (result.ec != std::errc{}) {
    throw IoError("failed to format a floating-point value");
  }
  return std::string(buffer, result.ptr);
}

}  // namespace wmm::detail

#endif  // WMM_FORMAT_HPP
