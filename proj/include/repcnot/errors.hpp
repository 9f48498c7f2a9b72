// Copyright 2026 The repcnot Authors
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

namespace repcnot {

/// Bad input: malformed spec, calibration, layout or file contents.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The decoder could not produce a correction (disconnected defect, undecomposable fault).
struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reading or writing a file failed.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace repcnot
