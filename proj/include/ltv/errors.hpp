// SPDX-License-Identifier: Apache-2.0
//
// ltvchan - singular functions of underspread linear time-varying channels
// Copyright (C) 2026 ltvchan contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ltv_errors_H
#define ltv_errors_H

#include <stdexcept>
#include <string>

namespace ltv
{

// Invalid configuration or parameters (CLI exit code 2)
struct config_error : std::invalid_argument
{
    explicit config_error(const std::string &msg) : std::invalid_argument(msg) {}
};

// File / format problems (CLI exit code 3)
struct io_error : std::runtime_error
{
    explicit io_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Violated numerical contract, e.g. mismatched axes or malformed inputs (CLI exit code 4)
struct contract_error : std::runtime_error
{
    explicit contract_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Numerical consistency failure inside an algorithm (resolution too coarse, symmetry broken, ...)
struct numerical_error : std::runtime_error
{
    explicit numerical_error(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace ltv

#endif
