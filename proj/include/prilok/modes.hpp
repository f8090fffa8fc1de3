// Copyright 2026 The PriLok Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRILOK_MODES_HPP_
#define PRILOK_MODES_HPP_

#include <array>
#include <cstdint>
#include <string_view>

namespace prilok {

// Classes of critical operation. Each needs its own quorum of approvals.
enum class OperationClass : std::uint8_t {
  kLockUnlock = 0,
  kStrictPush = 1,
  kBlindAnalysis = 2,
  kBlindProcessing = 3,
  kFullProcessing = 4,
};

inline constexpr std::array<OperationClass, 5> kAllOperationClasses = {
    OperationClass::kLockUnlock, OperationClass::kStrictPush, OperationClass::kBlindAnalysis,
    OperationClass::kBlindProcessing, OperationClass::kFullProcessing};

std::string_view to_string(OperationClass c);
OperationClass parse_operation_class(std::string_view name);

enum class SystemStateKind : std::uint8_t { kPassive = 0, kAlert = 1 };

std::string_view to_string(SystemStateKind s);

}  // namespace prilok

#endif  // PRILOK_MODES_HPP_
