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

#ifndef PRILOK_EXECUTION_HPP_
#define PRILOK_EXECUTION_HPP_

namespace prilok {

// Selects between the OpenMP kernel and the serial reference it is tested
// against. Both produce identical output for identical input.
enum class Execution { kSerial, kParallel };

// Number of OpenMP threads available, 1 when built without OpenMP.
int max_threads();

}  // namespace prilok

#endif  // PRILOK_EXECUTION_HPP_
