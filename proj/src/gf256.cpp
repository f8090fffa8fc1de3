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

#include "prilok/gf256.hpp"

namespace prilok::gf256 {

std::uint8_t mul_slow(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  while (b != 0) {
    if (b & 1) p ^= a;
    bool carry = a & 0x80;
    a = static_cast<std::uint8_t>(a << 1);
    if (carry) a ^= 0x1b;
    b >>= 1;
  }
  return p;
}

const Tables& tables() {
  static const Tables t = [] {
    Tables out;
    std::uint8_t x = 1;
    for (int i = 0; i < 255; ++i) {
      out.exp[i] = x;
      out.log[x] = static_cast<std::uint8_t>(i);
      x = mul_slow(x, 3);
    }
    for (int i = 255; i < 512; ++i) out.exp[i] = out.exp[i - 255];
    return out;
  }();
  return t;
}

}  // namespace prilok::gf256
