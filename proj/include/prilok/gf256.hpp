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

// Arithmetic in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1 (0x11b), generator 3.

#ifndef PRILOK_GF256_HPP_
#define PRILOK_GF256_HPP_

#include <array>
#include <cstdint>

namespace prilok::gf256 {

struct Tables {
  std::array<std::uint8_t, 512> exp{};
  std::array<std::uint8_t, 256> log{};
};

const Tables& tables();

inline std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }

inline std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
  if (a == 0 || b == 0) return 0;
  const Tables& t = tables();
  return t.exp[t.log[a] + t.log[b]];
}

// b must be non-zero.
inline std::uint8_t div(std::uint8_t a, std::uint8_t b) {
  if (a == 0) return 0;
  const Tables& t = tables();
  return t.exp[t.log[a] + 255 - t.log[b]];
}

inline std::uint8_t inv(std::uint8_t a) { return div(1, a); }

// Schoolbook multiply, used by tests as an independent check of the tables.
std::uint8_t mul_slow(std::uint8_t a, std::uint8_t b);

}  // namespace prilok::gf256

#endif  // PRILOK_GF256_HPP_
