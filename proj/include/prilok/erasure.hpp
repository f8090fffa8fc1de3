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

#ifndef PRILOK_ERASURE_HPP_
#define PRILOK_ERASURE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "prilok/bytes.hpp"
#include "prilok/execution.hpp"

namespace prilok::erasure {

struct Fragment {
  std::uint8_t index = 0;  // 0..n-1; indices < k carry data verbatim
  Bytes data;

  friend bool operator==(const Fragment&, const Fragment&) = default;
};

// Systematic Reed-Solomon code over GF(256). The generator matrix is the
// k x k identity stacked on an (n - k) x k Cauchy block, so every k x k
// row selection is invertible and any k fragments recover the input.
class ReedSolomon {
 public:
  ReedSolomon(int data_fragments, int total_fragments);

  int k() const { return k_; }
  int n() const { return n_; }
  std::size_t fragment_size(std::size_t input_size) const;

  std::vector<Fragment> encode(ByteView input, Execution exec = Execution::kParallel) const;

  // Uses the first k distinct fragments given. Throws kUnavailable when fewer
  // than k distinct indices are supplied.
  Bytes decode(std::span<const Fragment> fragments, std::size_t original_size,
               Execution exec = Execution::kParallel) const;

 private:
  std::uint8_t coefficient(int row, int col) const { return matrix_[row * k_ + col]; }

  int k_;
  int n_;
  std::vector<std::uint8_t> matrix_;  // n x k, row-major
};

}  // namespace prilok::erasure

#endif  // PRILOK_ERASURE_HPP_
