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

#include "prilok/erasure.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "prilok/error.hpp"
#include "prilok/gf256.hpp"

namespace prilok::erasure {

namespace {

// out[r][j] = sum_c coeffs[r][c] * in[c][j] for j in [0, len).
void multiply_serial(const std::vector<std::uint8_t>& coeffs, int rows, int k,
                     const std::vector<const std::uint8_t*>& in,
                     const std::vector<std::uint8_t*>& out, std::size_t len) {
  for (int r = 0; r < rows; ++r) {
    std::uint8_t* dst = out[r];
    std::fill(dst, dst + len, 0);
    for (int c = 0; c < k; ++c) {
      std::uint8_t coef = coeffs[r * k + c];
      if (coef == 0) continue;
      const std::uint8_t* src = in[c];
      for (std::size_t j = 0; j < len; ++j) dst[j] ^= gf256::mul(coef, src[j]);
    }
  }
}

// Same product, split over byte columns. Each column is written by exactly
// one thread, so the result is bit-identical to the serial kernel.
void multiply_parallel(const std::vector<std::uint8_t>& coeffs, int rows, int k,
                       const std::vector<const std::uint8_t*>& in,
                       const std::vector<std::uint8_t*>& out, std::size_t len) {
  constexpr std::ptrdiff_t kBlock = 4096;
  const std::ptrdiff_t blocks = (static_cast<std::ptrdiff_t>(len) + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b * kBlock);
    const std::size_t end = std::min(len, begin + kBlock);
    for (int r = 0; r < rows; ++r) {
      std::uint8_t* dst = out[r];
      std::fill(dst + begin, dst + end, 0);
      for (int c = 0; c < k; ++c) {
        std::uint8_t coef = coeffs[r * k + c];
        if (coef == 0) continue;
        const std::uint8_t* src = in[c];
        for (std::size_t j = begin; j < end; ++j) dst[j] ^= gf256::mul(coef, src[j]);
      }
    }
  }
}

void multiply(Execution exec, const std::vector<std::uint8_t>& coeffs, int rows, int k,
              const std::vector<const std::uint8_t*>& in, const std::vector<std::uint8_t*>& out,
              std::size_t len) {
  if (exec == Execution::kParallel) {
    multiply_parallel(coeffs, rows, k, in, out, len);
  } else {
    multiply_serial(coeffs, rows, k, in, out, len);
  }
}

// Gauss-Jordan inversion of a k x k matrix over GF(256).
std::vector<std::uint8_t> invert(std::vector<std::uint8_t> m, int k) {
  std::vector<std::uint8_t> inv(k * k, 0);
  for (int i = 0; i < k; ++i) inv[i * k + i] = 1;
  for (int col = 0; col < k; ++col) {
    int pivot = col;
    while (pivot < k && m[pivot * k + col] == 0) ++pivot;
    if (pivot == k) fail(ErrorCode::kReconstruction, "singular decoding matrix");
    if (pivot != col) {
      for (int j = 0; j < k; ++j) {
        std::swap(m[pivot * k + j], m[col * k + j]);
        std::swap(inv[pivot * k + j], inv[col * k + j]);
      }
    }
    std::uint8_t scale = gf256::inv(m[col * k + col]);
    for (int j = 0; j < k; ++j) {
      m[col * k + j] = gf256::mul(m[col * k + j], scale);
      inv[col * k + j] = gf256::mul(inv[col * k + j], scale);
    }
    for (int row = 0; row < k; ++row) {
      if (row == col) continue;
      std::uint8_t factor = m[row * k + col];
      if (factor == 0) continue;
      for (int j = 0; j < k; ++j) {
        m[row * k + j] ^= gf256::mul(factor, m[col * k + j]);
        inv[row * k + j] ^= gf256::mul(factor, inv[col * k + j]);
      }
    }
  }
  return inv;
}

}  // namespace

ReedSolomon::ReedSolomon(int data_fragments, int total_fragments)
    : k_(data_fragments), n_(total_fragments) {
  if (k_ < 1 || n_ < k_ || n_ > 255) {
    fail(ErrorCode::kParameter, "erasure parameters require 1 <= k <= n <= 255, got k=" +
                                    std::to_string(k_) + " n=" + std::to_string(n_));
  }
  matrix_.assign(static_cast<std::size_t>(n_) * k_, 0);
  for (int r = 0; r < k_; ++r) matrix_[r * k_ + r] = 1;
  for (int r = k_; r < n_; ++r) {
    for (int c = 0; c < k_; ++c) {
      matrix_[r * k_ + c] = gf256::inv(static_cast<std::uint8_t>(r ^ c));
    }
  }
}

std::size_t ReedSolomon::fragment_size(std::size_t input_size) const {
  return (input_size + k_ - 1) / k_;
}

std::vector<Fragment> ReedSolomon::encode(ByteView input, Execution exec) const {
  const std::size_t len = fragment_size(input.size());
  std::vector<Fragment> out(n_);
  for (int i = 0; i < n_; ++i) {
    out[i].index = static_cast<std::uint8_t>(i);
    out[i].data.assign(len, 0);
  }
  for (int i = 0; i < k_; ++i) {
    std::size_t begin = std::min(input.size(), static_cast<std::size_t>(i) * len);
    std::size_t end = std::min(input.size(), begin + len);
    std::copy(input.begin() + begin, input.begin() + end, out[i].data.begin());
  }
  if (n_ == k_ || len == 0) return out;

  std::vector<const std::uint8_t*> in(k_);
  for (int i = 0; i < k_; ++i) in[i] = out[i].data.data();
  std::vector<std::uint8_t*> parity(n_ - k_);
  for (int r = k_; r < n_; ++r) parity[r - k_] = out[r].data.data();
  std::vector<std::uint8_t> coeffs(matrix_.begin() + static_cast<std::ptrdiff_t>(k_) * k_,
                                   matrix_.end());
  multiply(exec, coeffs, n_ - k_, k_, in, parity, len);
  return out;
}

Bytes ReedSolomon::decode(std::span<const Fragment> fragments, std::size_t original_size,
                          Execution exec) const {
  const std::size_t len = fragment_size(original_size);
  std::vector<const Fragment*> chosen;
  std::array<bool, 256> seen{};
  for (const Fragment& f : fragments) {
    if (f.index >= n_ || seen[f.index]) continue;
    if (f.data.size() != len) continue;
    seen[f.index] = true;
    chosen.push_back(&f);
    if (static_cast<int>(chosen.size()) == k_) break;
  }
  if (static_cast<int>(chosen.size()) < k_) {
    fail(ErrorCode::kUnavailable, "need " + std::to_string(k_) + " fragments, have " +
                                      std::to_string(chosen.size()));
  }

  std::vector<std::uint8_t> sub(static_cast<std::size_t>(k_) * k_);
  for (int i = 0; i < k_; ++i) {
    for (int c = 0; c < k_; ++c) sub[i * k_ + c] = coefficient(chosen[i]->index, c);
  }
  std::vector<std::uint8_t> decoder = invert(std::move(sub), k_);

  std::vector<Bytes> stripes(k_, Bytes(len));
  std::vector<const std::uint8_t*> in(k_);
  std::vector<std::uint8_t*> out(k_);
  for (int i = 0; i < k_; ++i) {
    in[i] = chosen[i]->data.data();
    out[i] = stripes[i].data();
  }
  if (len > 0) multiply(exec, decoder, k_, k_, in, out, len);

  Bytes result;
  result.reserve(original_size);
  for (int i = 0; i < k_ && result.size() < original_size; ++i) {
    std::size_t take = std::min(len, original_size - result.size());
    result.insert(result.end(), stripes[i].begin(), stripes[i].begin() + take);
  }
  return result;
}

}  // namespace prilok::erasure
