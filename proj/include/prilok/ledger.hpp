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

// Append-only, hash-chained audit ledger.
//
//   hash_i = SHA-256(seq_i (u64 BE) || hash_{i-1} || canonical(content_i))
//
// with hash_{-1} = 32 zero bytes. Export is JSON lines in canonical form
// (sorted keys, no whitespace, lowercase hex); the importer rejects any line
// that does not re-serialise to exactly the same bytes.

#ifndef PRILOK_LEDGER_HPP_
#define PRILOK_LEDGER_HPP_

#include <cstdint>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "prilok/crypto.hpp"
#include "prilok/pdr.hpp"

namespace prilok {

enum class LedgerKind : std::uint8_t {
  kRequest = 0,
  kCertificate = 1,
  kDenial = 2,
  kStateChange = 3,
  kKeyReconstruction = 4,
  kCapability = 5,
  kAccessDenied = 6,
  kEdgeFetch = 7,
  kVaultWrite = 8,
  kVaultDelete = 9,
  kPrune = 10,
};

std::string_view to_string(LedgerKind k);
std::optional<LedgerKind> parse_ledger_kind(std::string_view name);

struct LedgerContent {
  LedgerKind kind = LedgerKind::kRequest;
  std::string request_id;  // empty when not tied to a request
  std::string detail;
  Minute minute = 0;

  friend bool operator==(const LedgerContent&, const LedgerContent&) = default;
};

Bytes canonical(const LedgerContent& content);

struct LedgerEntry {
  std::uint64_t sequence = 0;
  crypto::Digest previous_hash{};
  crypto::Digest entry_hash{};
  LedgerContent content;
};

crypto::Digest entry_hash(std::uint64_t sequence, const crypto::Digest& previous,
                          const LedgerContent& content);

// True iff every entry's hash recomputes, links to its predecessor and the
// sequence numbers run 0, 1, 2, ...
bool verify_ledger(std::span<const LedgerEntry> entries);

std::string to_json_line(const LedgerEntry& entry);
// Returns nullopt for anything that is not a canonical ledger line.
std::optional<LedgerEntry> from_json_line(const std::string& line);

void write_jsonl(std::ostream& out, std::span<const LedgerEntry> entries);
// Returns nullopt if any line fails to parse canonically.
std::optional<std::vector<LedgerEntry>> read_jsonl(std::istream& in);

class Ledger {
 public:
  LedgerEntry append(LedgerContent content);
  std::vector<LedgerEntry> entries() const;
  std::size_t size() const;
  std::size_t count(LedgerKind kind) const;
  bool verify() const;

 private:
  mutable std::mutex mu_;
  std::vector<LedgerEntry> entries_;
};

}  // namespace prilok

#endif  // PRILOK_LEDGER_HPP_
