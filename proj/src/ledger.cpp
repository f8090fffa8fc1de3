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

#include "prilok/ledger.hpp"

#include <algorithm>
#include <array>

#include "json.hpp"
#include "prilok/error.hpp"

namespace prilok {

namespace {
constexpr std::array<std::string_view, 11> kKindNames = {
    "request",     "certificate",  "denial",         "state-change",
    "key-reconstruction", "capability", "access-denied", "edge-fetch",
    "vault-write", "vault-delete", "prune"};
}

std::string_view to_string(LedgerKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<LedgerKind> parse_ledger_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<LedgerKind>(i);
  }
  return std::nullopt;
}

Bytes canonical(const LedgerContent& c) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(c.kind))
      .prefixed(c.request_id)
      .prefixed(c.detail)
      .u64(static_cast<std::uint64_t>(c.minute));
  return std::move(w).bytes();
}

crypto::Digest entry_hash(std::uint64_t sequence, const crypto::Digest& previous,
                          const LedgerContent& content) {
  ByteWriter w;
  w.u64(sequence).raw(crypto::view(previous)).raw(canonical(content));
  return crypto::sha256(w.bytes());
}

bool verify_ledger(std::span<const LedgerEntry> entries) {
  crypto::Digest prev{};
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const LedgerEntry& e = entries[i];
    if (e.sequence != i) return false;
    if (e.previous_hash != prev) return false;
    if (entry_hash(e.sequence, e.previous_hash, e.content) != e.entry_hash) return false;
    prev = e.entry_hash;
  }
  return true;
}

std::string to_json_line(const LedgerEntry& e) {
  nlohmann::json j{{"seq", e.sequence},
                   {"prev", to_hex(crypto::view(e.previous_hash))},
                   {"hash", to_hex(crypto::view(e.entry_hash))},
                   {"kind", to_string(e.content.kind)},
                   {"request_id", e.content.request_id},
                   {"detail", e.content.detail},
                   {"minute", e.content.minute}};
  return j.dump();
}

std::optional<LedgerEntry> from_json_line(const std::string& line) {
  try {
    nlohmann::json j = nlohmann::json::parse(line);
    if (!j.is_object() || j.size() != 7) return std::nullopt;
    LedgerEntry e;
    e.sequence = j.at("seq").get<std::uint64_t>();
    Bytes prev = from_hex(j.at("prev").get<std::string>());
    Bytes hash = from_hex(j.at("hash").get<std::string>());
    if (prev.size() != 32 || hash.size() != 32) return std::nullopt;
    std::copy(prev.begin(), prev.end(), e.previous_hash.begin());
    std::copy(hash.begin(), hash.end(), e.entry_hash.begin());
    auto kind = parse_ledger_kind(j.at("kind").get<std::string>());
    if (!kind) return std::nullopt;
    e.content.kind = *kind;
    e.content.request_id = j.at("request_id").get<std::string>();
    e.content.detail = j.at("detail").get<std::string>();
    e.content.minute = j.at("minute").get<Minute>();
    if (to_json_line(e) != line) return std::nullopt;
    return e;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void write_jsonl(std::ostream& out, std::span<const LedgerEntry> entries) {
  for (const LedgerEntry& e : entries) out << to_json_line(e) << '\n';
}

std::optional<std::vector<LedgerEntry>> read_jsonl(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<LedgerEntry> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) return std::nullopt;  // every line ends in '\n'
    auto entry = from_json_line(text.substr(pos, nl - pos));
    if (!entry) return std::nullopt;
    out.push_back(std::move(*entry));
    pos = nl + 1;
  }
  return out;
}

LedgerEntry Ledger::append(LedgerContent content) {
  std::lock_guard lock(mu_);
  LedgerEntry e;
  e.sequence = entries_.size();
  if (!entries_.empty()) e.previous_hash = entries_.back().entry_hash;
  e.content = std::move(content);
  e.entry_hash = entry_hash(e.sequence, e.previous_hash, e.content);
  entries_.push_back(e);
  return e;
}

std::vector<LedgerEntry> Ledger::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t Ledger::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::size_t Ledger::count(LedgerKind kind) const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(
      entries_.begin(), entries_.end(), [kind](const LedgerEntry& e) { return e.content.kind == kind; }));
}

bool Ledger::verify() const {
  std::lock_guard lock(mu_);
  return verify_ledger(entries_);
}

}  // namespace prilok
