#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string_view>

#include "decoyvault/audit.hpp"
#include "decoyvault/identity.hpp"

namespace decoyvault {

/// Five-tier threat condition. 5 is the quiet baseline; lower values mean a
/// more hostile environment and stricter verification.
class InfoconLevel {
 public:
  constexpr InfoconLevel() = default;

  static InfoconLevel from_int(int value);
  int value() const { return value_; }

  /// A is stricter than B when A.value() < B.value().
  bool stricter_than(InfoconLevel other) const { return value_ < other.value_; }
  bool operator==(const InfoconLevel&) const = default;

 private:
  constexpr explicit InfoconLevel(int value) : value_(value) {}
  int value_ = 5;
};

/// Identifiers a requester must match at the given level. Nested: each step
/// down adds one identifier, ending with the 4-tuple hash at level 1.
///   5 -> {mac}
///   4 -> {mac, ip}
///   3 -> {mac, ip, hostname}
///   2 -> {mac, ip, hostname, user_id}
///   1 -> {mac, ip, hostname, user_id, quad_hash}
IdentifierSet required_identifiers(InfoconLevel level);

/// Decoy replicas created per upload: 6 - level (1 at level 5, 5 at level 1).
int decoy_count(InfoconLevel level);

/// Current level with durable storage in the vault's level file.
/// get_level is a lock-free atomic read; set_level serializes persistence.
class ThreatState {
 public:
  /// Reads the level file, creating it at level 5 when missing.
  ThreatState(std::filesystem::path level_file, AuditLog& audit);

  InfoconLevel get_level() const;

  /// Persists before returning; emits a level_changed event when the level
  /// actually moves. Returns whether it did.
  bool set_level(InfoconLevel level, std::string_view reason);

  /// Parses a single-line "LEVEL=<1..5>" feed file and applies it. Malformed
  /// or out-of-range content changes nothing and leaves a feed_warning event.
  /// Returns the new level when a change happened.
  std::optional<InfoconLevel> ingest_feed(const std::filesystem::path& feed_file);

 private:
  void persist(InfoconLevel level);

  std::filesystem::path level_file_;
  AuditLog& audit_;
  std::atomic<int> level_{5};
  std::mutex write_mutex_;
};

}  // namespace decoyvault
