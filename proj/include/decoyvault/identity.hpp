#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace decoyvault {

/// The five identifiers a request can be verified against.
enum class Identifier : std::uint8_t { mac = 0, ip, hostname, user_id, quad_hash };

constexpr std::size_t kIdentifierCount = 5;
constexpr std::array<Identifier, kIdentifierCount> kAllIdentifiers = {
    Identifier::mac, Identifier::ip, Identifier::hostname, Identifier::user_id,
    Identifier::quad_hash};

std::string_view identifier_name(Identifier id);
Identifier identifier_from_name(std::string_view name);

/// Small value-semantic set over the five identifiers.
class IdentifierSet {
 public:
  constexpr IdentifierSet() = default;
  constexpr IdentifierSet(std::initializer_list<Identifier> ids) {
    for (Identifier id : ids) insert(id);
  }

  static constexpr IdentifierSet all() {
    return {Identifier::mac, Identifier::ip, Identifier::hostname,
            Identifier::user_id, Identifier::quad_hash};
  }

  constexpr void insert(Identifier id) { bits_ |= bit(id); }
  constexpr void erase(Identifier id) { bits_ &= static_cast<std::uint8_t>(~bit(id)); }
  constexpr bool contains(Identifier id) const { return (bits_ & bit(id)) != 0; }
  constexpr bool subset_of(IdentifierSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr std::size_t size() const {
    std::size_t n = 0;
    for (Identifier id : kAllIdentifiers) n += contains(id) ? 1 : 0;
    return n;
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool operator==(const IdentifierSet&) const = default;

  std::vector<std::string> names() const;
  static IdentifierSet from_names(const std::vector<std::string>& names);

  nlohmann::json to_json() const;
  static IdentifierSet from_json(const nlohmann::json& j);

 private:
  static constexpr std::uint8_t bit(Identifier id) {
    return static_cast<std::uint8_t>(1u << static_cast<std::uint8_t>(id));
  }
  std::uint8_t bits_ = 0;
};

/// The host identifiers carried by requests and embedded at upload time.
/// A missing field means "unknown"; matching treats it as a mismatch.
struct HostIdentity {
  std::optional<std::string> mac;
  std::optional<std::string> ip;
  std::optional<std::string> hostname;
  std::optional<std::string> user_id;
  std::optional<std::string> quad_hash;

  bool operator==(const HostIdentity&) const = default;

  /// All four base identifiers present (quad_hash is derived).
  bool complete() const;

  const std::optional<std::string>& field(Identifier id) const;
  std::optional<std::string>& field(Identifier id);

  /// mac|ip|hostname|user_id with absent fields rendered empty. Used to pick
  /// which decoy a given requester consistently receives.
  std::string canonical_concat() const;

  /// Copy with quad_hash recomputed from the four base fields when complete.
  HostIdentity with_computed_hash() const;

  /// Canonicalizes raw field values; values that do not parse are kept as
  /// trimmed lowercase text so they simply fail to match. Empty -> absent.
  static HostIdentity from_raw(std::optional<std::string> mac,
                               std::optional<std::string> ip,
                               std::optional<std::string> hostname,
                               std::optional<std::string> user_id,
                               std::optional<std::string> quad_hash);

  /// Reads MAC, IP, hostname and user name from the running host. Fields that
  /// cannot be determined come back absent.
  static HostIdentity collect();

  nlohmann::json to_json() const;
  static HostIdentity from_json(const nlohmann::json& j);
};

/// Strict canonicalizers; throw InvalidInputError on unparseable input.
/// MAC: lowercase colon-separated. IP: dotted quad, or compressed lowercase
/// IPv6. Hostname/user: trimmed lowercase with the reserved '|' removed.
std::string canonicalize_mac(std::string_view raw);
std::string canonicalize_ip(std::string_view raw);
std::string canonicalize_hostname(std::string_view raw);
std::string canonicalize_user(std::string_view raw);
std::string canonicalize_field(Identifier id, std::string_view raw);

/// canonicalize_field with the lenient fallback used for wire/CLI input:
/// unparseable values become trimmed lowercase text (guaranteed to fail a
/// match rather than fail the request); empty -> absent.
std::optional<std::string> canonicalize_field_or_raw(Identifier id,
                                                     std::string_view raw);

/// SHA-256 over "mac|ip|hostname|user_id" (canonical forms), lowercase hex.
std::string compute_quad_hash(std::string_view mac, std::string_view ip,
                              std::string_view hostname, std::string_view user_id);

enum class FieldMatch : std::uint8_t { matched, mismatched, absent };

struct MatchResult {
  std::array<FieldMatch, kIdentifierCount> fields{};
  IdentifierSet matched_fields;  // over all five identifiers
  IdentifierSet required;
  bool overall = false;  // required ⊆ matched_fields
};

/// Field-by-field comparison. A field absent on either side can never match;
/// overall succeeds only when every required field matched.
MatchResult match(const HostIdentity& embedded, const HostIdentity& presented,
                  IdentifierSet required);

}  // namespace decoyvault
