#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "decoyvault/audit.hpp"
#include "decoyvault/catalog.hpp"
#include "decoyvault/fpe.hpp"
#include "decoyvault/identity.hpp"
#include "decoyvault/storage.hpp"
#include "decoyvault/threat.hpp"

namespace decoyvault {

/// What a single gate decision looked like. `outcome` reports which bytes
/// were served. On download paths it coincides with the verification result;
/// redeeming a grant that was itself bound to a decoy reports decoy_served
/// even for a fully matching grantee, because deception already happened at
/// share-creation time.
struct AccessVerdict {
  Outcome outcome = Outcome::decoy_served;
  IdentifierSet matched_fields;
  IdentifierSet required_fields;
  std::optional<std::uint64_t> decoy_index_served;
  std::string object_id;
  TimePoint at{};
};

struct AccessResult {
  std::string content;
  std::string name;  // always the object's logical name, for either outcome
  AccessVerdict verdict;
};

/// A redeemable handle on an object, fixed to the grantee identity the owner
/// registered. bound_decoy_index 0 means the grant carries the original;
/// grants created by an unverified "owner" are silently bound to a decoy.
struct ShareGrant {
  std::string token;
  std::string object_id;
  HostIdentity grantee_identity;
  TimePoint created_at{};
  InfoconLevel created_under_level;
  std::uint64_t bound_decoy_index = 0;

  nlohmann::json to_json() const;
  static ShareGrant from_json(const nlohmann::json& j);
};

/// One JSON file per grant under shares/.
class ShareStore {
 public:
  explicit ShareStore(std::filesystem::path dir);

  void put(const ShareGrant& grant);
  ShareGrant get(std::string_view token) const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

/// The upload pipeline and the verified download/share gate. Verification
/// failure is never an error: the requester receives a well-formed decoy of
/// the right length and the event is audited.
class AccessBroker {
 public:
  AccessBroker(StorageProvider& provider, ObjectCatalog& catalog, ShareStore& shares,
               AuditLog& audit, const fpe::FpeKey& key,
               std::uint64_t max_object_size);

  /// Stores the original with embedded identity metadata, then
  /// decoy_count(level) decoys, then the catalog record (record last, so a
  /// failure never leaves a record pointing at missing objects).
  ObjectRecord upload(std::string_view logical_name, std::string_view content,
                      const HostIdentity& owner, InfoconLevel level);

  /// selector = object_id or logical name (name resolves to the newest
  /// record). The original is returned iff every identifier required at
  /// `level` matches the embedded identity; otherwise the requester gets a
  /// decoy chosen deterministically from their presented identity, under the
  /// object's own name.
  AccessResult request_download(std::string_view selector,
                                const HostIdentity& presented, InfoconLevel level);

  /// Issues a grant for `grantee`. An owner who fails verification still
  /// receives a syntactically valid token — bound to a decoy.
  ShareGrant create_share(std::string_view object_id,
                          const HostIdentity& owner_presented, HostIdentity grantee,
                          InfoconLevel level);

  /// Verifies `presented` against the grant's registered grantee at the
  /// CURRENT level, then serves whatever the grant is bound to; mismatches
  /// get a decoy.
  AccessResult redeem_share(std::string_view token, const HostIdentity& presented,
                            InfoconLevel level);

  /// Which decoy a given presented identity consistently receives:
  /// 1 + (first 8 bytes of SHA-256(canonical concatenation) mod n). Stable,
  /// so repeated probing cannot diff responses to spot the deception.
  static std::uint64_t select_decoy_index(const HostIdentity& presented,
                                          std::uint64_t decoy_total);

 private:
  ObjectRecord resolve(std::string_view selector) const;

  /// Shared gate: verify `presented` against `embedded`, serve the original
  /// (or `decoy_when_matched`, for decoy-bound grants) on success and a
  /// deterministically selected decoy on failure, and audit the verdict.
  AccessResult gate(const ObjectRecord& record, const HostIdentity& embedded,
                    const HostIdentity& presented, InfoconLevel level,
                    EventKind kind, std::optional<std::uint64_t> decoy_when_matched,
                    const std::string& detail);

  StorageProvider& provider_;
  ObjectCatalog& catalog_;
  ShareStore& shares_;
  AuditLog& audit_;
  const fpe::FpeKey& key_;
  std::uint64_t max_object_size_;
};

}  // namespace decoyvault
