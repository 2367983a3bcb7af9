#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "decoyvault/audit.hpp"
#include "decoyvault/broker.hpp"
#include "decoyvault/catalog.hpp"
#include "decoyvault/fpe.hpp"
#include "decoyvault/storage.hpp"
#include "decoyvault/threat.hpp"

namespace decoyvault {

struct VaultConfig {
  std::uint64_t max_object_size = 64ull * 1024 * 1024;
  std::string admin_token;
  std::string feed_path = "feed.txt";  // relative to the vault root

  nlohmann::json to_json() const;
  static VaultConfig from_json(const nlohmann::json& j);
};

struct VerifyReport {
  std::size_t records_checked = 0;
  std::size_t objects_checked = 0;
  std::vector<std::string> missing;      // catalog references with no object
  std::vector<std::string> orphans;      // provider objects no record references
  std::size_t orphans_pruned = 0;
  bool fpe_ok = false;
  std::uint64_t audit_unparseable_lines = 0;
  bool audit_partial_tail = false;
  std::optional<std::string> audit_last_error;

  /// Integrity verdict. Orphans are tolerated (reported, prunable) since an
  /// interrupted upload can leave them behind by design.
  bool clean() const {
    return missing.empty() && fpe_ok && audit_unparseable_lines == 0 &&
           !audit_last_error.has_value();
  }
};

/// On-disk layout under the vault root:
///   config.json  key  level  audit.log  objects/  meta/  shares/
class Vault {
 public:
  /// Creates the layout, generates the cipher key (owner-only file mode) and
  /// an admin token, and sets the level file to 5.
  static Vault init(const std::filesystem::path& root);

  /// Opens an existing vault; NotFoundError when root is not a vault.
  static Vault open(const std::filesystem::path& root);

  Vault(Vault&&) = default;

  const std::filesystem::path& root() const { return root_; }
  const VaultConfig& config() const { return config_; }
  const fpe::FpeKey& key() const { return key_; }
  std::filesystem::path feed_path() const { return root_ / config_.feed_path; }

  StorageProvider& provider() { return *provider_; }
  ObjectCatalog& catalog() { return *catalog_; }
  ShareStore& shares() { return *shares_; }
  AuditLog& audit() { return *audit_; }
  ThreatState& threat() { return *threat_; }
  AccessBroker& broker() { return *broker_; }

  /// Referential-integrity pass over catalog + provider, digit-cipher
  /// self-test, and audit log health. With prune, unreferenced objects are
  /// deleted.
  VerifyReport verify(bool prune = false);

 private:
  Vault() = default;

  std::filesystem::path root_;
  VaultConfig config_;
  fpe::FpeKey key_ = fpe::FpeKey::random();
  std::unique_ptr<AuditLog> audit_;
  std::unique_ptr<ThreatState> threat_;
  std::unique_ptr<FsProvider> provider_;
  std::unique_ptr<ObjectCatalog> catalog_;
  std::unique_ptr<ShareStore> shares_;
  std::unique_ptr<AccessBroker> broker_;
};

}  // namespace decoyvault
