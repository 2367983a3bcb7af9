#include "decoyvault/vault.hpp"

#include <algorithm>
#include <set>

#include "decoyvault/errors.hpp"
#include "decoyvault/util.hpp"

namespace decoyvault {

namespace {

constexpr std::string_view kConfigFile = "config.json";
constexpr std::string_view kKeyFile = "key";
constexpr std::string_view kLevelFile = "level";
constexpr std::string_view kAuditFile = "audit.log";
constexpr std::string_view kObjectsDir = "objects";
constexpr std::string_view kMetaDir = "meta";
constexpr std::string_view kSharesDir = "shares";

bool fpe_self_test(const fpe::FpeKey& key) {
  fpe::Tweak tweak{"self-test", 1, 0};
  // Exhaustive bijectivity where the domain is small enough to enumerate.
  for (std::size_t len = 1; len <= 3; ++len) {
    std::size_t domain = 1;
    for (std::size_t i = 0; i < len; ++i) domain *= 10;
    std::set<std::string> outputs;
    for (std::size_t v = 0; v < domain; ++v) {
      std::string plain = std::to_string(v);
      plain.insert(0, len - plain.size(), '0');
      std::string cipher = fpe::encrypt_digits(key, tweak, plain);
      if (cipher.size() != len) return false;
      if (fpe::decrypt_digits(key, tweak, cipher) != plain) return false;
      outputs.insert(std::move(cipher));
    }
    if (outputs.size() != domain) return false;
  }
  // Roundtrip spot-checks across the full length range.
  for (std::size_t len = 4; len <= fpe::kMaxDigits; ++len) {
    std::string plain;
    for (std::size_t i = 0; i < len; ++i) {
      plain.push_back(static_cast<char>('0' + (i * 7 + len) % 10));
    }
    fpe::Tweak t{"self-test", 2, static_cast<std::uint64_t>(len)};
    if (fpe::decrypt_digits(key, t, fpe::encrypt_digits(key, t, plain)) != plain) {
      return false;
    }
  }
  return true;
}

}  // namespace

nlohmann::json VaultConfig::to_json() const {
  return nlohmann::json{{"max_object_size", max_object_size},
                        {"admin_token", admin_token},
                        {"feed_path", feed_path}};
}

VaultConfig VaultConfig::from_json(const nlohmann::json& j) {
  VaultConfig c;
  c.max_object_size = j.value("max_object_size", c.max_object_size);
  c.admin_token = j.value("admin_token", std::string{});
  c.feed_path = j.value("feed_path", c.feed_path);
  return c;
}

Vault Vault::init(const std::filesystem::path& root) {
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) {
    throw IoError("cannot create vault directory " + root.string() + ": " +
                  ec.message());
  }
  if (std::filesystem::exists(root / kConfigFile)) {
    throw DuplicateError(root.string() + " already contains a vault");
  }
  for (std::string_view sub : {kObjectsDir, kMetaDir, kSharesDir}) {
    std::filesystem::create_directories(root / sub, ec);
    if (ec) {
      throw IoError("cannot create vault subdirectory " + std::string(sub) + ": " +
                    ec.message());
    }
  }

  fpe::FpeKey key = fpe::FpeKey::random();
  atomic_write_file(root / kKeyFile, key.to_hex() + "\n", 0600);
  atomic_write_file(root / kLevelFile, "5\n");

  VaultConfig config;
  config.admin_token = random_hex(16);
  atomic_write_file(root / kConfigFile, config.to_json().dump(2) + "\n");

  return open(root);
}

Vault Vault::open(const std::filesystem::path& root) {
  Vault v;
  v.root_ = root;
  try {
    v.config_ = VaultConfig::from_json(nlohmann::json::parse(
        read_file(root / kConfigFile)));
  } catch (const NotFoundError&) {
    throw NotFoundError(root.string() + " is not a vault (no config.json)");
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupt vault config: " + std::string(e.what()));
  }
  v.key_ = fpe::FpeKey::from_hex(trim_ascii(read_file(root / kKeyFile)));

  v.audit_ = std::make_unique<AuditLog>(root / kAuditFile);
  v.threat_ = std::make_unique<ThreatState>(root / kLevelFile, *v.audit_);
  v.provider_ = std::make_unique<FsProvider>(root / kObjectsDir);
  v.catalog_ = std::make_unique<ObjectCatalog>(root / kMetaDir);
  v.shares_ = std::make_unique<ShareStore>(root / kSharesDir);
  v.broker_ = std::make_unique<AccessBroker>(*v.provider_, *v.catalog_, *v.shares_,
                                             *v.audit_, v.key_,
                                             v.config_.max_object_size);
  return v;
}

VerifyReport Vault::verify(bool prune) {
  VerifyReport report;

  std::set<std::string> referenced;
  for (std::size_t page = 0;; ++page) {
    auto records = catalog_->list_records(page, 256);
    if (records.empty()) break;
    for (const ObjectRecord& record : records) {
      ++report.records_checked;
      auto check = [&](const std::string& store_key, const std::string& what) {
        referenced.insert(store_key);
        ++report.objects_checked;
        try {
          provider_->get_object(store_key);
        } catch (const NotFoundError&) {
          report.missing.push_back("record " + record.object_id + ": missing " +
                                   what + " object " + store_key);
        }
      };
      check(record.original_store_key, "original");
      for (const DecoyRef& d : record.decoys) {
        check(d.store_key, "decoy #" + std::to_string(d.decoy_index));
      }
    }
  }

  for (const auto& [store_key, name] : provider_->list_objects()) {
    if (!referenced.contains(store_key)) {
      report.orphans.push_back(store_key);
    }
  }
  std::sort(report.orphans.begin(), report.orphans.end());
  if (prune) {
    for (const std::string& store_key : report.orphans) {
      try {
        provider_->delete_object(store_key);
        ++report.orphans_pruned;
      } catch (const Error&) {
      }
    }
  }

  report.fpe_ok = fpe_self_test(key_);
  report.audit_unparseable_lines = audit_->unparseable_lines();
  report.audit_partial_tail = audit_->had_partial_tail();
  report.audit_last_error = audit_->last_error();
  return report;
}

}  // namespace decoyvault
