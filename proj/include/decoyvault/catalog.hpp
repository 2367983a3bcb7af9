#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "decoyvault/identity.hpp"
#include "decoyvault/threat.hpp"
#include "decoyvault/util.hpp"

namespace decoyvault {

struct DecoyRef {
  std::uint64_t decoy_index = 0;  // 1-based, contiguous
  std::string store_key;
  std::string decoy_name;

  bool operator==(const DecoyRef&) const = default;
};

/// Catalog entry binding a logical document to its stored original, its
/// decoys, the identity embedded at upload, and the upload context. The
/// record — never an object name — is what decides which object is real.
struct ObjectRecord {
  std::string object_id;
  std::string logical_name;
  std::string original_store_key;
  std::vector<DecoyRef> decoys;
  HostIdentity owner_identity;
  std::uint64_t sensitive_run_count = 0;
  InfoconLevel upload_level;
  TimePoint created_at{};

  nlohmann::json to_json() const;
  static ObjectRecord from_json(const nlohmann::json& j);
};

/// Durable mapping object_id -> ObjectRecord, one JSON document per record
/// under meta/. The in-memory index is rebuilt by a directory scan at open.
/// Writes are serialized; reads may run concurrently and always observe
/// fully written records.
class ObjectCatalog {
 public:
  explicit ObjectCatalog(std::filesystem::path meta_dir);

  /// Record is durable before return. Duplicate id -> DuplicateError.
  void put_record(const ObjectRecord& record);

  ObjectRecord get_record(std::string_view object_id) const;
  bool contains(std::string_view object_id) const;

  /// All records with this logical name (re-uploads create siblings),
  /// oldest first.
  std::vector<ObjectRecord> find_by_name(std::string_view logical_name) const;

  /// Records ordered by (created_at, object_id); pages are zero-based.
  std::vector<ObjectRecord> list_records(std::size_t page = 0,
                                         std::size_t page_size = 100) const;

  std::size_t size() const;

 private:
  std::filesystem::path record_path(std::string_view object_id) const;

  std::filesystem::path meta_dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, ObjectRecord> records_;  // by object_id
};

/// 16 random bytes as 32 hex chars; collision-free at vault scale.
std::string new_object_id();

}  // namespace decoyvault
