#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace decoyvault {

struct StoredObject {
  std::string store_key;
  std::string name;
  std::string content;  // raw bytes
  std::map<std::string, std::string> metadata;
};

/// Object-store seam standing in for a cloud provider. Objects are immutable
/// once put; store keys are opaque to callers. Backends tolerate concurrent
/// put/get of distinct keys.
class StorageProvider {
 public:
  virtual ~StorageProvider() = default;

  /// Stores content + metadata, returns the new store key. The metadata key
  /// "name" is reserved for the object name.
  virtual std::string put_object(std::string_view name, std::string_view content,
                                 const std::map<std::string, std::string>& metadata) = 0;

  /// Unknown key -> NotFoundError; I/O trouble -> IoError.
  virtual StoredObject get_object(std::string_view store_key) const = 0;

  virtual void delete_object(std::string_view store_key) = 0;

  /// (store_key, name) pairs in unspecified order.
  virtual std::vector<std::pair<std::string, std::string>> list_objects() const = 0;
};

/// Test/staging backend held entirely in memory.
class MemoryProvider final : public StorageProvider {
 public:
  std::string put_object(std::string_view name, std::string_view content,
                         const std::map<std::string, std::string>& metadata) override;
  StoredObject get_object(std::string_view store_key) const override;
  void delete_object(std::string_view store_key) override;
  std::vector<std::pair<std::string, std::string>> list_objects() const override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, StoredObject> objects_;
};

/// Durable backend over a local directory:
///   <dir>/<store_key>.bin        object bytes
///   <dir>/<store_key>.meta.json  flat string->string map, "name" reserved
/// Both files are written via temp-then-rename, so a crash never leaves a
/// torn object behind.
class FsProvider final : public StorageProvider {
 public:
  explicit FsProvider(std::filesystem::path dir);

  std::string put_object(std::string_view name, std::string_view content,
                         const std::map<std::string, std::string>& metadata) override;
  StoredObject get_object(std::string_view store_key) const override;
  void delete_object(std::string_view store_key) override;
  std::vector<std::pair<std::string, std::string>> list_objects() const override;

 private:
  std::filesystem::path content_path(std::string_view store_key) const;
  std::filesystem::path meta_path(std::string_view store_key) const;

  std::filesystem::path dir_;
};

}  // namespace decoyvault
