#include "decoyvault/storage.hpp"

#include <json.hpp>

#include "decoyvault/errors.hpp"
#include "decoyvault/util.hpp"

namespace decoyvault {

namespace {

constexpr std::string_view kNameKey = "name";

void check_metadata_keys(const std::map<std::string, std::string>& metadata) {
  if (metadata.contains(std::string(kNameKey))) {
    throw InvalidInputError("metadata key \"name\" is reserved");
  }
}

bool valid_store_key(std::string_view key) {
  if (key.empty() || key.size() > 64) return false;
  for (char c : key) {
    bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!ok) return false;
  }
  return true;
}

}  // namespace

std::string MemoryProvider::put_object(
    std::string_view name, std::string_view content,
    const std::map<std::string, std::string>& metadata) {
  check_metadata_keys(metadata);
  std::lock_guard lock(mutex_);
  std::string key = random_hex(16);
  objects_[key] = StoredObject{key, std::string(name), std::string(content), metadata};
  return key;
}

StoredObject MemoryProvider::get_object(std::string_view store_key) const {
  std::lock_guard lock(mutex_);
  auto it = objects_.find(std::string(store_key));
  if (it == objects_.end()) {
    throw NotFoundError("no such object: " + std::string(store_key));
  }
  return it->second;
}

void MemoryProvider::delete_object(std::string_view store_key) {
  std::lock_guard lock(mutex_);
  if (objects_.erase(std::string(store_key)) == 0) {
    throw NotFoundError("no such object: " + std::string(store_key));
  }
}

std::vector<std::pair<std::string, std::string>> MemoryProvider::list_objects() const {
  std::lock_guard lock(mutex_);
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(objects_.size());
  for (const auto& [key, object] : objects_) {
    out.emplace_back(key, object.name);
  }
  return out;
}

FsProvider::FsProvider(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw IoError("cannot create object directory " + dir_.string() + ": " +
                  ec.message());
  }
}

std::filesystem::path FsProvider::content_path(std::string_view store_key) const {
  return dir_ / (std::string(store_key) + ".bin");
}

std::filesystem::path FsProvider::meta_path(std::string_view store_key) const {
  return dir_ / (std::string(store_key) + ".meta.json");
}

std::string FsProvider::put_object(std::string_view name, std::string_view content,
                                   const std::map<std::string, std::string>& metadata) {
  check_metadata_keys(metadata);
  std::string key = random_hex(16);

  nlohmann::json meta(metadata);
  meta[std::string(kNameKey)] = std::string(name);

  // Content first; an interrupted put leaves at worst an unreferenced .bin.
  atomic_write_file(content_path(key), content);
  atomic_write_file(meta_path(key), meta.dump(2) + "\n");
  return key;
}

StoredObject FsProvider::get_object(std::string_view store_key) const {
  if (!valid_store_key(store_key)) {
    throw NotFoundError("no such object: " + std::string(store_key));
  }
  StoredObject out;
  out.store_key = std::string(store_key);
  out.content = read_file(content_path(store_key));

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(meta_path(store_key)));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupt metadata for object " + out.store_key + ": " + e.what());
  }
  for (const auto& [k, v] : meta.items()) {
    if (k == kNameKey) {
      out.name = v.get<std::string>();
    } else {
      out.metadata[k] = v.get<std::string>();
    }
  }
  return out;
}

void FsProvider::delete_object(std::string_view store_key) {
  if (!valid_store_key(store_key)) {
    throw NotFoundError("no such object: " + std::string(store_key));
  }
  std::error_code ec;
  bool removed_content = std::filesystem::remove(content_path(store_key), ec);
  if (ec) {
    throw IoError("cannot delete object " + std::string(store_key) + ": " +
                  ec.message());
  }
  if (!removed_content) {
    throw NotFoundError("no such object: " + std::string(store_key));
  }
  std::filesystem::remove(meta_path(store_key), ec);
  if (ec) {
    throw IoError("cannot delete metadata for " + std::string(store_key) + ": " +
                  ec.message());
  }
}

std::vector<std::pair<std::string, std::string>> FsProvider::list_objects() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    std::string filename = entry.path().filename().string();
    constexpr std::string_view kSuffix = ".bin";
    if (filename.size() <= kSuffix.size() || !filename.ends_with(kSuffix)) continue;
    std::string key = filename.substr(0, filename.size() - kSuffix.size());
    if (!valid_store_key(key)) continue;
    std::string name;
    try {
      auto meta = nlohmann::json::parse(read_file(meta_path(key)));
      name = meta.value(std::string(kNameKey), std::string{});
    } catch (const std::exception&) {
      // An interrupted put can leave a .bin without metadata; still list it
      // so integrity passes can see and reclaim it.
    }
    out.emplace_back(std::move(key), std::move(name));
  }
  return out;
}

}  // namespace decoyvault
