#include "decoyvault/catalog.hpp"

#include <algorithm>

#include "decoyvault/errors.hpp"

namespace decoyvault {

nlohmann::json ObjectRecord::to_json() const {
  nlohmann::json decoy_list = nlohmann::json::array();
  for (const DecoyRef& d : decoys) {
    decoy_list.push_back({{"decoy_index", d.decoy_index},
                          {"store_key", d.store_key},
                          {"decoy_name", d.decoy_name}});
  }
  return nlohmann::json{{"object_id", object_id},
                        {"logical_name", logical_name},
                        {"original_store_key", original_store_key},
                        {"decoys", std::move(decoy_list)},
                        {"owner_identity", owner_identity.to_json()},
                        {"sensitive_run_count", sensitive_run_count},
                        {"upload_level", upload_level.value()},
                        {"created_at", format_rfc3339(created_at)}};
}

ObjectRecord ObjectRecord::from_json(const nlohmann::json& j) {
  ObjectRecord r;
  r.object_id = j.at("object_id").get<std::string>();
  r.logical_name = j.at("logical_name").get<std::string>();
  r.original_store_key = j.at("original_store_key").get<std::string>();
  for (const auto& d : j.at("decoys")) {
    r.decoys.push_back(DecoyRef{d.at("decoy_index").get<std::uint64_t>(),
                                d.at("store_key").get<std::string>(),
                                d.at("decoy_name").get<std::string>()});
  }
  r.owner_identity = HostIdentity::from_json(j.at("owner_identity"));
  r.sensitive_run_count = j.at("sensitive_run_count").get<std::uint64_t>();
  r.upload_level = InfoconLevel::from_int(j.at("upload_level").get<int>());
  r.created_at = parse_rfc3339(j.at("created_at").get<std::string>());
  return r;
}

namespace {

void validate_record(const ObjectRecord& record) {
  if (record.object_id.empty()) {
    throw InvalidInputError("record has empty object_id");
  }
  if (record.decoys.empty()) {
    throw InvalidInputError("record must reference at least one decoy");
  }
  std::vector<std::string> keys{record.original_store_key};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < record.decoys.size(); ++i) {
    if (record.decoys[i].decoy_index != i + 1) {
      throw InvalidInputError("decoy indices must be 1..n contiguous");
    }
    keys.push_back(record.decoys[i].store_key);
    names.push_back(record.decoys[i].decoy_name);
    if (record.decoys[i].decoy_name == record.logical_name) {
      throw InvalidInputError("decoy name equals logical name");
    }
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
    throw InvalidInputError("store keys in record are not distinct");
  }
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw InvalidInputError("decoy names in record are not distinct");
  }
}

bool record_order(const ObjectRecord& a, const ObjectRecord& b) {
  if (a.created_at != b.created_at) return a.created_at < b.created_at;
  return a.object_id < b.object_id;
}

}  // namespace

ObjectCatalog::ObjectCatalog(std::filesystem::path meta_dir)
    : meta_dir_(std::move(meta_dir)) {
  std::error_code ec;
  std::filesystem::create_directories(meta_dir_, ec);
  if (ec) {
    throw IoError("cannot create catalog directory " + meta_dir_.string() + ": " +
                  ec.message());
  }
  for (const auto& entry : std::filesystem::directory_iterator(meta_dir_)) {
    if (entry.path().extension() != ".json") continue;
    try {
      auto record =
          ObjectRecord::from_json(nlohmann::json::parse(read_file(entry.path())));
      records_[record.object_id] = std::move(record);
    } catch (const std::exception&) {
      // A .tmp rename never tears, so anything unparseable here is foreign;
      // leave it alone and keep serving the rest.
    }
  }
}

std::filesystem::path ObjectCatalog::record_path(std::string_view object_id) const {
  return meta_dir_ / (std::string(object_id) + ".json");
}

void ObjectCatalog::put_record(const ObjectRecord& record) {
  validate_record(record);
  std::unique_lock lock(mutex_);
  if (records_.contains(record.object_id)) {
    throw DuplicateError("object_id already in catalog: " + record.object_id);
  }
  atomic_write_file(record_path(record.object_id), record.to_json().dump(2) + "\n");
  records_[record.object_id] = record;
}

ObjectRecord ObjectCatalog::get_record(std::string_view object_id) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find(std::string(object_id));
  if (it == records_.end()) {
    throw NotFoundError("no catalog record for object " + std::string(object_id));
  }
  return it->second;
}

bool ObjectCatalog::contains(std::string_view object_id) const {
  std::shared_lock lock(mutex_);
  return records_.contains(std::string(object_id));
}

std::vector<ObjectRecord> ObjectCatalog::find_by_name(
    std::string_view logical_name) const {
  std::shared_lock lock(mutex_);
  std::vector<ObjectRecord> out;
  for (const auto& [id, record] : records_) {
    if (record.logical_name == logical_name) out.push_back(record);
  }
  std::sort(out.begin(), out.end(), record_order);
  return out;
}

std::vector<ObjectRecord> ObjectCatalog::list_records(std::size_t page,
                                                      std::size_t page_size) const {
  std::shared_lock lock(mutex_);
  std::vector<ObjectRecord> all;
  all.reserve(records_.size());
  for (const auto& [id, record] : records_) all.push_back(record);
  std::sort(all.begin(), all.end(), record_order);

  std::vector<ObjectRecord> out;
  std::size_t begin = page * page_size;
  for (std::size_t i = begin; i < all.size() && out.size() < page_size; ++i) {
    out.push_back(std::move(all[i]));
  }
  return out;
}

std::size_t ObjectCatalog::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

std::string new_object_id() { return random_hex(16); }

}  // namespace decoyvault
