#include "decoyvault/broker.hpp"

#include <algorithm>

#include "decoyvault/decoy.hpp"
#include "decoyvault/errors.hpp"
#include "decoyvault/scanner.hpp"

namespace decoyvault {

nlohmann::json ShareGrant::to_json() const {
  return nlohmann::json{{"token", token},
                        {"object_id", object_id},
                        {"grantee_identity", grantee_identity.to_json()},
                        {"created_at", format_rfc3339(created_at)},
                        {"created_under_level", created_under_level.value()},
                        {"bound_decoy_index", bound_decoy_index}};
}

ShareGrant ShareGrant::from_json(const nlohmann::json& j) {
  ShareGrant g;
  g.token = j.at("token").get<std::string>();
  g.object_id = j.at("object_id").get<std::string>();
  g.grantee_identity = HostIdentity::from_json(j.at("grantee_identity"));
  g.created_at = parse_rfc3339(j.at("created_at").get<std::string>());
  g.created_under_level =
      InfoconLevel::from_int(j.at("created_under_level").get<int>());
  g.bound_decoy_index = j.at("bound_decoy_index").get<std::uint64_t>();
  return g;
}

namespace {

bool valid_token(std::string_view token) {
  if (token.empty() || token.size() > 64) return false;
  return std::all_of(token.begin(), token.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
}

}  // namespace

ShareStore::ShareStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) {
    throw IoError("cannot create share directory " + dir_.string() + ": " +
                  ec.message());
  }
}

void ShareStore::put(const ShareGrant& grant) {
  if (!valid_token(grant.token)) {
    throw InvalidInputError("malformed share token");
  }
  std::lock_guard lock(mutex_);
  atomic_write_file(dir_ / (grant.token + ".json"), grant.to_json().dump(2) + "\n");
}

ShareGrant ShareStore::get(std::string_view token) const {
  if (!valid_token(token)) {
    throw NotFoundError("no such share token");
  }
  std::lock_guard lock(mutex_);
  return ShareGrant::from_json(
      nlohmann::json::parse(read_file(dir_ / (std::string(token) + ".json"))));
}

AccessBroker::AccessBroker(StorageProvider& provider, ObjectCatalog& catalog,
                           ShareStore& shares, AuditLog& audit,
                           const fpe::FpeKey& key, std::uint64_t max_object_size)
    : provider_(provider),
      catalog_(catalog),
      shares_(shares),
      audit_(audit),
      key_(key),
      max_object_size_(max_object_size) {}

ObjectRecord AccessBroker::upload(std::string_view logical_name,
                                  std::string_view content, const HostIdentity& owner,
                                  InfoconLevel level) {
  if (!owner.complete()) {
    throw PolicyError("upload requires mac, ip, hostname and user_id");
  }
  if (content.size() > max_object_size_) {
    throw PolicyError("object exceeds the configured size limit");
  }
  if (logical_name.empty()) {
    throw InvalidInputError("logical name must not be empty");
  }

  HostIdentity embedded = owner;
  embedded.quad_hash = compute_quad_hash(*owner.mac, *owner.ip, *owner.hostname,
                                         *owner.user_id);

  ObjectRecord record;
  record.object_id = new_object_id();
  record.logical_name = std::string(logical_name);
  record.owner_identity = embedded;
  record.sensitive_run_count = scanner::scan(content).size();
  record.upload_level = level;
  record.created_at = now_utc();

  record.original_store_key =
      provider_.put_object(logical_name, content,
                           {{"emb.mac", *embedded.mac},
                            {"emb.ip", *embedded.ip},
                            {"emb.hostname", *embedded.hostname},
                            {"emb.user_id", *embedded.user_id},
                            {"emb.quad_hash", *embedded.quad_hash}});

  const int decoys = decoy_count(level);
  for (int i = 1; i <= decoys; ++i) {
    std::string decoy_content =
        decoy::generate_decoy(content, key_, record.object_id,
                              static_cast<std::uint64_t>(i));
    std::string decoy_name =
        decoy::derive_decoy_name(logical_name, static_cast<std::uint64_t>(i));
    std::string store_key =
        provider_.put_object(decoy_name, decoy_content,
                             {{"decoy.of", record.object_id},
                              {"decoy.index", std::to_string(i)}});
    record.decoys.push_back(
        DecoyRef{static_cast<std::uint64_t>(i), store_key, decoy_name});
  }

  catalog_.put_record(record);

  AuditEvent ev;
  ev.at = now_utc();
  ev.kind = EventKind::upload;
  ev.object_id = record.object_id;
  ev.presented_identity = embedded;
  ev.detail = "stored \"" + record.logical_name + "\" with " +
              std::to_string(decoys) + " decoy(s) at level " +
              std::to_string(level.value());
  audit_.record(std::move(ev));

  return record;
}

ObjectRecord AccessBroker::resolve(std::string_view selector) const {
  if (catalog_.contains(selector)) {
    return catalog_.get_record(selector);
  }
  auto by_name = catalog_.find_by_name(selector);
  if (by_name.empty()) {
    throw NotFoundError("no object matches selector: " + std::string(selector));
  }
  return by_name.back();  // newest record wins for re-uploaded names
}

std::uint64_t AccessBroker::select_decoy_index(const HostIdentity& presented,
                                               std::uint64_t decoy_total) {
  if (decoy_total == 0) {
    throw InvalidInputError("record has no decoys");
  }
  auto digest = sha256(presented.canonical_concat());
  std::uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x = x << 8 | digest[static_cast<std::size_t>(i)];
  return 1 + x % decoy_total;
}

AccessResult AccessBroker::gate(const ObjectRecord& record,
                                const HostIdentity& embedded,
                                const HostIdentity& presented, InfoconLevel level,
                                EventKind kind,
                                std::optional<std::uint64_t> decoy_when_matched,
                                const std::string& detail) {
  const IdentifierSet required = required_identifiers(level);
  const MatchResult mr = match(embedded, presented, required);

  std::optional<std::uint64_t> decoy_index;
  if (!mr.overall) {
    decoy_index = select_decoy_index(presented, record.decoys.size());
  } else if (decoy_when_matched) {
    decoy_index = decoy_when_matched;
  }

  std::string content;
  if (decoy_index) {
    content = provider_.get_object(record.decoys[*decoy_index - 1].store_key).content;
  } else {
    content = provider_.get_object(record.original_store_key).content;
  }

  AccessVerdict verdict;
  verdict.outcome =
      decoy_index ? Outcome::decoy_served : Outcome::original_served;
  verdict.matched_fields = mr.matched_fields;
  verdict.required_fields = required;
  verdict.decoy_index_served = decoy_index;
  verdict.object_id = record.object_id;
  verdict.at = now_utc();

  AuditEvent ev;
  ev.at = verdict.at;
  ev.kind = kind;
  ev.object_id = record.object_id;
  ev.presented_identity = presented;
  ev.required = required;
  ev.matched = mr.matched_fields;
  ev.outcome = verdict.outcome;
  ev.detail = detail;
  audit_.record(std::move(ev));

  // Either way the caller sees the object's own name and well-formed bytes;
  // a mismatch is never observable as an error.
  return AccessResult{std::move(content), record.logical_name, std::move(verdict)};
}

AccessResult AccessBroker::request_download(std::string_view selector,
                                            const HostIdentity& presented,
                                            InfoconLevel level) {
  ObjectRecord record = resolve(selector);
  return gate(record, record.owner_identity, presented, level, EventKind::download,
              std::nullopt, "download " + std::string(selector));
}

ShareGrant AccessBroker::create_share(std::string_view object_id,
                                      const HostIdentity& owner_presented,
                                      HostIdentity grantee, InfoconLevel level) {
  ObjectRecord record = catalog_.get_record(object_id);
  const IdentifierSet required = required_identifiers(level);
  const MatchResult mr = match(record.owner_identity, owner_presented, required);

  if (!grantee.quad_hash.has_value()) {
    grantee = grantee.with_computed_hash();
  }

  ShareGrant grant;
  grant.token = random_hex(16);
  grant.object_id = record.object_id;
  grant.grantee_identity = std::move(grantee);
  grant.created_at = now_utc();
  grant.created_under_level = level;
  grant.bound_decoy_index =
      mr.overall ? 0 : select_decoy_index(owner_presented, record.decoys.size());
  shares_.put(grant);

  AuditEvent ev;
  ev.at = grant.created_at;
  ev.kind = EventKind::share_create;
  ev.object_id = record.object_id;
  ev.presented_identity = owner_presented;
  ev.required = required;
  ev.matched = mr.matched_fields;
  ev.outcome = mr.overall ? Outcome::original_served : Outcome::decoy_served;
  ev.detail = "share token " + grant.token + " issued";
  audit_.record(std::move(ev));

  return grant;
}

AccessResult AccessBroker::redeem_share(std::string_view token,
                                        const HostIdentity& presented,
                                        InfoconLevel level) {
  ShareGrant grant = shares_.get(token);
  ObjectRecord record = catalog_.get_record(grant.object_id);
  std::optional<std::uint64_t> bound;
  if (grant.bound_decoy_index != 0) bound = grant.bound_decoy_index;
  return gate(record, grant.grantee_identity, presented, level,
              EventKind::share_redeem, bound,
              "redeem share token " + std::string(token));
}

}  // namespace decoyvault
