#include <doctest.h>

#include <set>
#include <string>

#include "decoyvault/broker.hpp"
#include "decoyvault/decoy.hpp"
#include "decoyvault/errors.hpp"
#include "support.hpp"

using namespace decoyvault;
namespace ts = testsupport;

namespace {

struct BrokerRig {
  ts::TempDir dir;
  MemoryProvider provider;
  ObjectCatalog catalog{dir.path() / "meta"};
  ShareStore shares{dir.path() / "shares"};
  AuditLog audit{dir.path() / "audit.log"};
  fpe::FpeKey key = ts::fixed_key();
  AccessBroker broker{provider, catalog, shares, audit, key, 1 << 20};

  InfoconLevel level(int v) { return InfoconLevel::from_int(v); }
};

const std::string kSampleContent = "SSN: 123-45-6789\ncard 4111-1111-1111-1111\n";

/// Provider decorator that starts failing after `allowed` successful puts.
class FailingProvider final : public StorageProvider {
 public:
  FailingProvider(StorageProvider& inner, int allowed)
      : inner_(inner), allowed_(allowed) {}

  std::string put_object(std::string_view name, std::string_view content,
                         const std::map<std::string, std::string>& metadata) override {
    if (allowed_-- <= 0) throw IoError("simulated provider outage");
    return inner_.put_object(name, content, metadata);
  }
  StoredObject get_object(std::string_view key) const override {
    return inner_.get_object(key);
  }
  void delete_object(std::string_view key) override { inner_.delete_object(key); }
  std::vector<std::pair<std::string, std::string>> list_objects() const override {
    return inner_.list_objects();
  }

 private:
  StorageProvider& inner_;
  int allowed_;
};

}  // namespace

TEST_SUITE("broker") {

TEST_CASE("decoy count follows the upload-time level") {
  BrokerRig rig;
  auto owner = ts::owner_identity();
  CHECK(rig.broker.upload("a.txt", kSampleContent, owner, rig.level(5))
            .decoys.size() == 1);
  CHECK(rig.broker.upload("b.txt", kSampleContent, owner, rig.level(1))
            .decoys.size() == 5);
  CHECK(rig.provider.list_objects().size() == 2 + 6);
}

TEST_CASE("upload embeds the owner identity on the original object") {
  BrokerRig rig;
  auto owner = ts::owner_identity();
  ObjectRecord record =
      rig.broker.upload("doc.txt", kSampleContent, owner, rig.level(5));

  StoredObject original = rig.provider.get_object(record.original_store_key);
  CHECK(original.metadata.at("emb.mac") == *owner.mac);
  CHECK(original.metadata.at("emb.ip") == *owner.ip);
  CHECK(original.metadata.at("emb.hostname") == *owner.hostname);
  CHECK(original.metadata.at("emb.user_id") == *owner.user_id);
  // Recomputed through the hashing path, not copied from the caller.
  CHECK(original.metadata.at("emb.quad_hash") ==
        compute_quad_hash(*owner.mac, *owner.ip, *owner.hostname, *owner.user_id));

  for (const DecoyRef& d : record.decoys) {
    StoredObject stored = rig.provider.get_object(d.store_key);
    CHECK(stored.metadata.at("decoy.of") == record.object_id);
    CHECK(stored.metadata.at("decoy.index") == std::to_string(d.decoy_index));
    CHECK(stored.name == d.decoy_name);
    CHECK(stored.content ==
          decoy::generate_decoy(kSampleContent, rig.key, record.object_id,
                                d.decoy_index));
  }

  CHECK(record.sensitive_run_count == 7);  // 3 SSN runs + 4 card runs
  CHECK(record.logical_name == "doc.txt");
}

TEST_CASE("files without sensitive runs still get (identical) decoys") {
  BrokerRig rig;
  const std::string bland = "nothing numeric in here at all\n";
  ObjectRecord record =
      rig.broker.upload("bland.txt", bland, ts::owner_identity(), rig.level(4));

  CHECK(record.sensitive_run_count == 0);
  REQUIRE(record.decoys.size() == 2);
  for (const DecoyRef& d : record.decoys) {
    // Content-level deception is impossible; name-level deception remains,
    // and the catalog makes that visible through the zero run count.
    CHECK(rig.provider.get_object(d.store_key).content == bland);
    CHECK(d.decoy_name != record.logical_name);
  }

  HostIdentity intruder = ts::identity_for_mask(ts::owner_identity(), 0);
  AccessResult result =
      rig.broker.request_download(record.object_id, intruder, rig.level(5));
  CHECK(result.verdict.outcome == Outcome::decoy_served);
  CHECK(result.content == bland);
}

TEST_CASE("upload preconditions") {
  BrokerRig rig;
  HostIdentity incomplete = ts::owner_identity();
  incomplete.user_id.reset();
  CHECK_THROWS_AS(rig.broker.upload("x", "data", incomplete, rig.level(5)),
                  PolicyError);

  AccessBroker tiny(rig.provider, rig.catalog, rig.shares, rig.audit, rig.key, 4);
  CHECK_THROWS_AS(tiny.upload("x", "12345", ts::owner_identity(), rig.level(5)),
                  PolicyError);
  CHECK_THROWS_AS(rig.broker.upload("", "data", ts::owner_identity(), rig.level(5)),
                  InvalidInputError);
  CHECK(rig.catalog.size() == 0);
}

TEST_CASE("a provider failure mid-upload leaves no catalog record") {
  BrokerRig rig;
  FailingProvider flaky(rig.provider, 2);  // original + first decoy succeed
  AccessBroker broker(flaky, rig.catalog, rig.shares, rig.audit, rig.key, 1 << 20);
  CHECK_THROWS_AS(
      broker.upload("x.txt", kSampleContent, ts::owner_identity(), rig.level(3)),
      IoError);
  CHECK(rig.catalog.size() == 0);
  // Orphan objects may remain; that is the documented, reclaimable state.
  CHECK(rig.provider.list_objects().size() == 2);
}

TEST_CASE("matched download returns the original bytes") {
  BrokerRig rig;
  auto owner = ts::owner_identity();
  ObjectRecord record =
      rig.broker.upload("doc.txt", kSampleContent, owner, rig.level(5));

  AccessResult result =
      rig.broker.request_download(record.object_id, owner, rig.level(5));
  CHECK(result.verdict.outcome == Outcome::original_served);
  CHECK(result.content == kSampleContent);
  CHECK(result.name == "doc.txt");
  CHECK_FALSE(result.verdict.decoy_index_served.has_value());
  CHECK(result.verdict.required_fields == IdentifierSet{Identifier::mac});
}

TEST_CASE("mismatched download silently serves a decoy under the object's name") {
  BrokerRig rig;
  auto owner = ts::owner_identity();
  ObjectRecord record =
      rig.broker.upload("doc.txt", kSampleContent, owner, rig.level(5));

  HostIdentity wrong = owner;
  wrong.mac = ts::wrong_value(Identifier::mac);
  wrong = wrong.with_computed_hash();

  AccessResult result =
      rig.broker.request_download(record.object_id, wrong, rig.level(5));
  CHECK(result.verdict.outcome == Outcome::decoy_served);
  CHECK(result.name == "doc.txt");  // reported as the object's own name
  CHECK(result.content.size() == kSampleContent.size());
  CHECK(result.content != kSampleContent);
  REQUIRE(result.verdict.decoy_index_served.has_value());
  CHECK(result.content ==
        rig.provider
            .get_object(record.decoys[*result.verdict.decoy_index_served - 1]
                            .store_key)
            .content);
  CHECK_FALSE(result.verdict.matched_fields.contains(Identifier::mac));
}

TEST_CASE("partial matches fail closed at stricter levels") {
  BrokerRig rig;
  auto owner = ts::owner_identity();
  ObjectRecord record =
      rig.broker.upload("doc.txt", kSampleContent, owner, rig.level(1));

  // mac+ip+hostname correct, user wrong.
  HostIdentity presented = owner;
  presented.user_id = ts::wrong_value(Identifier::user_id);
  presented = presented.with_computed_hash();

  CHECK(rig.broker.request_download(record.object_id, presented, rig.level(3))
            .verdict.outcome == Outcome::original_served);
  CHECK(rig.broker.request_download(record.object_id, presented, rig.level(2))
            .verdict.outcome == Outcome::decoy_served);
}

TEST_CASE("gate truth table: 32 identity combinations x 5 levels") {
  BrokerRig rig;
  auto owner = ts::owner_identity();
  ObjectRecord record =
      rig.broker.upload("doc.txt", kSampleContent, owner, rig.level(1));

  for (int level = 1; level <= 5; ++level) {
    IdentifierSet required = required_identifiers(rig.level(level));
    for (unsigned mask = 0; mask < 32; ++mask) {
      HostIdentity presented = ts::identity_for_mask(owner, mask);
      IdentifierSet correct;
      for (Identifier id : kAllIdentifiers) {
        if ((mask >> static_cast<unsigned>(id)) & 1u) correct.insert(id);
      }
      bool expect_original = required.subset_of(correct);
      AccessResult result =
          rig.broker.request_download(record.object_id, presented, rig.level(level));
      CHECK(result.verdict.outcome == (expect_original ? Outcome::original_served
                                                       : Outcome::decoy_served));
      CHECK(result.content.size() == kSampleContent.size());
    }
  }
}

TEST_CASE("decoy selection is sticky per presented identity") {
  BrokerRig rig;
  ObjectRecord record = rig.broker.upload("doc.txt", kSampleContent,
                                          ts::owner_identity(), rig.level(1));

  HostIdentity intruder = ts::identity_for_mask(ts::owner_identity(), 0);
  std::set<std::uint64_t> indices;
  std::set<std::string> bodies;
  for (int i = 0; i < 8; ++i) {
    AccessResult result =
        rig.broker.request_download(record.object_id, intruder, rig.level(5));
    indices.insert(*result.verdict.decoy_index_served);
    bodies.insert(result.content);
  }
  CHECK(indices.size() == 1);
  CHECK(bodies.size() == 1);

  // Selection spreads across decoys as the identity varies.
  std::set<std::uint64_t> spread;
  for (unsigned mask = 0; mask < 16; ++mask) {
    HostIdentity intruder_n = ts::identity_for_mask(ts::owner_identity(), mask);
    intruder_n.mac = "0" + std::to_string(mask % 10) + ":00:00:00:00:00";
    spread.insert(AccessBroker::select_decoy_index(intruder_n, 5));
  }
  CHECK(spread.size() > 1);
}

TEST_CASE("selectors: ids, names, newest-version rule, unknown") {
  BrokerRig rig;
  auto owner = ts::owner_identity();
  ObjectRecord v1 = rig.broker.upload("doc.txt", "version one ", owner, rig.level(5));
  ObjectRecord v2 = rig.broker.upload("doc.txt", "version two!", owner, rig.level(5));

  CHECK(rig.broker.request_download(v1.object_id, owner, rig.level(5)).content ==
        "version one ");
  CHECK(rig.broker.request_download("doc.txt", owner, rig.level(5)).content ==
        "version two!");
  CHECK(rig.broker.request_download("doc.txt", owner, rig.level(5))
            .verdict.object_id == v2.object_id);
  CHECK_THROWS_AS(rig.broker.request_download("ghost.txt", owner, rig.level(5)),
                  NotFoundError);
}

TEST_CASE("share lifecycle, owner verified") {
  BrokerRig rig;
  auto owner = ts::owner_identity();
  auto grantee = ts::grantee_identity();
  ObjectRecord record =
      rig.broker.upload("doc.txt", kSampleContent, owner, rig.level(5));

  ShareGrant grant =
      rig.broker.create_share(record.object_id, owner, grantee, rig.level(5));
  CHECK(grant.bound_decoy_index == 0);
  CHECK(grant.token.size() == 32);

  AccessResult redeemed =
      rig.broker.redeem_share(grant.token, grantee, rig.level(5));
  CHECK(redeemed.verdict.outcome == Outcome::original_served);
  CHECK(redeemed.content == kSampleContent);

  // A non-grantee (including the owner) gets a decoy.
  AccessResult poached = rig.broker.redeem_share(grant.token, owner, rig.level(5));
  CHECK(poached.verdict.outcome == Outcome::decoy_served);
  CHECK(poached.content.size() == kSampleContent.size());

  ShareGrant second =
      rig.broker.create_share(record.object_id, owner, grantee, rig.level(5));
  CHECK(second.token != grant.token);

  CHECK_THROWS_AS(rig.broker.create_share("does-not-exist", owner, grantee,
                                          rig.level(5)),
                  NotFoundError);
  CHECK_THROWS_AS(rig.broker.redeem_share(std::string(32, '0'), grantee,
                                          rig.level(5)),
                  NotFoundError);
}

TEST_CASE("share created by an unverified owner is bound to a decoy") {
  BrokerRig rig;
  auto owner = ts::owner_identity();
  auto grantee = ts::grantee_identity();
  ObjectRecord record =
      rig.broker.upload("doc.txt", kSampleContent, owner, rig.level(5));

  HostIdentity impostor = ts::identity_for_mask(owner, 0);
  ShareGrant grant =
      rig.broker.create_share(record.object_id, impostor, grantee, rig.level(5));
  CHECK(grant.bound_decoy_index >= 1);

  // Even the registered grantee only ever sees the decoy through this grant.
  AccessResult redeemed =
      rig.broker.redeem_share(grant.token, grantee, rig.level(5));
  CHECK(redeemed.verdict.outcome == Outcome::decoy_served);
  CHECK(redeemed.verdict.decoy_index_served == grant.bound_decoy_index);
  CHECK(redeemed.content.size() == kSampleContent.size());
  CHECK(redeemed.content != kSampleContent);
}

TEST_CASE("redeem applies the level in force at redeem time") {
  BrokerRig rig;
  auto owner = ts::owner_identity();
  auto grantee = ts::grantee_identity();
  ObjectRecord record =
      rig.broker.upload("doc.txt", kSampleContent, owner, rig.level(5));
  ShareGrant grant =
      rig.broker.create_share(record.object_id, owner, grantee, rig.level(5));

  // Grantee presents only a matching mac; rest is wrong.
  HostIdentity partial = ts::identity_for_mask(grantee, 1u);
  CHECK(rig.broker.redeem_share(grant.token, partial, rig.level(5))
            .verdict.outcome == Outcome::original_served);
  CHECK(rig.broker.redeem_share(grant.token, partial, rig.level(2))
            .verdict.outcome == Outcome::decoy_served);
  CHECK(rig.broker.redeem_share(grant.token, grantee, rig.level(2))
            .verdict.outcome == Outcome::original_served);
}

TEST_CASE("every gate decision is audited exactly once") {
  BrokerRig rig;
  auto owner = ts::owner_identity();
  ObjectRecord record =
      rig.broker.upload("doc.txt", kSampleContent, owner, rig.level(5));

  HostIdentity intruder = ts::identity_for_mask(owner, 0);
  const int matched_calls = 6;
  const int mismatched_calls = 4;
  for (int i = 0; i < matched_calls; ++i) {
    rig.broker.request_download(record.object_id, owner, rig.level(5));
  }
  for (int i = 0; i < mismatched_calls; ++i) {
    rig.broker.request_download(record.object_id, intruder, rig.level(5));
  }

  auto downloads = rig.audit.query({.kind = EventKind::download});
  REQUIRE(downloads.size() == matched_calls + mismatched_calls);
  int decoy_events = 0;
  for (const AuditEvent& ev : downloads) {
    if (ev.outcome == Outcome::decoy_served) {
      ++decoy_events;
      CHECK_FALSE(ev.required.subset_of(ev.matched));
    } else {
      CHECK(ev.required.subset_of(ev.matched));
    }
  }
  CHECK(decoy_events == mismatched_calls);

  CHECK(rig.audit.query({.kind = EventKind::upload}).size() == 1);
}

}  // TEST_SUITE
