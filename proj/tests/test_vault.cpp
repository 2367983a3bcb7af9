#include <doctest.h>

#include <sys/stat.h>

#include <string>

#include "decoyvault/errors.hpp"
#include "decoyvault/vault.hpp"
#include "support.hpp"

using namespace decoyvault;
namespace ts = testsupport;

TEST_SUITE("vault") {

TEST_CASE("init creates the documented layout") {
  ts::TempDir dir;
  auto root = dir.path() / "vault";
  Vault vault = Vault::init(root);

  CHECK(std::filesystem::is_directory(root / "objects"));
  CHECK(std::filesystem::is_directory(root / "meta"));
  CHECK(std::filesystem::is_directory(root / "shares"));
  CHECK(std::filesystem::exists(root / "config.json"));
  CHECK(std::filesystem::exists(root / "audit.log"));

  std::string key_file = read_file(root / "key");
  REQUIRE(key_file.size() == 65);
  CHECK(key_file.back() == '\n');
  for (char c : key_file.substr(0, 64)) {
    CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
  }
  struct stat st{};
  REQUIRE(::stat((root / "key").c_str(), &st) == 0);
  CHECK((st.st_mode & 0777) == 0600);

  CHECK(read_file(root / "level") == "5\n");
  CHECK(vault.threat().get_level().value() == 5);
  CHECK(!vault.config().admin_token.empty());
  CHECK(vault.config().max_object_size == 64ull * 1024 * 1024);

  CHECK_THROWS_AS(Vault::init(root), DuplicateError);
}

TEST_CASE("open rejects non-vault directories") {
  ts::TempDir dir;
  CHECK_THROWS_AS(Vault::open(dir.path()), NotFoundError);
}

TEST_CASE("a reopened vault serves what was uploaded before") {
  ts::TempDir dir;
  auto root = dir.path() / "vault";
  std::string object_id;
  {
    Vault vault = Vault::init(root);
    object_id = vault.broker()
                    .upload("doc.txt", "SSN: 999-99-9999", ts::owner_identity(),
                            vault.threat().get_level())
                    .object_id;
    vault.threat().set_level(InfoconLevel::from_int(4), "exercise");
  }
  Vault vault = Vault::open(root);
  CHECK(vault.threat().get_level().value() == 4);
  AccessResult result = vault.broker().request_download(
      object_id, ts::owner_identity(), vault.threat().get_level());
  CHECK(result.verdict.outcome == Outcome::original_served);
  CHECK(result.content == "SSN: 999-99-9999");
}

TEST_CASE("verify is clean on an exercised vault") {
  ts::TempDir dir;
  Vault vault = Vault::init(dir.path() / "vault");
  auto record = vault.broker().upload("doc.txt", "SSN: 123-45-6789",
                                      ts::owner_identity(),
                                      vault.threat().get_level());
  vault.broker().request_download(record.object_id,
                                  ts::identity_for_mask(ts::owner_identity(), 0),
                                  vault.threat().get_level());

  VerifyReport report = vault.verify();
  CHECK(report.clean());
  CHECK(report.records_checked == 1);
  CHECK(report.objects_checked == 2);
  CHECK(report.missing.empty());
  CHECK(report.orphans.empty());
  CHECK(report.fpe_ok);
}

TEST_CASE("verify reports missing objects") {
  ts::TempDir dir;
  Vault vault = Vault::init(dir.path() / "vault");
  auto record = vault.broker().upload("doc.txt", "12345", ts::owner_identity(),
                                      vault.threat().get_level());
  vault.provider().delete_object(record.decoys[0].store_key);

  VerifyReport report = vault.verify();
  CHECK_FALSE(report.clean());
  REQUIRE(report.missing.size() == 1);
  CHECK(report.missing[0].find(record.object_id) != std::string::npos);
}

TEST_CASE("verify reports orphans and prunes them on request") {
  ts::TempDir dir;
  Vault vault = Vault::init(dir.path() / "vault");
  vault.broker().upload("doc.txt", "12345", ts::owner_identity(),
                        vault.threat().get_level());
  std::string orphan = vault.provider().put_object("stray.bin", "junk", {});

  VerifyReport report = vault.verify();
  CHECK(report.clean());  // orphans are tolerated
  REQUIRE(report.orphans.size() == 1);
  CHECK(report.orphans[0] == orphan);

  VerifyReport pruned = vault.verify(/*prune=*/true);
  CHECK(pruned.orphans_pruned == 1);
  CHECK(vault.verify().orphans.empty());
  CHECK_THROWS_AS(vault.provider().get_object(orphan), NotFoundError);
}

TEST_CASE("config roundtrip and feed path") {
  ts::TempDir dir;
  Vault vault = Vault::init(dir.path() / "vault");
  CHECK(vault.feed_path() == dir.path() / "vault" / "feed.txt");

  auto j = nlohmann::json::parse(read_file(dir.path() / "vault" / "config.json"));
  VaultConfig config = VaultConfig::from_json(j);
  CHECK(config.admin_token == vault.config().admin_token);
  CHECK(config.max_object_size == vault.config().max_object_size);
  CHECK(config.feed_path == "feed.txt");
}

}  // TEST_SUITE
