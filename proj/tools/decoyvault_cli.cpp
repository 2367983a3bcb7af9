// decoyvault — deception-based object vault CLI.
//
// Every stored file is accompanied by decoy replicas whose numeric content
// has been rewritten by a format-preserving digit cipher. Downloads and
// shares are verified against the host identifiers embedded at upload time;
// a requester that fails verification silently receives a decoy and the
// event is audited. Verification strictness and decoy counts follow the
// vault's five-tier threat level.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "decoyvault/errors.hpp"
#include "decoyvault/gateway.hpp"
#include "decoyvault/vault.hpp"

namespace dv = decoyvault;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoVault = 2;
constexpr int kExitUsage = 64;

dv::GatewayService* g_gateway = nullptr;

void handle_shutdown(int) {
  if (g_gateway != nullptr) g_gateway->stop();
}

dv::Vault open_vault(const std::string& dir) { return dv::Vault::open(dir); }

// --spoof mac=...,ip=...,hostname=...,user=...,quad=...
// An empty value clears the field. Unless quad is spoofed explicitly, the
// quad hash is recomputed from the resulting four fields, the way a real
// client stack would present it.
dv::HostIdentity apply_spoof(dv::HostIdentity base,
                             const std::vector<std::string>& spoofs) {
  bool quad_overridden = false;
  for (const std::string& spec : spoofs) {
    std::size_t pos = 0;
    while (pos <= spec.size()) {
      std::size_t comma = spec.find(',', pos);
      std::string pair = spec.substr(pos, comma == std::string::npos
                                              ? std::string::npos
                                              : comma - pos);
      pos = comma == std::string::npos ? spec.size() + 1 : comma + 1;
      if (pair.empty()) continue;
      std::size_t eq = pair.find('=');
      if (eq == std::string::npos) {
        throw dv::InvalidInputError("--spoof expects key=value, got \"" + pair +
                                    "\"");
      }
      std::string key = pair.substr(0, eq);
      std::string value = pair.substr(eq + 1);

      dv::Identifier id;
      if (key == "mac") {
        id = dv::Identifier::mac;
      } else if (key == "ip") {
        id = dv::Identifier::ip;
      } else if (key == "hostname" || key == "host") {
        id = dv::Identifier::hostname;
      } else if (key == "user" || key == "user_id") {
        id = dv::Identifier::user_id;
      } else if (key == "quad" || key == "quad_hash") {
        id = dv::Identifier::quad_hash;
        quad_overridden = true;
      } else {
        throw dv::InvalidInputError("--spoof: unknown field \"" + key + "\"");
      }
      base.field(id) = value.empty()
                           ? std::nullopt
                           : dv::canonicalize_field_or_raw(id, value);
    }
  }
  if (!quad_overridden) {
    base.quad_hash.reset();
    base = base.with_computed_hash();
  }
  return base;
}

void write_output(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    std::fflush(stdout);
  } else {
    dv::atomic_write_file(out_path, content);
  }
}

void print_access_result(const dv::AccessResult& result,
                         const std::string& out_path) {
  std::cerr << "verdict: " << dv::outcome_name(result.verdict.outcome) << "\n";
  write_output(result.content, out_path);
}

int run_verify(dv::Vault& vault, bool prune) {
  dv::VerifyReport report = vault.verify(prune);
  std::cout << "records checked: " << report.records_checked << "\n";
  std::cout << "objects checked: " << report.objects_checked << "\n";
  std::cout << "missing objects: " << report.missing.size() << "\n";
  for (const std::string& line : report.missing) std::cout << "  " << line << "\n";
  std::cout << "orphan objects: " << report.orphans.size() << "\n";
  for (const std::string& key : report.orphans) std::cout << "  " << key << "\n";
  if (prune) std::cout << "orphans pruned: " << report.orphans_pruned << "\n";
  std::cout << "fpe self-test: " << (report.fpe_ok ? "ok" : "FAILED") << "\n";
  std::cout << "audit log: "
            << (report.audit_unparseable_lines == 0 ? "ok"
                                                    : "UNPARSEABLE LINES")
            << (report.audit_partial_tail ? " (partial trailing line repaired)"
                                          : "")
            << "\n";
  if (report.audit_last_error) {
    std::cout << "audit last error: " << *report.audit_last_error << "\n";
  }
  std::cout << (report.clean() ? "clean" : "NOT CLEAN") << "\n";
  return report.clean() ? kExitOk : kExitError;
}

std::pair<std::string, int> parse_bind(const std::string& bind) {
  std::size_t colon = bind.rfind(':');
  if (colon == std::string::npos) {
    throw dv::InvalidInputError("--bind expects host:port");
  }
  int port = 0;
  try {
    port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw dv::InvalidInputError("--bind expects a numeric port");
  }
  return {bind.substr(0, colon), port};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decoyvault — deception-based object vault"};
  app.require_subcommand(1);

  const char* env_vault = std::getenv("DECOYVAULT_PATH");
  std::string vault_dir = env_vault != nullptr ? env_vault : ".";
  app.add_option("--vault", vault_dir, "Vault directory")
      ->envname("DECOYVAULT_PATH");

  int exit_code = kExitOk;

  // init <vault-dir>
  std::string init_dir;
  auto* cmd_init = app.add_subcommand("init", "Create a new vault");
  cmd_init->add_option("dir", init_dir, "Directory to create the vault in")
      ->required();
  cmd_init->callback([&] {
    dv::Vault vault = dv::Vault::init(init_dir);
    std::cout << "vault created at " << vault.root().string() << "\n";
  });

  // put <file> [--name N]
  std::string put_file;
  std::string put_name;
  auto* cmd_put = app.add_subcommand("put", "Upload a file with decoys");
  cmd_put->add_option("file", put_file, "File to upload")->required();
  cmd_put->add_option("--name", put_name, "Logical name (default: basename)");
  cmd_put->callback([&] {
    dv::Vault vault = open_vault(vault_dir);
    std::string content = dv::read_file(put_file);
    std::string name =
        put_name.empty() ? std::filesystem::path(put_file).filename().string()
                         : put_name;
    dv::HostIdentity owner = dv::HostIdentity::collect();
    dv::ObjectRecord record =
        vault.broker().upload(name, content, owner, vault.threat().get_level());
    std::cout << "object_id: " << record.object_id << "\n";
    for (const dv::DecoyRef& d : record.decoys) {
      std::cout << "decoy: " << d.decoy_name << "\n";
    }
  });

  // get <selector> [--spoof ...] [--out FILE]
  std::string get_selector;
  std::vector<std::string> get_spoof;
  std::string get_out;
  auto* cmd_get = app.add_subcommand("get", "Download by object id or name");
  cmd_get->add_option("selector", get_selector, "Object id or logical name")
      ->required();
  cmd_get->add_option("--spoof", get_spoof,
                      "Override collected identity fields for testing, "
                      "e.g. mac=00:11:22:33:44:55,user=eve");
  cmd_get->add_option("--out", get_out, "Write content to a file instead of stdout");
  cmd_get->callback([&] {
    dv::Vault vault = open_vault(vault_dir);
    dv::HostIdentity presented =
        apply_spoof(dv::HostIdentity::collect(), get_spoof);
    dv::AccessResult result = vault.broker().request_download(
        get_selector, presented, vault.threat().get_level());
    print_access_result(result, get_out);
  });

  // share <object_id> --grantee-...
  std::string share_object;
  std::string grantee_mac, grantee_ip, grantee_host, grantee_user, grantee_quad;
  auto* cmd_share = app.add_subcommand("share", "Issue a share token");
  cmd_share->add_option("object_id", share_object, "Object to share")->required();
  cmd_share->add_option("--grantee-mac", grantee_mac, "Grantee MAC address")
      ->required();
  cmd_share->add_option("--grantee-ip", grantee_ip, "Grantee IP address")
      ->required();
  cmd_share->add_option("--grantee-host", grantee_host, "Grantee hostname")
      ->required();
  cmd_share->add_option("--grantee-user", grantee_user, "Grantee user id")
      ->required();
  cmd_share->add_option("--grantee-quad", grantee_quad,
                        "Grantee quad hash (default: computed)");
  cmd_share->callback([&] {
    dv::Vault vault = open_vault(vault_dir);
    auto non_empty = [](const std::string& s) -> std::optional<std::string> {
      return s.empty() ? std::nullopt : std::optional<std::string>(s);
    };
    dv::HostIdentity grantee = dv::HostIdentity::from_raw(
        non_empty(grantee_mac), non_empty(grantee_ip), non_empty(grantee_host),
        non_empty(grantee_user), non_empty(grantee_quad));
    dv::ShareGrant grant = vault.broker().create_share(
        share_object, dv::HostIdentity::collect(), grantee,
        vault.threat().get_level());
    std::cout << grant.token << "\n";
  });

  // redeem <token> [--spoof ...] [--out FILE]
  std::string redeem_token;
  std::vector<std::string> redeem_spoof;
  std::string redeem_out;
  auto* cmd_redeem = app.add_subcommand("redeem", "Redeem a share token");
  cmd_redeem->add_option("token", redeem_token, "Share token")->required();
  cmd_redeem->add_option("--spoof", redeem_spoof,
                         "Override collected identity fields for testing");
  cmd_redeem->add_option("--out", redeem_out,
                         "Write content to a file instead of stdout");
  cmd_redeem->callback([&] {
    dv::Vault vault = open_vault(vault_dir);
    dv::HostIdentity presented =
        apply_spoof(dv::HostIdentity::collect(), redeem_spoof);
    dv::AccessResult result = vault.broker().redeem_share(
        redeem_token, presented, vault.threat().get_level());
    print_access_result(result, redeem_out);
  });

  // level get | set <1-5> --reason | feed [file]
  auto* cmd_level = app.add_subcommand("level", "Threat level operations");
  cmd_level->require_subcommand(1);
  auto* cmd_level_get = cmd_level->add_subcommand("get", "Print the current level");
  cmd_level_get->callback([&] {
    dv::Vault vault = open_vault(vault_dir);
    std::cout << vault.threat().get_level().value() << "\n";
  });
  int level_value = 5;
  std::string level_reason;
  auto* cmd_level_set = cmd_level->add_subcommand("set", "Set the level");
  cmd_level_set->add_option("value", level_value, "New level (1-5)")->required();
  cmd_level_set->add_option("--reason", level_reason, "Why the level changed")
      ->required();
  cmd_level_set->callback([&] {
    dv::Vault vault = open_vault(vault_dir);
    vault.threat().set_level(dv::InfoconLevel::from_int(level_value), level_reason);
    std::cout << vault.threat().get_level().value() << "\n";
  });
  std::string feed_file;
  auto* cmd_level_feed = cmd_level->add_subcommand("feed", "Ingest a threat feed");
  cmd_level_feed->add_option("file", feed_file,
                             "Feed file (default: configured feed path)");
  cmd_level_feed->callback([&] {
    dv::Vault vault = open_vault(vault_dir);
    std::filesystem::path path =
        feed_file.empty() ? vault.feed_path() : std::filesystem::path(feed_file);
    auto changed = vault.threat().ingest_feed(path);
    if (changed) {
      std::cout << "level changed to " << changed->value() << "\n";
    } else {
      std::cout << "level unchanged (" << vault.threat().get_level().value()
                << ")\n";
    }
  });

  // audit [--kind K] [--object ID] [--page P] [--page-size N]
  std::string audit_kind;
  std::string audit_object;
  std::size_t audit_page = 0;
  std::size_t audit_page_size = 100;
  auto* cmd_audit = app.add_subcommand("audit", "Query the audit log");
  cmd_audit->add_option("--kind", audit_kind,
                        "download|share_create|share_redeem|level_changed|"
                        "feed_warning|upload");
  cmd_audit->add_option("--object", audit_object, "Filter by object id");
  cmd_audit->add_option("--page", audit_page, "Zero-based page");
  cmd_audit->add_option("--page-size", audit_page_size, "Events per page");
  cmd_audit->callback([&] {
    dv::Vault vault = open_vault(vault_dir);
    dv::AuditLog::QueryFilter filter;
    if (!audit_kind.empty()) filter.kind = dv::event_kind_from_name(audit_kind);
    if (!audit_object.empty()) filter.object_id = audit_object;
    for (const dv::AuditEvent& ev :
         vault.audit().query(filter, audit_page, audit_page_size)) {
      std::cout << ev.to_json().dump() << "\n";
    }
  });

  // verify [--prune]
  bool verify_prune = false;
  auto* cmd_verify =
      app.add_subcommand("verify", "Integrity pass over catalog and objects");
  cmd_verify->add_flag("--prune", verify_prune, "Delete unreferenced objects");
  cmd_verify->callback([&] {
    dv::Vault vault = open_vault(vault_dir);
    exit_code = run_verify(vault, verify_prune);
  });

  // serve --bind host:port
  std::string bind_addr = "127.0.0.1:8477";
  auto* cmd_serve = app.add_subcommand("serve", "Run the HTTP gateway");
  cmd_serve->add_option("--bind", bind_addr, "host:port to listen on");
  cmd_serve->callback([&] {
    dv::Vault vault = open_vault(vault_dir);
    auto [host, port] = parse_bind(bind_addr);
    dv::GatewayService gateway(vault);
    g_gateway = &gateway;
    std::signal(SIGINT, handle_shutdown);
    std::signal(SIGTERM, handle_shutdown);
    std::cerr << "listening on " << host << ":" << port << "\n";
    bool ok = gateway.serve(host, port);
    g_gateway = nullptr;
    if (!ok) {
      throw dv::IoError("cannot bind " + bind_addr);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const dv::NotFoundError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::string(e.what()).find("not a vault") != std::string::npos
               ? kExitNoVault
               : kExitError;
  } catch (const dv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return exit_code;
}
