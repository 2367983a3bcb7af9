// Python bindings for the vault core: the digit cipher, the scanner, decoy
// generation, host identity, the threat policy, and whole-vault operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "decoyvault/broker.hpp"
#include "decoyvault/decoy.hpp"
#include "decoyvault/errors.hpp"
#include "decoyvault/fpe.hpp"
#include "decoyvault/identity.hpp"
#include "decoyvault/scanner.hpp"
#include "decoyvault/threat.hpp"
#include "decoyvault/vault.hpp"

namespace py = pybind11;
using namespace decoyvault;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null: return py::none();
    case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) {
        out[py::str(key)] = json_to_py(value);
      }
      return out;
    }
    default: return py::none();
  }
}

HostIdentity identity_from_py(const py::object& obj) {
  if (obj.is_none()) return HostIdentity::collect();
  py::dict d = obj.cast<py::dict>();
  auto field = [&](const char* key) -> std::optional<std::string> {
    if (!d.contains(key) || d[key].is_none()) return std::nullopt;
    return d[key].cast<std::string>();
  };
  return HostIdentity::from_raw(field("mac"), field("ip"), field("hostname"),
                                field("user_id"), field("quad_hash"));
}

py::dict identity_to_py(const HostIdentity& id) {
  return json_to_py(id.to_json()).cast<py::dict>();
}

py::dict verdict_to_py(const AccessVerdict& verdict) {
  py::dict out;
  out["outcome"] = std::string(outcome_name(verdict.outcome));
  out["matched_fields"] = verdict.matched_fields.names();
  out["required_fields"] = verdict.required_fields.names();
  out["decoy_index_served"] =
      verdict.decoy_index_served ? py::object(py::int_(*verdict.decoy_index_served))
                                 : py::object(py::none());
  out["object_id"] = verdict.object_id;
  out["at"] = format_rfc3339(verdict.at);
  return out;
}

py::dict record_to_py(const ObjectRecord& record) {
  return json_to_py(record.to_json()).cast<py::dict>();
}

py::tuple access_result_to_py(const AccessResult& result) {
  return py::make_tuple(py::bytes(result.content), result.name,
                        verdict_to_py(result.verdict));
}

fpe::Tweak make_tweak(const std::string& object_id, std::uint64_t decoy_index,
                      std::uint64_t run_index) {
  return fpe::Tweak{object_id, decoy_index, run_index};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deception-based object vault: decoy replicas with "
            "format-preserving anonymization, host-identity verification and "
            "threat-level driven policy.";

  py::register_exception<NotFoundError>(m, "NotFoundError");
  py::register_exception<DuplicateError>(m, "DuplicateError");
  py::register_exception<PolicyError>(m, "PolicyError");
  py::register_exception<InvalidInputError>(m, "InvalidInputError");

  // Digit cipher.
  m.def(
      "encrypt_digits",
      [](const std::string& key_hex, const std::string& object_id,
         std::uint64_t decoy_index, std::uint64_t run_index,
         const std::string& digits) {
        return fpe::encrypt_digits(fpe::FpeKey::from_hex(key_hex),
                                   make_tweak(object_id, decoy_index, run_index),
                                   digits);
      },
      py::arg("key_hex"), py::arg("object_id"), py::arg("decoy_index"),
      py::arg("run_index"), py::arg("digits"),
      "Length-preserving keyed encryption of a decimal digit string.");
  m.def(
      "decrypt_digits",
      [](const std::string& key_hex, const std::string& object_id,
         std::uint64_t decoy_index, std::uint64_t run_index,
         const std::string& digits) {
        return fpe::decrypt_digits(fpe::FpeKey::from_hex(key_hex),
                                   make_tweak(object_id, decoy_index, run_index),
                                   digits);
      },
      py::arg("key_hex"), py::arg("object_id"), py::arg("decoy_index"),
      py::arg("run_index"), py::arg("digits"));
  m.def("random_key_hex", [] { return fpe::FpeKey::random().to_hex(); });

  // Scanner.
  m.def(
      "scan",
      [](const py::bytes& content) {
        py::list out;
        for (const auto& run : scanner::scan(std::string(content))) {
          py::dict d;
          d["start"] = run.start;
          d["length"] = run.length;
          d["digits"] = run.digits;
          out.append(d);
        }
        return out;
      },
      py::arg("content"),
      "Locate the sensitive digit runs decoy generation would rewrite.");
  m.def(
      "is_sensitive_token",
      [](const std::string& token) { return scanner::classify(token); },
      py::arg("token"));

  // Decoy generation.
  m.def(
      "generate_decoy",
      [](const py::bytes& original, const std::string& key_hex,
         const std::string& object_id, std::uint64_t decoy_index) {
        return py::bytes(decoy::generate_decoy(std::string(original),
                                               fpe::FpeKey::from_hex(key_hex),
                                               object_id, decoy_index));
      },
      py::arg("original"), py::arg("key_hex"), py::arg("object_id"),
      py::arg("decoy_index"));
  m.def("derive_decoy_name", &decoy::derive_decoy_name, py::arg("original_name"),
        py::arg("decoy_index"));

  // Host identity.
  m.def("collect_host_identity",
        [] { return identity_to_py(HostIdentity::collect()); });
  m.def("compute_quad_hash", &compute_quad_hash, py::arg("mac"), py::arg("ip"),
        py::arg("hostname"), py::arg("user_id"));

  // Threat policy.
  m.def(
      "required_identifiers",
      [](int level) {
        return required_identifiers(InfoconLevel::from_int(level)).names();
      },
      py::arg("level"));
  m.def(
      "decoy_count",
      [](int level) { return decoy_count(InfoconLevel::from_int(level)); },
      py::arg("level"));

  py::class_<Vault>(m, "Vault")
      .def_static(
          "init", [](const std::string& root) { return Vault::init(root); },
          py::arg("root"), "Create a fresh vault directory layout.")
      .def_static(
          "open", [](const std::string& root) { return Vault::open(root); },
          py::arg("root"))
      .def_property_readonly(
          "root", [](Vault& v) { return v.root().string(); })
      .def(
          "upload",
          [](Vault& v, const std::string& name, const py::bytes& content,
             const py::object& identity) {
            return record_to_py(v.broker().upload(name, std::string(content),
                                                  identity_from_py(identity),
                                                  v.threat().get_level()));
          },
          py::arg("name"), py::arg("content"), py::arg("identity") = py::none(),
          "Store a file plus its decoys; identity defaults to this host's.")
      .def(
          "download",
          [](Vault& v, const std::string& selector, const py::object& identity) {
            return access_result_to_py(v.broker().request_download(
                selector, identity_from_py(identity), v.threat().get_level()));
          },
          py::arg("selector"), py::arg("identity") = py::none(),
          "Returns (content, name, verdict); a failed verification silently "
          "yields decoy bytes.")
      .def(
          "create_share",
          [](Vault& v, const std::string& object_id, const py::object& grantee,
             const py::object& identity) {
            return v.broker()
                .create_share(object_id, identity_from_py(identity),
                              identity_from_py(grantee), v.threat().get_level())
                .token;
          },
          py::arg("object_id"), py::arg("grantee"),
          py::arg("identity") = py::none())
      .def(
          "redeem_share",
          [](Vault& v, const std::string& token, const py::object& identity) {
            return access_result_to_py(v.broker().redeem_share(
                token, identity_from_py(identity), v.threat().get_level()));
          },
          py::arg("token"), py::arg("identity") = py::none())
      .def("get_level", [](Vault& v) { return v.threat().get_level().value(); })
      .def(
          "set_level",
          [](Vault& v, int level, const std::string& reason) {
            return v.threat().set_level(InfoconLevel::from_int(level), reason);
          },
          py::arg("level"), py::arg("reason"))
      .def(
          "ingest_feed",
          [](Vault& v, const py::object& path) -> py::object {
            std::filesystem::path feed =
                path.is_none() ? v.feed_path()
                               : std::filesystem::path(path.cast<std::string>());
            auto changed = v.threat().ingest_feed(feed);
            if (!changed) return py::none();
            return py::int_(changed->value());
          },
          py::arg("path") = py::none())
      .def(
          "audit",
          [](Vault& v, const py::object& kind, const py::object& object_id,
             std::size_t page, std::size_t page_size) {
            AuditLog::QueryFilter filter;
            if (!kind.is_none()) {
              filter.kind = event_kind_from_name(kind.cast<std::string>());
            }
            if (!object_id.is_none()) {
              filter.object_id = object_id.cast<std::string>();
            }
            py::list out;
            for (const AuditEvent& ev : v.audit().query(filter, page, page_size)) {
              out.append(json_to_py(ev.to_json()));
            }
            return out;
          },
          py::arg("kind") = py::none(), py::arg("object_id") = py::none(),
          py::arg("page") = 0, py::arg("page_size") = 100)
      .def(
          "verify",
          [](Vault& v, bool prune) {
            VerifyReport report = v.verify(prune);
            py::dict out;
            out["records_checked"] = report.records_checked;
            out["objects_checked"] = report.objects_checked;
            out["missing"] = report.missing;
            out["orphans"] = report.orphans;
            out["orphans_pruned"] = report.orphans_pruned;
            out["fpe_ok"] = report.fpe_ok;
            out["audit_unparseable_lines"] = report.audit_unparseable_lines;
            out["clean"] = report.clean();
            return out;
          },
          py::arg("prune") = false);
}
