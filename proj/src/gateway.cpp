#include "decoyvault/gateway.hpp"

#include <httplib.h>

#include <json.hpp>

#include "decoyvault/errors.hpp"

namespace decoyvault {

namespace {

std::optional<std::string> header_or_absent(const httplib::Request& req,
                                            const std::string& name) {
  if (!req.has_header(name)) return std::nullopt;
  std::string value = req.get_header_value(name);
  if (value.empty()) return std::nullopt;
  return value;
}

HostIdentity identity_from_headers(const httplib::Request& req) {
  return HostIdentity::from_raw(header_or_absent(req, "X-Host-MAC"),
                                header_or_absent(req, "X-Host-IP"),
                                header_or_absent(req, "X-Hostname"),
                                header_or_absent(req, "X-User-Id"),
                                header_or_absent(req, "X-Quad-Hash"));
}

HostIdentity identity_from_json(const nlohmann::json& j) {
  auto field = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
  };
  return HostIdentity::from_raw(field("mac"), field("ip"), field("hostname"),
                                field("user_id"), field("quad_hash"));
}

void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply_json(res, status, nlohmann::json{{"error", message}});
}

/// Both verdicts leave the wire through here, so original and decoy
/// responses are byte-shape identical apart from the payload itself.
void reply_content(httplib::Response& res, const AccessResult& result) {
  res.status = 200;
  res.set_header("X-Object-Name", result.name);
  res.set_content(result.content, "application/octet-stream");
}

}  // namespace

GatewayService::GatewayService(Vault& vault)
    : vault_(vault), server_(std::make_unique<httplib::Server>()) {
  configure_routes();
}

GatewayService::~GatewayService() { stop(); }

void GatewayService::configure_routes() {
  httplib::Server& s = *server_;

  s.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                             std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    reply_error(res, 500, message);
  });

  s.Put("/objects", [this](const httplib::Request& req, httplib::Response& res) {
    const InfoconLevel level = vault_.threat().get_level();
    std::string name = req.get_param_value("name");
    if (name.empty()) {
      reply_error(res, 400, "missing name parameter");
      return;
    }
    try {
      ObjectRecord record = vault_.broker().upload(name, req.body,
                                                   identity_from_headers(req), level);
      reply_json(res, 201, {{"object_id", record.object_id}});
    } catch (const PolicyError& e) {
      reply_error(res, 400, e.what());
    } catch (const InvalidInputError& e) {
      reply_error(res, 400, e.what());
    }
  });

  s.Get(R"(/objects/(.+))", [this](const httplib::Request& req,
                                   httplib::Response& res) {
    const InfoconLevel level = vault_.threat().get_level();
    try {
      AccessResult result = vault_.broker().request_download(
          req.matches[1].str(), identity_from_headers(req), level);
      reply_content(res, result);
    } catch (const NotFoundError&) {
      reply_error(res, 404, "not found");
    }
  });

  s.Post("/shares", [this](const httplib::Request& req, httplib::Response& res) {
    const InfoconLevel level = vault_.threat().get_level();
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception&) {
      reply_error(res, 400, "malformed JSON body");
      return;
    }
    if (!body.contains("object_id") || !body.contains("grantee") ||
        !body.at("grantee").is_object()) {
      reply_error(res, 400, "body requires object_id and grantee");
      return;
    }
    try {
      ShareGrant grant = vault_.broker().create_share(
          body.at("object_id").get<std::string>(), identity_from_headers(req),
          identity_from_json(body.at("grantee")), level);
      reply_json(res, 201, {{"token", grant.token}});
    } catch (const NotFoundError&) {
      reply_error(res, 404, "not found");
    } catch (const nlohmann::json::exception&) {
      reply_error(res, 400, "malformed grantee");
    }
  });

  s.Get(R"(/shares/([0-9a-f]+))", [this](const httplib::Request& req,
                                         httplib::Response& res) {
    const InfoconLevel level = vault_.threat().get_level();
    try {
      AccessResult result = vault_.broker().redeem_share(
          req.matches[1].str(), identity_from_headers(req), level);
      reply_content(res, result);
    } catch (const NotFoundError&) {
      reply_error(res, 404, "not found");
    }
  });

  s.Get("/level", [this](const httplib::Request&, httplib::Response& res) {
    reply_json(res, 200, {{"level", vault_.threat().get_level().value()}});
  });

  s.Put("/level", [this](const httplib::Request& req, httplib::Response& res) {
    std::string expected = "Bearer " + vault_.config().admin_token;
    if (req.get_header_value("Authorization") != expected) {
      reply_error(res, 401, "admin token required");
      return;
    }
    try {
      auto body = nlohmann::json::parse(req.body);
      InfoconLevel level = InfoconLevel::from_int(body.at("level").get<int>());
      vault_.threat().set_level(level, body.value("reason", std::string{"api"}));
      res.status = 204;
    } catch (const PolicyError& e) {
      reply_error(res, 400, e.what());
    } catch (const nlohmann::json::exception&) {
      reply_error(res, 400, "body requires integer level and optional reason");
    }
  });

  s.Get("/audit", [this](const httplib::Request& req, httplib::Response& res) {
    AuditLog::QueryFilter filter;
    try {
      if (req.has_param("kind")) {
        filter.kind = event_kind_from_name(req.get_param_value("kind"));
      }
    } catch (const InvalidInputError& e) {
      reply_error(res, 400, e.what());
      return;
    }
    if (req.has_param("object")) filter.object_id = req.get_param_value("object");
    std::size_t page = 0;
    std::size_t page_size = 100;
    try {
      if (req.has_param("page")) page = std::stoul(req.get_param_value("page"));
      if (req.has_param("page_size")) {
        page_size = std::stoul(req.get_param_value("page_size"));
      }
    } catch (const std::exception&) {
      reply_error(res, 400, "page and page_size must be integers");
      return;
    }
    nlohmann::json events = nlohmann::json::array();
    for (const AuditEvent& ev : vault_.audit().query(filter, page, page_size)) {
      events.push_back(ev.to_json());
    }
    reply_json(res, 200, events);
  });
}

bool GatewayService::serve(const std::string& host, int port) {
  return server_->listen(host, port);
}

int GatewayService::bind_any(const std::string& host) {
  return server_->bind_to_any_port(host);
}

bool GatewayService::listen_after_bind() { return server_->listen_after_bind(); }

bool GatewayService::is_running() const { return server_->is_running(); }

void GatewayService::stop() {
  if (server_) server_->stop();
}

}  // namespace decoyvault
