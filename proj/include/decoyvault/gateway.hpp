#pragma once

#include <memory>
#include <string>

#include "decoyvault/vault.hpp"

namespace httplib {
class Server;
}

namespace decoyvault {

/// HTTP/1.1 boundary in front of a vault. Clients present their identity via
/// request headers (X-Host-MAC, X-Host-IP, X-Hostname, X-User-Id,
/// X-Quad-Hash); missing headers are treated as absent fields, never as a
/// request error. Verification failure is invisible on the wire: the
/// response is a 200 carrying decoy bytes with the same header shape as a
/// verified download.
///
/// Endpoints:
///   PUT  /objects?name=<n>    body = content, complete identity required
///   GET  /objects/<selector>  -> 200 bytes + X-Object-Name
///   POST /shares              {"object_id":..., "grantee":{...}} -> token
///   GET  /shares/<token>      -> 200 bytes + X-Object-Name
///   GET  /level               -> {"level": n}
///   PUT  /level               {"level":n,"reason":...}, admin bearer token
///   GET  /audit?kind=&object=&page=&page_size=
class GatewayService {
 public:
  explicit GatewayService(Vault& vault);
  ~GatewayService();

  GatewayService(const GatewayService&) = delete;
  GatewayService& operator=(const GatewayService&) = delete;

  /// Blocking; returns false when the address cannot be bound.
  bool serve(const std::string& host, int port);

  /// Test/embedding support: bind an ephemeral port (returned), then run
  /// listen_after_bind() on a thread of the caller's choosing.
  int bind_any(const std::string& host);
  bool listen_after_bind();

  bool is_running() const;

  /// Graceful stop; in-flight requests complete.
  void stop();

 private:
  void configure_routes();

  Vault& vault_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace decoyvault
