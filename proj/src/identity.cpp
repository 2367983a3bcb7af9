#include "decoyvault/identity.hpp"

#include <arpa/inet.h>
#include <ifaddrs.h>
#include <net/if.h>
#include <netinet/in.h>
#include <netpacket/packet.h>
#include <pwd.h>
#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "decoyvault/errors.hpp"
#include "decoyvault/util.hpp"

namespace decoyvault {

namespace {

constexpr std::array<std::string_view, kIdentifierCount> kIdentifierNames = {
    "mac", "ip", "hostname", "user_id", "quad_hash"};

bool is_hex_digit(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

std::string strip_reserved(std::string s) {
  std::erase(s, '|');  // '|' is the quad-hash separator and may not appear
  return s;
}

}  // namespace

std::string_view identifier_name(Identifier id) {
  return kIdentifierNames[static_cast<std::size_t>(id)];
}

Identifier identifier_from_name(std::string_view name) {
  for (Identifier id : kAllIdentifiers) {
    if (identifier_name(id) == name) return id;
  }
  throw InvalidInputError("unknown identifier name: " + std::string(name));
}

std::vector<std::string> IdentifierSet::names() const {
  std::vector<std::string> out;
  for (Identifier id : kAllIdentifiers) {
    if (contains(id)) out.emplace_back(identifier_name(id));
  }
  return out;
}

IdentifierSet IdentifierSet::from_names(const std::vector<std::string>& names) {
  IdentifierSet set;
  for (const std::string& name : names) set.insert(identifier_from_name(name));
  return set;
}

nlohmann::json IdentifierSet::to_json() const { return names(); }

IdentifierSet IdentifierSet::from_json(const nlohmann::json& j) {
  return from_names(j.get<std::vector<std::string>>());
}

bool HostIdentity::complete() const {
  return mac.has_value() && ip.has_value() && hostname.has_value() &&
         user_id.has_value();
}

const std::optional<std::string>& HostIdentity::field(Identifier id) const {
  switch (id) {
    case Identifier::mac: return mac;
    case Identifier::ip: return ip;
    case Identifier::hostname: return hostname;
    case Identifier::user_id: return user_id;
    case Identifier::quad_hash: return quad_hash;
  }
  throw InvalidInputError("invalid identifier");
}

std::optional<std::string>& HostIdentity::field(Identifier id) {
  return const_cast<std::optional<std::string>&>(
      static_cast<const HostIdentity*>(this)->field(id));
}

std::string HostIdentity::canonical_concat() const {
  std::string out;
  out += mac.value_or("");
  out += '|';
  out += ip.value_or("");
  out += '|';
  out += hostname.value_or("");
  out += '|';
  out += user_id.value_or("");
  return out;
}

HostIdentity HostIdentity::with_computed_hash() const {
  HostIdentity copy = *this;
  if (complete()) {
    copy.quad_hash = compute_quad_hash(*mac, *ip, *hostname, *user_id);
  }
  return copy;
}

std::optional<std::string> canonicalize_field_or_raw(Identifier id,
                                                     std::string_view raw) {
  try {
    return canonicalize_field(id, raw);
  } catch (const InvalidInputError&) {
    std::string fallback = strip_reserved(to_lower_ascii(trim_ascii(raw)));
    if (fallback.empty()) return std::nullopt;
    return fallback;
  }
}

namespace {

std::optional<std::string> canonicalize_or_raw(Identifier id,
                                               std::optional<std::string> raw) {
  if (!raw.has_value()) return std::nullopt;
  return canonicalize_field_or_raw(id, *raw);
}

}  // namespace

HostIdentity HostIdentity::from_raw(std::optional<std::string> mac,
                                    std::optional<std::string> ip,
                                    std::optional<std::string> hostname,
                                    std::optional<std::string> user_id,
                                    std::optional<std::string> quad_hash) {
  HostIdentity out;
  out.mac = canonicalize_or_raw(Identifier::mac, std::move(mac));
  out.ip = canonicalize_or_raw(Identifier::ip, std::move(ip));
  out.hostname = canonicalize_or_raw(Identifier::hostname, std::move(hostname));
  out.user_id = canonicalize_or_raw(Identifier::user_id, std::move(user_id));
  out.quad_hash = canonicalize_or_raw(Identifier::quad_hash, std::move(quad_hash));
  return out;
}

nlohmann::json HostIdentity::to_json() const {
  nlohmann::json j;
  for (Identifier id : kAllIdentifiers) {
    const auto& value = field(id);
    j[std::string(identifier_name(id))] =
        value.has_value() ? nlohmann::json(*value) : nlohmann::json(nullptr);
  }
  return j;
}

HostIdentity HostIdentity::from_json(const nlohmann::json& j) {
  HostIdentity out;
  for (Identifier id : kAllIdentifiers) {
    std::string key(identifier_name(id));
    if (j.contains(key) && !j.at(key).is_null()) {
      out.field(id) = j.at(key).get<std::string>();
    }
  }
  return out;
}

std::string canonicalize_mac(std::string_view raw) {
  std::string hex;
  for (char c : trim_ascii(raw)) {
    if (c == ':' || c == '-' || c == '.') continue;
    if (!is_hex_digit(c)) {
      throw InvalidInputError("invalid MAC address");
    }
    hex.push_back(c);
  }
  if (hex.size() != 12) {
    throw InvalidInputError("invalid MAC address");
  }
  std::string out = to_lower_ascii(hex);
  std::string formatted;
  for (std::size_t i = 0; i < 12; i += 2) {
    if (!formatted.empty()) formatted.push_back(':');
    formatted += out.substr(i, 2);
  }
  return formatted;
}

std::string canonicalize_ip(std::string_view raw) {
  std::string trimmed = trim_ascii(raw);
  unsigned char buf4[4];
  if (inet_pton(AF_INET, trimmed.c_str(), buf4) == 1) {
    char out[INET_ADDRSTRLEN];
    inet_ntop(AF_INET, buf4, out, sizeof(out));
    return out;
  }
  unsigned char buf16[16];
  if (inet_pton(AF_INET6, trimmed.c_str(), buf16) == 1) {
    char out[INET6_ADDRSTRLEN];
    inet_ntop(AF_INET6, buf16, out, sizeof(out));
    return to_lower_ascii(out);
  }
  throw InvalidInputError("invalid IP address");
}

std::string canonicalize_hostname(std::string_view raw) {
  std::string out = strip_reserved(to_lower_ascii(trim_ascii(raw)));
  if (out.empty()) {
    throw InvalidInputError("empty hostname");
  }
  return out;
}

std::string canonicalize_user(std::string_view raw) {
  std::string out = strip_reserved(to_lower_ascii(trim_ascii(raw)));
  if (out.empty()) {
    throw InvalidInputError("empty user id");
  }
  return out;
}

std::string canonicalize_field(Identifier id, std::string_view raw) {
  switch (id) {
    case Identifier::mac: return canonicalize_mac(raw);
    case Identifier::ip: return canonicalize_ip(raw);
    case Identifier::hostname: return canonicalize_hostname(raw);
    case Identifier::user_id: return canonicalize_user(raw);
    case Identifier::quad_hash: {
      std::string out = to_lower_ascii(trim_ascii(raw));
      if (out.size() != 64) {
        throw InvalidInputError("quad hash must be 64 hex characters");
      }
      for (char c : out) {
        if (!is_hex_digit(c)) throw InvalidInputError("quad hash must be hex");
      }
      return out;
    }
  }
  throw InvalidInputError("invalid identifier");
}

std::string compute_quad_hash(std::string_view mac, std::string_view ip,
                              std::string_view hostname, std::string_view user_id) {
  if (mac.empty() || ip.empty() || hostname.empty() || user_id.empty()) {
    throw InvalidInputError("quad hash requires all four identifiers");
  }
  std::string input;
  input.reserve(mac.size() + ip.size() + hostname.size() + user_id.size() + 3);
  input += mac;
  input += '|';
  input += ip;
  input += '|';
  input += hostname;
  input += '|';
  input += user_id;
  auto digest = sha256(input);
  return to_hex(digest);
}

namespace {

// Interface carrying the default route, per /proc/net/route (destination 0).
std::optional<std::string> default_route_interface() {
  std::ifstream route("/proc/net/route");
  if (!route.is_open()) return std::nullopt;
  std::string line;
  std::getline(route, line);  // header
  while (std::getline(route, line)) {
    std::istringstream fields(line);
    std::string iface, dest;
    if (fields >> iface >> dest && dest == "00000000") {
      return iface;
    }
  }
  return std::nullopt;
}

struct InterfaceInfo {
  std::optional<std::string> mac;
  std::optional<std::string> ipv4;
  std::optional<std::string> ipv6;
  bool up = false;
  bool loopback = false;
};

std::map<std::string, InterfaceInfo> enumerate_interfaces() {
  std::map<std::string, InterfaceInfo> out;
  ifaddrs* addrs = nullptr;
  if (getifaddrs(&addrs) != 0) return out;
  for (ifaddrs* cur = addrs; cur != nullptr; cur = cur->ifa_next) {
    if (cur->ifa_name == nullptr) continue;
    InterfaceInfo& info = out[cur->ifa_name];
    info.up = (cur->ifa_flags & IFF_UP) != 0;
    info.loopback = (cur->ifa_flags & IFF_LOOPBACK) != 0;
    if (cur->ifa_addr == nullptr) continue;
    if (cur->ifa_addr->sa_family == AF_PACKET) {
      auto* ll = reinterpret_cast<sockaddr_ll*>(cur->ifa_addr);
      if (ll->sll_halen == 6) {
        char buf[18];
        std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x",
                      ll->sll_addr[0], ll->sll_addr[1], ll->sll_addr[2],
                      ll->sll_addr[3], ll->sll_addr[4], ll->sll_addr[5]);
        info.mac = buf;
      }
    } else if (cur->ifa_addr->sa_family == AF_INET) {
      auto* in = reinterpret_cast<sockaddr_in*>(cur->ifa_addr);
      char buf[INET_ADDRSTRLEN];
      if (inet_ntop(AF_INET, &in->sin_addr, buf, sizeof(buf))) info.ipv4 = buf;
    } else if (cur->ifa_addr->sa_family == AF_INET6) {
      auto* in6 = reinterpret_cast<sockaddr_in6*>(cur->ifa_addr);
      char buf[INET6_ADDRSTRLEN];
      if (inet_ntop(AF_INET6, &in6->sin6_addr, buf, sizeof(buf))) info.ipv6 = buf;
    }
  }
  freeifaddrs(addrs);
  return out;
}

std::optional<std::string> current_user_name() {
  passwd pwd{};
  passwd* result = nullptr;
  char buf[4096];
  if (getpwuid_r(geteuid(), &pwd, buf, sizeof(buf), &result) == 0 &&
      result != nullptr && result->pw_name != nullptr && *result->pw_name != '\0') {
    return std::string(result->pw_name);
  }
  for (const char* var : {"USER", "LOGNAME"}) {
    const char* value = std::getenv(var);
    if (value != nullptr && *value != '\0') return std::string(value);
  }
  return std::nullopt;
}

}  // namespace

HostIdentity HostIdentity::collect() {
  HostIdentity out;

  auto interfaces = enumerate_interfaces();
  std::string chosen;
  if (auto preferred = default_route_interface();
      preferred && interfaces.contains(*preferred)) {
    chosen = *preferred;
  } else {
    for (const auto& [name, info] : interfaces) {
      if (info.up && !info.loopback && info.ipv4.has_value()) {
        chosen = name;
        break;
      }
    }
    if (chosen.empty() && interfaces.contains("lo")) chosen = "lo";
  }
  if (!chosen.empty()) {
    const InterfaceInfo& info = interfaces[chosen];
    if (info.mac) {
      try {
        out.mac = canonicalize_mac(*info.mac);
      } catch (const InvalidInputError&) {
      }
    }
    const std::optional<std::string>& addr = info.ipv4 ? info.ipv4 : info.ipv6;
    if (addr) {
      try {
        out.ip = canonicalize_ip(*addr);
      } catch (const InvalidInputError&) {
      }
    }
  }

  char hostbuf[256] = {0};
  if (gethostname(hostbuf, sizeof(hostbuf) - 1) == 0 && hostbuf[0] != '\0') {
    try {
      out.hostname = canonicalize_hostname(hostbuf);
    } catch (const InvalidInputError&) {
    }
  }

  if (auto user = current_user_name()) {
    try {
      out.user_id = canonicalize_user(*user);
    } catch (const InvalidInputError&) {
    }
  }

  return out.with_computed_hash();
}

MatchResult match(const HostIdentity& embedded, const HostIdentity& presented,
                  IdentifierSet required) {
  MatchResult result;
  result.required = required;
  for (Identifier id : kAllIdentifiers) {
    const auto& left = embedded.field(id);
    const auto& right = presented.field(id);
    FieldMatch state;
    if (!left.has_value() || !right.has_value()) {
      state = FieldMatch::absent;
    } else if (*left == *right) {
      state = FieldMatch::matched;
      result.matched_fields.insert(id);
    } else {
      state = FieldMatch::mismatched;
    }
    result.fields[static_cast<std::size_t>(id)] = state;
  }
  result.overall = required.subset_of(result.matched_fields);
  return result;
}

}  // namespace decoyvault
