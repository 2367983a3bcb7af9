#include "decoyvault/audit.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "decoyvault/errors.hpp"

namespace decoyvault {

namespace {

constexpr std::array<std::string_view, 6> kKindNames = {
    "download", "share_create", "share_redeem", "level_changed", "feed_warning",
    "upload"};

}  // namespace

std::string_view event_kind_name(EventKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

EventKind event_kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  }
  throw InvalidInputError("unknown event kind: " + std::string(name));
}

std::string_view outcome_name(Outcome outcome) {
  return outcome == Outcome::original_served ? "original_served" : "decoy_served";
}

Outcome outcome_from_name(std::string_view name) {
  if (name == "original_served") return Outcome::original_served;
  if (name == "decoy_served") return Outcome::decoy_served;
  throw InvalidInputError("unknown outcome: " + std::string(name));
}

nlohmann::json AuditEvent::to_json() const {
  nlohmann::json j;
  j["seq"] = seq;
  j["at"] = format_rfc3339(at);
  j["kind"] = std::string(event_kind_name(kind));
  if (object_id) j["object_id"] = *object_id;
  if (presented_identity) j["presented_identity"] = presented_identity->to_json();
  j["required"] = required.to_json();
  j["matched"] = matched.to_json();
  if (outcome) j["outcome"] = std::string(outcome_name(*outcome));
  j["detail"] = detail;
  return j;
}

AuditEvent AuditEvent::from_json(const nlohmann::json& j) {
  AuditEvent ev;
  ev.seq = j.at("seq").get<std::uint64_t>();
  ev.at = parse_rfc3339(j.at("at").get<std::string>());
  ev.kind = event_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("object_id") && !j.at("object_id").is_null()) {
    ev.object_id = j.at("object_id").get<std::string>();
  }
  if (j.contains("presented_identity") && !j.at("presented_identity").is_null()) {
    ev.presented_identity = HostIdentity::from_json(j.at("presented_identity"));
  }
  ev.required = IdentifierSet::from_json(j.at("required"));
  ev.matched = IdentifierSet::from_json(j.at("matched"));
  if (j.contains("outcome") && !j.at("outcome").is_null()) {
    ev.outcome = outcome_from_name(j.at("outcome").get<std::string>());
  }
  ev.detail = j.value("detail", std::string{});
  return ev;
}

AuditLog::AuditLog(std::filesystem::path file) : file_(std::move(file)) {
  // Recover the next seq by scanning what is already there.
  std::ifstream in(file_, std::ios::binary);
  bool missing_final_newline = false;
  if (in.is_open()) {
    std::string line;
    while (std::getline(in, line)) {
      // getline sets eofbit when the last line has no trailing newline.
      bool unterminated = in.eof();
      if (!line.empty()) {
        try {
          auto ev = AuditEvent::from_json(nlohmann::json::parse(line));
          if (ev.seq >= next_seq_) next_seq_ = ev.seq + 1;
        } catch (const std::exception&) {
          if (unterminated) {
            partial_tail_ = true;
          } else {
            ++unparseable_lines_;
          }
        }
      }
      if (unterminated) missing_final_newline = true;
    }
  }
  fd_ = ::open(file_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw IoError("cannot open audit log " + file_.string() + ": " +
                  std::strerror(errno));
  }
  if (missing_final_newline) {
    // Close the unterminated line so the next event starts on its own line.
    if (::write(fd_, "\n", 1) != 1) {
      last_error_ = "audit append failed: " + std::string(std::strerror(errno));
    }
  }
}

AuditLog::~AuditLog() {
  if (fd_ >= 0) ::close(fd_);
}

std::uint64_t AuditLog::record(AuditEvent event) {
  std::lock_guard lock(mutex_);
  event.seq = next_seq_;
  std::string line = event.to_json().dump();
  line.push_back('\n');
  ssize_t n = ::write(fd_, line.data(), line.size());
  if (n != static_cast<ssize_t>(line.size())) {
    last_error_ = "audit append failed: " + std::string(std::strerror(errno));
    return 0;
  }
  // Decoy responses are the exfiltration evidence; make sure they hit disk.
  if (event.outcome == Outcome::decoy_served) {
    ::fsync(fd_);
  }
  return next_seq_++;
}

std::vector<AuditEvent> AuditLog::query(const QueryFilter& filter, std::size_t page,
                                        std::size_t page_size) const {
  std::vector<AuditEvent> out;
  std::ifstream in(file_, std::ios::binary);
  if (!in.is_open()) return out;
  std::size_t skip = page * page_size;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    AuditEvent ev;
    try {
      ev = AuditEvent::from_json(nlohmann::json::parse(line));
    } catch (const std::exception&) {
      continue;  // torn or foreign line
    }
    if (filter.kind && ev.kind != *filter.kind) continue;
    if (filter.object_id && ev.object_id != filter.object_id) continue;
    if (filter.from && ev.at < *filter.from) continue;
    if (filter.to && ev.at > *filter.to) continue;
    if (skip > 0) {
      --skip;
      continue;
    }
    out.push_back(std::move(ev));
    if (out.size() >= page_size) break;
  }
  return out;
}

std::uint64_t AuditLog::last_seq() const {
  std::lock_guard lock(mutex_);
  return next_seq_ - 1;
}

std::optional<std::string> AuditLog::last_error() const {
  std::lock_guard lock(mutex_);
  return last_error_;
}

}  // namespace decoyvault
