#include "decoyvault/threat.hpp"

#include <string>

#include "decoyvault/errors.hpp"
#include "decoyvault/util.hpp"

namespace decoyvault {

InfoconLevel InfoconLevel::from_int(int value) {
  if (value < 1 || value > 5) {
    throw PolicyError("threat level must be in 1..5, got " + std::to_string(value));
  }
  return InfoconLevel(value);
}

IdentifierSet required_identifiers(InfoconLevel level) {
  IdentifierSet set{Identifier::mac};
  if (level.value() <= 4) set.insert(Identifier::ip);
  if (level.value() <= 3) set.insert(Identifier::hostname);
  if (level.value() <= 2) set.insert(Identifier::user_id);
  if (level.value() <= 1) set.insert(Identifier::quad_hash);
  return set;
}

int decoy_count(InfoconLevel level) { return 6 - level.value(); }

ThreatState::ThreatState(std::filesystem::path level_file, AuditLog& audit)
    : level_file_(std::move(level_file)), audit_(audit) {
  try {
    std::string content = trim_ascii(read_file(level_file_));
    if (content.size() != 1 || content[0] < '1' || content[0] > '5') {
      throw InvalidInputError("level file is corrupt: " + level_file_.string());
    }
    level_.store(content[0] - '0', std::memory_order_relaxed);
  } catch (const NotFoundError&) {
    persist(InfoconLevel::from_int(5));
  }
}

InfoconLevel ThreatState::get_level() const {
  return InfoconLevel::from_int(level_.load(std::memory_order_relaxed));
}

bool ThreatState::set_level(InfoconLevel level, std::string_view reason) {
  std::lock_guard lock(write_mutex_);
  InfoconLevel old = get_level();
  if (old == level) return false;
  persist(level);
  level_.store(level.value(), std::memory_order_relaxed);

  AuditEvent ev;
  ev.at = now_utc();
  ev.kind = EventKind::level_changed;
  ev.detail = "level " + std::to_string(old.value()) + " -> " +
              std::to_string(level.value()) + ": " + std::string(reason);
  audit_.record(std::move(ev));
  return true;
}

std::optional<InfoconLevel> ThreatState::ingest_feed(
    const std::filesystem::path& feed_file) {
  std::string content = read_file(feed_file);  // NotFound/IoError propagate
  std::string line = trim_ascii(content.substr(0, content.find('\n')));

  auto warn = [&](const std::string& why) {
    AuditEvent ev;
    ev.at = now_utc();
    ev.kind = EventKind::feed_warning;
    ev.detail = why + " in " + feed_file.string();
    audit_.record(std::move(ev));
  };

  constexpr std::string_view kPrefix = "LEVEL=";
  if (line.size() != kPrefix.size() + 1 || !line.starts_with(kPrefix)) {
    warn("malformed feed line \"" + line + "\"");
    return std::nullopt;
  }
  char digit = line.back();
  if (digit < '1' || digit > '5') {
    warn("feed level out of range \"" + line + "\"");
    return std::nullopt;
  }
  InfoconLevel level = InfoconLevel::from_int(digit - '0');
  if (!set_level(level, "threat feed " + feed_file.string())) {
    return std::nullopt;  // already at this level
  }
  return level;
}

void ThreatState::persist(InfoconLevel level) {
  std::string content(1, static_cast<char>('0' + level.value()));
  content.push_back('\n');
  atomic_write_file(level_file_, content);
}

}  // namespace decoyvault
