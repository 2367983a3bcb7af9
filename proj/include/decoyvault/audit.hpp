#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "decoyvault/identity.hpp"
#include "decoyvault/util.hpp"

namespace decoyvault {

enum class EventKind : std::uint8_t {
  download,
  share_create,
  share_redeem,
  level_changed,
  feed_warning,
  upload,
};

std::string_view event_kind_name(EventKind kind);
EventKind event_kind_from_name(std::string_view name);

enum class Outcome : std::uint8_t { original_served, decoy_served };

std::string_view outcome_name(Outcome outcome);
Outcome outcome_from_name(std::string_view name);

struct AuditEvent {
  std::uint64_t seq = 0;  // assigned by the log
  TimePoint at{};
  EventKind kind = EventKind::download;
  std::optional<std::string> object_id;
  std::optional<HostIdentity> presented_identity;
  IdentifierSet required;
  IdentifierSet matched;
  std::optional<Outcome> outcome;
  std::string detail;

  nlohmann::json to_json() const;
  static AuditEvent from_json(const nlohmann::json& j);
};

/// Append-only event log: one JSON object per line, seq strictly increasing
/// with no gaps. Each event is appended with a single write() on an O_APPEND
/// descriptor, so a killed process never leaves a torn line behind; events
/// that report a served decoy are additionally fsync'd.
///
/// Single appender per vault; any number of readers may tail the file.
class AuditLog {
 public:
  explicit AuditLog(std::filesystem::path file);

  /// Assigns the next seq and appends. Logging failures do not abort the
  /// calling operation: the event is dropped, 0 is returned, and the error
  /// is kept for operator status.
  std::uint64_t record(AuditEvent event);

  struct QueryFilter {
    std::optional<EventKind> kind;
    std::optional<std::string> object_id;
    std::optional<TimePoint> from;
    std::optional<TimePoint> to;
  };

  /// Matching events in seq order. Pages are zero-based.
  std::vector<AuditEvent> query(const QueryFilter& filter, std::size_t page = 0,
                                std::size_t page_size = 100) const;

  std::uint64_t last_seq() const;

  /// True when opening found a partial (torn) trailing line; the partial
  /// line stays in place and is skipped by readers.
  bool had_partial_tail() const { return partial_tail_; }

  /// Lines that failed to parse at open time, excluding a partial tail.
  std::uint64_t unparseable_lines() const { return unparseable_lines_; }

  std::optional<std::string> last_error() const;

 private:
  std::filesystem::path file_;
  mutable std::mutex mutex_;
  int fd_ = -1;
  std::uint64_t next_seq_ = 1;
  bool partial_tail_ = false;
  std::uint64_t unparseable_lines_ = 0;
  std::optional<std::string> last_error_;

 public:
  ~AuditLog();
  AuditLog(const AuditLog&) = delete;
  AuditLog& operator=(const AuditLog&) = delete;
};

}  // namespace decoyvault
