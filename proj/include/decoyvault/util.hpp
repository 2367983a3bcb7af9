#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace decoyvault {

using TimePoint =
    std::chrono::time_point<std::chrono::system_clock, std::chrono::microseconds>;

/// Current UTC time, strictly increasing within the process so that
/// records created back to back never share a timestamp.
TimePoint now_utc();

/// "2026-08-11T12:34:56.123456Z"
std::string format_rfc3339(TimePoint t);

/// Accepts RFC 3339 UTC timestamps with or without fractional seconds.
TimePoint parse_rfc3339(std::string_view s);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

/// nbytes of CSPRNG output, rendered as 2*nbytes lowercase hex chars.
std::string random_hex(std::size_t nbytes);

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data);
std::array<std::uint8_t, 32> sha256(std::string_view data);
std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> message);

/// Whole-file read. Missing file -> NotFoundError, other failures -> IoError.
std::string read_file(const std::filesystem::path& path);

/// Write-to-temp-then-rename with fsync of both file and directory, so a
/// crash leaves either the old content or the new, never a torn file.
void atomic_write_file(const std::filesystem::path& path, std::string_view content,
                       int mode = 0644);

std::string trim_ascii(std::string_view s);
std::string to_lower_ascii(std::string_view s);

}  // namespace decoyvault
