#include "decoyvault/util.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <openssl/rand.h>
#include <sys/stat.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <ctime>

#include "decoyvault/errors.hpp"

namespace decoyvault {

TimePoint now_utc() {
  static std::atomic<std::int64_t> last_us{0};
  auto now = std::chrono::time_point_cast<std::chrono::microseconds>(
      std::chrono::system_clock::now());
  std::int64_t us = now.time_since_epoch().count();
  std::int64_t prev = last_us.load(std::memory_order_relaxed);
  while (true) {
    std::int64_t next = us > prev ? us : prev + 1;
    if (last_us.compare_exchange_weak(prev, next, std::memory_order_relaxed)) {
      return TimePoint{std::chrono::microseconds{next}};
    }
  }
}

std::string format_rfc3339(TimePoint t) {
  std::int64_t us_total = t.time_since_epoch().count();
  std::time_t secs = static_cast<std::time_t>(us_total / 1000000);
  long micros = static_cast<long>(us_total % 1000000);
  if (micros < 0) {
    micros += 1000000;
    secs -= 1;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%06ldZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min,
                tm.tm_sec, micros);
  return buf;
}

TimePoint parse_rfc3339(std::string_view s) {
  std::tm tm{};
  long micros = 0;
  char frac[8] = {0};
  std::string str(s);
  int n = std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%6[0-9]Z", &tm.tm_year,
                      &tm.tm_mon, &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec,
                      frac);
  if (n < 6) {
    throw InvalidInputError("invalid RFC 3339 timestamp: " + str);
  }
  if (n == 7) {
    // Right-pad the fraction to microseconds ("123" -> 123000).
    char padded[7] = "000000";
    std::memcpy(padded, frac, std::strlen(frac));
    micros = std::strtol(padded, nullptr, 10);
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  std::time_t secs = timegm(&tm);
  if (secs == static_cast<std::time_t>(-1)) {
    throw InvalidInputError("unrepresentable timestamp: " + str);
  }
  return TimePoint{std::chrono::microseconds{
      static_cast<std::int64_t>(secs) * 1000000 + micros}};
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

namespace {

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw InvalidInputError("hex string has odd length");
  }
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_nibble(hex[i]);
    int lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw InvalidInputError("invalid hex character");
    }
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

std::string random_hex(std::size_t nbytes) {
  std::vector<std::uint8_t> buf(nbytes);
  if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) {
    throw IoError("system random generator failed");
  }
  return to_hex(buf);
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) !=
          1 ||
      len != out.size()) {
    throw IoError("SHA-256 computation failed");
  }
  return out;
}

std::array<std::uint8_t, 32> sha256(std::string_view data) {
  return sha256(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::array<std::uint8_t, 32> hmac_sha256(std::span<const std::uint8_t> key,
                                         std::span<const std::uint8_t> message) {
  // HMAC per RFC 2104 over the one-shot digest primitive. Keys here are
  // always 32 bytes, well under the 64-byte SHA-256 block size.
  constexpr std::size_t kBlock = 64;
  std::array<std::uint8_t, kBlock> k{};
  if (key.size() > kBlock) {
    auto digest = sha256(key);
    std::memcpy(k.data(), digest.data(), digest.size());
  } else {
    std::memcpy(k.data(), key.data(), key.size());
  }
  std::vector<std::uint8_t> inner;
  inner.reserve(kBlock + message.size());
  for (std::size_t i = 0; i < kBlock; ++i) inner.push_back(k[i] ^ 0x36);
  inner.insert(inner.end(), message.begin(), message.end());
  auto inner_digest = sha256(inner);

  std::vector<std::uint8_t> outer;
  outer.reserve(kBlock + inner_digest.size());
  for (std::size_t i = 0; i < kBlock; ++i) outer.push_back(k[i] ^ 0x5c);
  outer.insert(outer.end(), inner_digest.begin(), inner_digest.end());
  return sha256(outer);
}

std::string read_file(const std::filesystem::path& path) {
  int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) {
    if (errno == ENOENT) {
      throw NotFoundError("no such file: " + path.string());
    }
    throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  std::string out;
  char buf[65536];
  ssize_t n;
  while ((n = ::read(fd, buf, sizeof(buf))) > 0) {
    out.append(buf, static_cast<std::size_t>(n));
  }
  int saved = errno;
  ::close(fd);
  if (n < 0) {
    throw IoError("read failed for " + path.string() + ": " + std::strerror(saved));
  }
  return out;
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content,
                       int mode) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + random_hex(4);
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, mode);
  if (fd < 0) {
    throw IoError("cannot create " + tmp.string() + ": " + std::strerror(errno));
  }
  std::size_t off = 0;
  while (off < content.size()) {
    ssize_t n = ::write(fd, content.data() + off, content.size() - off);
    if (n < 0) {
      int saved = errno;
      ::close(fd);
      ::unlink(tmp.c_str());
      throw IoError("write failed for " + tmp.string() + ": " + std::strerror(saved));
    }
    off += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    int saved = errno;
    ::close(fd);
    ::unlink(tmp.c_str());
    throw IoError("fsync failed for " + tmp.string() + ": " + std::strerror(saved));
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    int saved = errno;
    ::unlink(tmp.c_str());
    throw IoError("rename failed for " + path.string() + ": " + std::strerror(saved));
  }
  int dirfd = ::open(path.parent_path().empty() ? "." : path.parent_path().c_str(),
                     O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (dirfd >= 0) {
    ::fsync(dirfd);
    ::close(dirfd);
  }
}

std::string trim_ascii(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
  };
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace decoyvault
