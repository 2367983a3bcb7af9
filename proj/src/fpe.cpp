#include "decoyvault/fpe.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <cstring>

#include "decoyvault/errors.hpp"
#include "decoyvault/util.hpp"

namespace decoyvault::fpe {

namespace {

using u128 = unsigned __int128;

// 10^0 .. 10^32. Halves of a 64-digit string hold at most 32 digits and
// 10^32 < 2^107, so all half arithmetic fits in 128 bits.
constexpr std::size_t kMaxHalf = kMaxDigits / 2;

const std::array<u128, kMaxHalf + 1>& pow10_table() {
  static const auto table = [] {
    std::array<u128, kMaxHalf + 1> t{};
    t[0] = 1;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * 10;
    return t;
  }();
  return table;
}

constexpr int kRounds = 10;
// Prefix byte for the single-digit permutation PRF; round messages start with
// their round number (0..9), so the domains cannot collide.
constexpr std::uint8_t kPermDomain = 0xff;

void append_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void append_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void validate_digits(std::string_view s) {
  if (s.empty()) {
    throw InvalidInputError("digit string is empty");
  }
  if (s.size() > kMaxDigits) {
    throw LengthError("digit string longer than 64 digits");
  }
  for (char c : s) {
    if (c < '0' || c > '9') {
      throw InvalidInputError("digit string contains a non-digit character");
    }
  }
}

u128 digits_to_num(std::string_view s) {
  u128 v = 0;
  for (char c : s) v = v * 10 + static_cast<u128>(c - '0');
  return v;
}

std::string num_to_digits(u128 v, std::size_t width) {
  std::string out(width, '0');
  for (std::size_t i = width; i-- > 0;) {
    out[i] = static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  }
  return out;
}

// PRF output interpreted as a big-endian integer reduced mod 10^width.
u128 prf_mod(const FpeKey& key, std::uint8_t domain,
             const std::vector<std::uint8_t>& tweak_bytes, std::string_view half,
             std::size_t width) {
  std::vector<std::uint8_t> msg;
  msg.reserve(1 + tweak_bytes.size() + half.size());
  msg.push_back(domain);
  msg.insert(msg.end(), tweak_bytes.begin(), tweak_bytes.end());
  msg.insert(msg.end(), half.begin(), half.end());
  auto digest = hmac_sha256(key.bytes(), msg);
  const u128 modulus = pow10_table()[width];
  u128 r = 0;
  for (std::uint8_t b : digest) {
    r = (r * 256 + b) % modulus;
  }
  return r;
}

// Keyed permutation of {0..9} for the degenerate one-digit case, where a
// two-half Feistel has nothing to split.
std::array<int, 10> digit_permutation(const FpeKey& key,
                                      const std::vector<std::uint8_t>& tweak_bytes) {
  std::vector<std::uint8_t> msg;
  msg.reserve(1 + tweak_bytes.size());
  msg.push_back(kPermDomain);
  msg.insert(msg.end(), tweak_bytes.begin(), tweak_bytes.end());
  auto digest = hmac_sha256(key.bytes(), msg);

  std::array<int, 10> perm{};
  for (int i = 0; i < 10; ++i) perm[i] = i;
  std::size_t next = 0;
  for (int i = 9; i >= 1; --i) {
    int j = digest[next++] % (i + 1);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace

FpeKey FpeKey::random() {
  FpeKey key;
  if (RAND_bytes(key.bytes_.data(), static_cast<int>(key.bytes_.size())) != 1) {
    throw IoError("system random generator failed");
  }
  return key;
}

FpeKey FpeKey::from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != 32) {
    throw InvalidInputError("FPE key must be exactly 32 bytes");
  }
  FpeKey key;
  std::memcpy(key.bytes_.data(), bytes.data(), bytes.size());
  return key;
}

FpeKey FpeKey::from_hex(std::string_view hex) {
  auto bytes = decoyvault::from_hex(hex);
  return from_bytes(bytes);
}

std::string FpeKey::to_hex() const { return decoyvault::to_hex(bytes_); }

std::vector<std::uint8_t> Tweak::encode() const {
  if (decoy_index == 0) {
    throw InvalidInputError("tweak decoy_index must be positive");
  }
  std::vector<std::uint8_t> out;
  out.reserve(4 + object_id.size() + 16);
  append_u32_be(out, static_cast<std::uint32_t>(object_id.size()));
  out.insert(out.end(), object_id.begin(), object_id.end());
  append_u64_be(out, decoy_index);
  append_u64_be(out, run_index);
  return out;
}

std::string encrypt_digits(const FpeKey& key, const Tweak& tweak,
                           std::string_view plaintext) {
  validate_digits(plaintext);
  const auto tweak_bytes = tweak.encode();

  const std::size_t n = plaintext.size();
  if (n == 1) {
    auto perm = digit_permutation(key, tweak_bytes);
    return std::string(1, static_cast<char>('0' + perm[plaintext[0] - '0']));
  }

  // Balanced Feistel, ceil/floor halves. Each round replaces the left half
  // with (left + PRF(round, tweak, right)) mod 10^len(left) and swaps.
  const std::size_t u = (n + 1) / 2;
  const std::size_t v = n - u;
  std::string a(plaintext.substr(0, u));
  std::string b(plaintext.substr(u));
  for (int round = 0; round < kRounds; ++round) {
    const std::size_t m = (round % 2 == 0) ? u : v;
    const u128 modulus = pow10_table()[m];
    const u128 f = prf_mod(key, static_cast<std::uint8_t>(round), tweak_bytes, b, m);
    const u128 c = (digits_to_num(a) + f) % modulus;
    a.swap(b);
    b = num_to_digits(c, m);
  }
  return a + b;
}

std::string decrypt_digits(const FpeKey& key, const Tweak& tweak,
                           std::string_view ciphertext) {
  validate_digits(ciphertext);
  const auto tweak_bytes = tweak.encode();

  const std::size_t n = ciphertext.size();
  if (n == 1) {
    auto perm = digit_permutation(key, tweak_bytes);
    for (int d = 0; d < 10; ++d) {
      if (perm[d] == ciphertext[0] - '0') {
        return std::string(1, static_cast<char>('0' + d));
      }
    }
    throw InvalidInputError("digit permutation is corrupt");  // unreachable
  }

  const std::size_t u = (n + 1) / 2;
  const std::size_t v = n - u;
  std::string a(ciphertext.substr(0, u));
  std::string b(ciphertext.substr(u));
  for (int round = kRounds - 1; round >= 0; --round) {
    const std::size_t m = (round % 2 == 0) ? u : v;
    const u128 modulus = pow10_table()[m];
    const u128 f = prf_mod(key, static_cast<std::uint8_t>(round), tweak_bytes, a, m);
    const u128 c = (digits_to_num(b) + modulus - f % modulus) % modulus;
    b.swap(a);
    a = num_to_digits(c, m);
  }
  return a + b;
}

}  // namespace decoyvault::fpe
