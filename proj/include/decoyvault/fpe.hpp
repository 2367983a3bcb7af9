#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace decoyvault::fpe {

/// Longest digit string a single encrypt/decrypt call accepts. Callers split
/// longer runs into segments and vary the tweak per segment.
constexpr std::size_t kMaxDigits = 64;

/// 256-bit secret for the digit cipher. Never written into object content or
/// audit records; the only persistent form is the vault key file.
class FpeKey {
 public:
  static FpeKey random();
  static FpeKey from_bytes(std::span<const std::uint8_t> bytes);
  static FpeKey from_hex(std::string_view hex);

  std::string to_hex() const;
  std::span<const std::uint8_t> bytes() const { return bytes_; }

 private:
  FpeKey() = default;
  std::array<std::uint8_t, 32> bytes_{};
};

/// Domain separator so the same digits enciphered at different positions, in
/// different decoys, or for different objects come out different.
struct Tweak {
  std::string object_id;
  std::uint64_t decoy_index = 1;  // >= 1
  std::uint64_t run_index = 0;

  /// Canonical byte encoding, injective over (object_id, decoy_index, run_index).
  std::vector<std::uint8_t> encode() const;
};

/// Length-preserving keyed bijection on decimal digit strings.
///
/// plaintext must be 1..64 ASCII digits. For a fixed (key, tweak) the map is a
/// bijection at every length; decrypt_digits is its exact inverse.
std::string encrypt_digits(const FpeKey& key, const Tweak& tweak,
                           std::string_view plaintext);
std::string decrypt_digits(const FpeKey& key, const Tweak& tweak,
                           std::string_view ciphertext);

}  // namespace decoyvault::fpe
