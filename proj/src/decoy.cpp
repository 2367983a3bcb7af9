#include "decoyvault/decoy.hpp"

#include <algorithm>

#include "decoyvault/errors.hpp"
#include "decoyvault/scanner.hpp"

namespace decoyvault::decoy {

std::string generate_decoy(std::string_view original, const fpe::FpeKey& key,
                           std::string_view object_id, std::uint64_t decoy_index) {
  if (decoy_index < 1) {
    throw InvalidInputError("decoy_index must be positive");
  }
  std::string out(original);
  std::uint64_t segment = 0;
  for (const scanner::DigitRun& run : scanner::scan(original)) {
    std::size_t off = 0;
    while (off < run.digits.size()) {
      const std::size_t n = std::min(fpe::kMaxDigits, run.digits.size() - off);
      fpe::Tweak tweak{std::string(object_id), decoy_index, segment++};
      const std::string cipher = fpe::encrypt_digits(
          key, tweak, std::string_view(run.digits).substr(off, n));
      out.replace(run.start + off, n, cipher);
      off += n;
    }
  }
  return out;
}

std::string derive_decoy_name(std::string_view original_name,
                              std::uint64_t decoy_index) {
  if (decoy_index < 1 || decoy_index > kNameSuffixes.size()) {
    throw PolicyError("decoy_index must be in 1..5");
  }
  // The extension starts at the last dot, except a leading dot ("/.bashrc"
  // style names) which stays part of the stem.
  std::size_t dot = original_name.rfind('.');
  std::string_view stem = original_name;
  std::string_view ext;
  if (dot != std::string_view::npos && dot != 0) {
    stem = original_name.substr(0, dot);
    ext = original_name.substr(dot);
  }
  std::string out(stem);
  out += kNameSuffixes[decoy_index - 1];
  out += ext;
  return out;
}

}  // namespace decoyvault::decoy
