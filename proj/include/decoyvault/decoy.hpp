#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "decoyvault/fpe.hpp"

namespace decoyvault::decoy {

/// Name suffixes for decoy indices 1..5, inserted before the extension.
/// Names are plausibility dressing only; the catalog decides what is real.
constexpr std::array<std::string_view, 5> kNameSuffixes = {"_final", "_v2", "_copy",
                                                           "_old", "_draft"};

/// Rewrites every sensitive digit run of `original` through the digit cipher,
/// leaving all other bytes untouched. Output length always equals input
/// length. Runs longer than 64 digits are enciphered in 64-digit segments;
/// the tweak run_index advances once per segment.
std::string generate_decoy(std::string_view original, const fpe::FpeKey& key,
                           std::string_view object_id, std::uint64_t decoy_index);

/// "report.docx", 1 -> "report_final.docx". decoy_index must be in 1..5.
std::string derive_decoy_name(std::string_view original_name,
                              std::uint64_t decoy_index);

}  // namespace decoyvault::decoy
