#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace decoyvault::scanner {

/// A whitespace-delimited word with its byte span in the source content.
struct Token {
  std::string text;
  std::size_t start = 0;  // byte offset of first byte
  std::size_t end = 0;    // one past the last byte

  bool operator==(const Token&) const = default;
};

/// A maximal run of ASCII digits inside a sensitive token.
struct DigitRun {
  std::size_t start = 0;  // absolute byte offset in the content
  std::size_t length = 0;
  std::string digits;

  bool operator==(const DigitRun&) const = default;
};

/// Splits on {space, tab, CR, LF}. Consecutive delimiters yield no empty
/// tokens; delimiter bytes belong to no token.
std::vector<Token> tokenize(std::string_view content);

/// A token is sensitive when stripping the separator set -/.:,()#+ leaves a
/// non-empty, all-ASCII-digit string. Alphanumeric tokens are not sensitive.
bool classify(std::string_view token_text);
inline bool classify(const Token& token) { return classify(token.text); }

/// The maximal digit runs inside sensitive tokens, ordered by offset.
std::vector<DigitRun> scan(std::string_view content);

}  // namespace decoyvault::scanner
