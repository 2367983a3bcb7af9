#include "decoyvault/scanner.hpp"

namespace decoyvault::scanner {

namespace {

bool is_delimiter(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_separator(char c) {
  switch (c) {
    case '-':
    case '/':
    case '.':
    case ':':
    case ',':
    case '(':
    case ')':
    case '#':
    case '+':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<Token> tokenize(std::string_view content) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < content.size()) {
    while (i < content.size() && is_delimiter(content[i])) ++i;
    if (i >= content.size()) break;
    std::size_t start = i;
    while (i < content.size() && !is_delimiter(content[i])) ++i;
    tokens.push_back(Token{std::string(content.substr(start, i - start)), start, i});
  }
  return tokens;
}

bool classify(std::string_view token_text) {
  bool saw_digit = false;
  for (char c : token_text) {
    if (is_digit(c)) {
      saw_digit = true;
    } else if (!is_separator(c)) {
      return false;
    }
  }
  return saw_digit;
}

std::vector<DigitRun> scan(std::string_view content) {
  std::vector<DigitRun> runs;
  for (const Token& token : tokenize(content)) {
    if (!classify(token)) continue;
    std::size_t i = 0;
    while (i < token.text.size()) {
      if (!is_digit(token.text[i])) {
        ++i;
        continue;
      }
      std::size_t begin = i;
      while (i < token.text.size() && is_digit(token.text[i])) ++i;
      runs.push_back(DigitRun{token.start + begin, i - begin,
                              token.text.substr(begin, i - begin)});
    }
  }
  return runs;
}

}  // namespace decoyvault::scanner
