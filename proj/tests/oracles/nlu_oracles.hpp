#pragma once

#include <cctype>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct TermHit {
  std::size_t begin, end;
  std::string term;
  bool operator==(const TermHit&) const = default;
};

inline bool word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || u >= 0x80;
}

inline bool matches_at(const std::string& text, std::size_t i, const std::string& term) {
  if (i + term.size() > text.size()) return false;
  for (std::size_t k = 0; k < term.size(); ++k)
    if (std::tolower(static_cast<unsigned char>(text[i + k])) != std::tolower(static_cast<unsigned char>(term[k])))
      return false;
  const bool left = i == 0 || !word_char(term.front()) || !word_char(text[i - 1]);
  const std::size_t e = i + term.size();
  const bool right = e == text.size() || !word_char(term.back()) || !word_char(text[e]);
  return left && right;
}

// Position-by-position scan: at each offset take the longest term that
// matches there, then jump past it.
inline std::vector<TermHit> leftmost_longest(const std::string& text, const std::vector<std::string>& terms) {
  std::vector<TermHit> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::string* best = nullptr;
    for (const auto& t : terms)
      if (matches_at(text, i, t) && (!best || t.size() > best->size())) best = &t;
    if (best) {
      out.push_back({i, i + best->size(), *best});
      i += best->size();
    } else {
      ++i;
    }
  }
  return out;
}

// Code point count of a UTF-8 string.
inline std::size_t code_points(const std::string& s) {
  std::size_t n = 0;
  for (char c : s)
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  return n;
}

}  // namespace oracle
