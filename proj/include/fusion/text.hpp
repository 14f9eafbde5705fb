#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// ASCII-oriented string helpers shared by the extraction modules.
namespace fusion::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Collapses runs of whitespace to single spaces and trims.
std::string squash_spaces(std::string_view s);

std::size_t levenshtein(std::string_view a, std::string_view b);
/// 1 - lev(a,b)/max(|a|,|b|); two empty strings are fully similar.
double edit_similarity(std::string_view a, std::string_view b);

bool is_word_char(char c);

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  std::size_t size() const { return end - begin; }
};

/// Case-insensitive search for `phrase` at word boundaries, starting at `from`.
std::optional<Span> find_word(std::string_view haystack, std::string_view phrase, std::size_t from = 0);
/// Number of non-overlapping word-bounded, case-insensitive occurrences.
std::size_t count_word(std::string_view haystack, std::string_view phrase);

/// Parses "12", "twelve" (zero..twenty). Case-insensitive.
std::optional<int> parse_count(std::string_view token);

/// Truncates to at most `budget` bytes without splitting a UTF-8 sequence.
std::string utf8_truncate(std::string_view s, std::size_t budget);

/// Parses a finite double occupying the whole string.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace fusion::text
