#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fusion/nlu/html.hpp"

namespace fusion::nlu {

enum class PostProcess { text, number, currency_split };

std::string_view to_string(PostProcess p) noexcept;
std::optional<PostProcess> parse_post_process(std::string_view s) noexcept;

/// Extracts one listing field from the first node matching `selector`.
/// When `attribute` is set the value comes from that attribute instead of
/// the node text.
struct HtmlRule {
  std::string field;
  Selector selector;
  PostProcess post = PostProcess::text;
  std::optional<std::string> attribute;
};

struct Money {
  double amount = 0.0;
  std::string currency;  // ISO 4217 code

  bool operator==(const Money&) const = default;
};

/// Splits "€1,200", "1.200,50 EUR", "USD 950" or "$ 75" into amount and code.
std::optional<Money> split_currency(std::string_view s);
/// First number in the text, thousands separators removed.
std::optional<double> first_number(std::string_view s);

struct GazetteerEntry {
  std::string term;       // surface form, matched case-insensitively
  std::string canonical;  // normalised model name
};

/// Slang and model terms. Matching is leftmost-longest at word boundaries.
struct Gazetteer {
  std::vector<GazetteerEntry> firearms;
  std::vector<std::string> places;

  struct Hit {
    std::size_t begin = 0, end = 0;
    const GazetteerEntry* entry = nullptr;
  };
  /// All non-overlapping leftmost-longest firearm hits in order.
  std::vector<Hit> firearm_hits(std::string_view text) const;
};

struct Specs {
  std::optional<std::string> caliber;
  std::optional<std::string> model;
  std::optional<int> quantity;

  bool operator==(const Specs&) const = default;
};

/// Caliber: metric ("9mm", "7.62x39mm"), imperial (".45 ACP") or gauge
/// ("12ga"), leftmost-longest across patterns. Model: canonical form of the
/// leftmost-longest gazetteer hit.
/// Quantity: "x N", "N pcs|pieces|units" (N may be a number word), >= 1.
Specs extract_specs(std::string_view description, const Gazetteer& gazetteer);

struct ListingRecord {
  std::string url;
  std::string title;
  std::optional<Money> price;
  std::string seller;
  std::optional<std::string> shipping;
  Specs specs;
  std::string raw_description;

  bool operator==(const ListingRecord&) const = default;
};

/// Fields recognised by rules: title, description, price, seller, shipping,
/// url. Throws MalformedHtml, or MissingRequiredField naming title or
/// description.
ListingRecord parse_listing(std::string_view html, const std::vector<HtmlRule>& rules, const Gazetteer& gazetteer);

std::string listing_to_json(const ListingRecord& r);
ListingRecord listing_from_json(std::string_view json);

/// Ruleset file: JSON array of {field, selector, post?, attribute?}.
std::vector<HtmlRule> load_ruleset(const std::string& path);
/// Gazetteer file: {"firearms": [{"term", "canonical"}], "places": [...]}.
Gazetteer load_gazetteer(const std::string& path);

}  // namespace fusion::nlu
