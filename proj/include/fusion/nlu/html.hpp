#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fusion::nlu {

struct HtmlNode {
  std::string tag;  // lowercase; "#text" for text nodes, "#document" for the root
  std::map<std::string, std::string> attrs;
  std::string text;  // decoded text for "#text" nodes
  std::vector<std::unique_ptr<HtmlNode>> children;
  HtmlNode* parent = nullptr;

  bool is_text() const { return tag == "#text"; }
  bool has_class(std::string_view cls) const;
  /// Concatenated descendant text with whitespace squashed.
  std::string text_content() const;
};

/// Decodes named (amp, lt, gt, quot, apos, nbsp, euro, pound, yen, copy)
/// and numeric character references. Unknown entities are kept verbatim.
std::string decode_entities(std::string_view s);

/// Lenient parse: unclosed tags are closed by an ancestor's end tag or end of
/// input, stray end tags are ignored, script/style bodies and comments are
/// skipped. Throws Error(MalformedHtml) when the input contains no element.
std::unique_ptr<HtmlNode> parse_html(std::string_view html);

/// One selector step: optional tag (or "*"), classes, id and [attr=value]
/// filters. A selector is a whitespace-separated descendant path of steps.
struct SelectorStep {
  std::string tag;  // empty or "*" matches any element
  std::string id;
  std::vector<std::string> classes;
  std::vector<std::pair<std::string, std::optional<std::string>>> attrs;  // nullopt: presence only

  bool matches(const HtmlNode& n) const;
};

struct Selector {
  std::vector<SelectorStep> steps;

  /// Throws Error(BadConfig) on an empty or unparseable selector.
  static Selector parse(std::string_view text);
  bool matches(const HtmlNode& n) const;
};

/// First element in document order matching the selector, or nullptr.
const HtmlNode* select_first(const HtmlNode& root, const Selector& sel);
std::vector<const HtmlNode*> select_all(const HtmlNode& root, const Selector& sel);

}  // namespace fusion::nlu
