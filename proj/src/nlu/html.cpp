#include "fusion/nlu/html.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::nlu {

namespace {

const std::set<std::string, std::less<>> kVoid{"area", "base", "br", "col", "embed", "hr", "img",
                                               "input", "link", "meta", "source", "track", "wbr"};
const std::set<std::string, std::less<>> kSelfNesting{"li", "p", "tr", "td", "th", "option", "dt", "dd"};
const std::set<std::string, std::less<>> kBlock{"p", "div", "li", "tr", "td", "th", "h1", "h2", "h3", "h4",
                                                "h5", "h6", "br", "section", "article", "ul", "ol", "table", "dd", "dt"};

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':';
}

void collect_text(const HtmlNode& n, std::string& out) {
  if (n.is_text()) {
    out += n.text;
    return;
  }
  for (const auto& c : n.children) collect_text(*c, out);
  if (kBlock.contains(n.tag)) out += ' ';
}

}  // namespace

bool HtmlNode::has_class(std::string_view cls) const {
  const auto it = attrs.find("class");
  if (it == attrs.end()) return false;
  for (const auto& c : text::split(text::squash_spaces(it->second), ' '))
    if (c == cls) return true;
  return false;
}

std::string HtmlNode::text_content() const {
  std::string out;
  collect_text(*this, out);
  return text::squash_spaces(out);
}

std::string decode_entities(std::string_view s) {
  static const std::array<std::pair<std::string_view, unsigned long>, 10> named{{{"amp", '&'},
                                                                                 {"lt", '<'},
                                                                                 {"gt", '>'},
                                                                                 {"quot", '"'},
                                                                                 {"apos", '\''},
                                                                                 {"nbsp", 0xA0},
                                                                                 {"euro", 0x20AC},
                                                                                 {"pound", 0xA3},
                                                                                 {"yen", 0xA5},
                                                                                 {"copy", 0xA9}}};
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += s[i++];
      continue;
    }
    const std::string_view name = s.substr(i + 1, semi - i - 1);
    bool done = false;
    if (name.size() > 1 && name[0] == '#') {
      unsigned long cp = 0;
      const bool hex = name[1] == 'x' || name[1] == 'X';
      const auto digits = name.substr(hex ? 2 : 1);
      bool ok = !digits.empty();
      for (char c : digits) {
        const int v = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                      : hex && std::isxdigit(static_cast<unsigned char>(c))
                          ? std::tolower(static_cast<unsigned char>(c)) - 'a' + 10
                          : -1;
        if (v < 0) ok = false;
        cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(std::max(v, 0));
        if (cp > 0x10FFFF) ok = false;
      }
      if (ok) {
        append_utf8(out, cp == 0xA0 ? ' ' : cp);
        done = true;
      }
    } else {
      for (const auto& [n, cp] : named)
        if (n == name) {
          append_utf8(out, cp == 0xA0 ? ' ' : cp);  // nbsp folds to a plain space
          done = true;
          break;
        }
    }
    if (done) {
      i = semi + 1;
    } else {
      out += s[i++];
    }
  }
  return out;
}

std::unique_ptr<HtmlNode> parse_html(std::string_view html) {
  auto root = std::make_unique<HtmlNode>();
  root->tag = "#document";
  std::vector<HtmlNode*> open{root.get()};
  bool saw_element = false;

  auto add_text = [&](std::string_view raw) {
    if (raw.empty()) return;
    auto node = std::make_unique<HtmlNode>();
    node->tag = "#text";
    node->text = decode_entities(raw);
    node->parent = open.back();
    open.back()->children.push_back(std::move(node));
  };

  std::size_t i = 0;
  while (i < html.size()) {
    const auto lt = html.find('<', i);
    if (lt == std::string_view::npos) {
      add_text(html.substr(i));
      break;
    }
    add_text(html.substr(i, lt - i));
    i = lt;
    if (html.substr(i, 4) == "<!--") {
      const auto end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
      const auto end = html.find('>', i);
      i = end == std::string_view::npos ? html.size() : end + 1;
      continue;
    }
    const bool closing = i + 1 < html.size() && html[i + 1] == '/';
    std::size_t p = i + (closing ? 2 : 1);
    const std::size_t name_start = p;
    while (p < html.size() && is_name_char(html[p])) ++p;
    if (p == name_start || !std::isalpha(static_cast<unsigned char>(html[name_start]))) {
      add_text("<");  // a bare '<' in text
      i += 1;
      continue;
    }
    const std::string name = text::to_lower(html.substr(name_start, p - name_start));

    if (closing) {
      const auto end = html.find('>', p);
      i = end == std::string_view::npos ? html.size() : end + 1;
      for (std::size_t k = open.size(); k-- > 1;)
        if (open[k]->tag == name) {
          open.resize(k);
          break;
        }
      continue;
    }

    auto node = std::make_unique<HtmlNode>();
    node->tag = name;
    bool self_closed = false;
    while (p < html.size()) {
      while (p < html.size() && std::isspace(static_cast<unsigned char>(html[p]))) ++p;
      if (p >= html.size()) break;
      if (html[p] == '>') {
        ++p;
        break;
      }
      if (html[p] == '/') {
        self_closed = true;
        ++p;
        continue;
      }
      const std::size_t a0 = p;
      while (p < html.size() && !std::isspace(static_cast<unsigned char>(html[p])) && html[p] != '=' &&
             html[p] != '>' && html[p] != '/')
        ++p;
      std::string attr = text::to_lower(html.substr(a0, p - a0));
      std::string value;
      while (p < html.size() && std::isspace(static_cast<unsigned char>(html[p]))) ++p;
      if (p < html.size() && html[p] == '=') {
        ++p;
        while (p < html.size() && std::isspace(static_cast<unsigned char>(html[p]))) ++p;
        if (p < html.size() && (html[p] == '"' || html[p] == '\'')) {
          const char q = html[p];
          const auto end = html.find(q, p + 1);
          const auto stop = end == std::string_view::npos ? html.size() : end;
          value = decode_entities(html.substr(p + 1, stop - p - 1));
          p = end == std::string_view::npos ? html.size() : end + 1;
        } else {
          const std::size_t v0 = p;
          while (p < html.size() && !std::isspace(static_cast<unsigned char>(html[p])) && html[p] != '>') ++p;
          value = decode_entities(html.substr(v0, p - v0));
        }
      }
      if (!attr.empty()) node->attrs.emplace(std::move(attr), std::move(value));
      if (p == a0) ++p;  // guarantee progress on junk
    }
    i = p;
    saw_element = true;

    if (kSelfNesting.contains(name) && open.back()->tag == name) open.pop_back();
    node->parent = open.back();
    HtmlNode* raw = node.get();
    open.back()->children.push_back(std::move(node));

    if (name == "script" || name == "style") {
      const std::string close = "</" + name;
      std::size_t end = i;
      while (true) {
        end = html.find('<', end);
        if (end == std::string_view::npos || text::starts_with_ci(html.substr(end), close)) break;
        ++end;
      }
      if (end == std::string_view::npos) {
        i = html.size();
      } else {
        const auto gt = html.find('>', end);
        i = gt == std::string_view::npos ? html.size() : gt + 1;
      }
      continue;
    }
    if (!self_closed && !kVoid.contains(name)) open.push_back(raw);
  }
  if (!saw_element) throw Error(Errc::MalformedHtml, "document contains no elements");
  return root;
}

bool SelectorStep::matches(const HtmlNode& n) const {
  if (n.is_text() || n.tag == "#document") return false;
  if (!tag.empty() && tag != "*" && tag != n.tag) return false;
  if (!id.empty()) {
    const auto it = n.attrs.find("id");
    if (it == n.attrs.end() || it->second != id) return false;
  }
  for (const auto& c : classes)
    if (!n.has_class(c)) return false;
  for (const auto& [name, value] : attrs) {
    const auto it = n.attrs.find(name);
    if (it == n.attrs.end()) return false;
    if (value && it->second != *value) return false;
  }
  return true;
}

Selector Selector::parse(std::string_view text_in) {
  Selector sel;
  const std::string s = text::trim(text_in);
  std::size_t i = 0;
  auto fail = [&](const std::string& why) -> void {
    throw Error(Errc::BadConfig, "selector '" + s + "': " + why);
  };
  auto ident = [&](std::size_t& p) {
    const std::size_t b = p;
    while (p < s.size() && (is_name_char(s[p]) || s[p] == '*')) ++p;
    return s.substr(b, p - b);
  };
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    SelectorStep step;
    step.tag = text::to_lower(ident(i));
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) {
      const char c = s[i++];
      if (c == '.') {
        const auto cls = ident(i);
        if (cls.empty()) fail("empty class");
        step.classes.push_back(cls);
      } else if (c == '#') {
        step.id = ident(i);
        if (step.id.empty()) fail("empty id");
      } else if (c == '[') {
        const auto close = s.find(']', i);
        if (close == std::string::npos) fail("unterminated '['");
        const std::string body = s.substr(i, close - i);
        i = close + 1;
        const auto eq = body.find('=');
        std::string name = text::to_lower(text::trim(body.substr(0, eq)));
        if (name.empty()) fail("empty attribute name");
        std::optional<std::string> value;
        if (eq != std::string::npos) {
          std::string v = text::trim(body.substr(eq + 1));
          if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
            v = v.substr(1, v.size() - 2);
          value = v;
        }
        step.attrs.emplace_back(std::move(name), std::move(value));
      } else {
        fail(std::string("unexpected '") + c + "'");
      }
    }
    if (step.tag.empty() && step.id.empty() && step.classes.empty() && step.attrs.empty()) fail("empty step");
    sel.steps.push_back(std::move(step));
  }
  if (sel.steps.empty()) fail("empty selector");
  return sel;
}

bool Selector::matches(const HtmlNode& n) const {
  if (steps.empty() || !steps.back().matches(n)) return false;
  std::size_t k = steps.size() - 1;
  const HtmlNode* cur = n.parent;
  while (k > 0 && cur) {
    if (steps[k - 1].matches(*cur)) --k;
    cur = cur->parent;
  }
  return k == 0;
}

namespace {

template <typename Fn>
bool walk(const HtmlNode& n, Fn&& fn) {
  if (fn(n)) return true;
  for (const auto& c : n.children)
    if (walk(*c, fn)) return true;
  return false;
}

}  // namespace

const HtmlNode* select_first(const HtmlNode& root, const Selector& sel) {
  const HtmlNode* found = nullptr;
  walk(root, [&](const HtmlNode& n) {
    if (sel.matches(n)) {
      found = &n;
      return true;
    }
    return false;
  });
  return found;
}

std::vector<const HtmlNode*> select_all(const HtmlNode& root, const Selector& sel) {
  std::vector<const HtmlNode*> out;
  walk(root, [&](const HtmlNode& n) {
    if (sel.matches(n)) out.push_back(&n);
    return false;
  });
  return out;
}

}  // namespace fusion::nlu
