#include "fusion/incidents/article.hpp"

#include <fstream>
#include <json.hpp>

#include "fusion/error.hpp"
#include "fusion/text.hpp"

namespace fusion::incidents {

using nlohmann::json;

std::vector<NewsArticle> read_articles(std::istream& in) {
  std::vector<NewsArticle> out;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (text::trim(line).empty()) continue;
    const std::string where = "article line " + std::to_string(n);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError, where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("url") || !j["url"].is_string())
      throw Error(Errc::ParseError, where + ": expected an object with a url");
    NewsArticle a;
    a.url = j["url"].get<std::string>();
    a.title = j.value("title", "");
    a.body = j.value("body", "");
    a.source = j.value("source", "");
    const std::string published = j.value("published", "");
    if (!text::trim(published).empty()) {
      a.published = Date::parse_iso(text::trim(published));
      if (!a.published) throw Error(Errc::ParseError, where + ": unparseable published date '" + published + "'");
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<NewsArticle> read_articles_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open article corpus '" + path + "'");
  return read_articles(in);
}

std::string article_to_json(const NewsArticle& a) {
  json j{{"url", a.url}, {"title", a.title}, {"body", a.body}, {"source", a.source}};
  j["published"] = a.published ? json(a.published->iso()) : json(nullptr);
  return j.dump();
}

}  // namespace fusion::incidents
