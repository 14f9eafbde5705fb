#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "fusion/date.hpp"

namespace fusion::incidents {

struct NewsArticle {
  std::string url;
  std::string title;
  std::string body;
  std::optional<Date> published;
  std::string source;

  bool operator==(const NewsArticle&) const = default;
};

/// One article per line: {"url", "title", "body", "published", "source"}.
/// A missing or empty "published" is kept as absent; an unparseable one, or a
/// line that is not an object with a url, throws Error(ParseError) naming the line.
std::vector<NewsArticle> read_articles(std::istream& in);
std::vector<NewsArticle> read_articles_file(const std::string& path);
std::string article_to_json(const NewsArticle& a);

/// Where articles come from. The corpus reader stands in for a live fetcher.
class ArticleSource {
 public:
  virtual ~ArticleSource() = default;
  virtual std::vector<NewsArticle> fetch() = 0;
};

class CorpusSource final : public ArticleSource {
 public:
  explicit CorpusSource(std::string path) : path_(std::move(path)) {}
  std::vector<NewsArticle> fetch() override { return read_articles_file(path_); }

 private:
  std::string path_;
};

}  // namespace fusion::incidents
