#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "fusion/error.hpp"
#include "fusion/incidents/article.hpp"
#include "fusion/incidents/risk.hpp"
#include "fusion/incidents/tracker.hpp"
#include "oracles/risk_oracle.hpp"

using namespace fusion;
using namespace fusion::incidents;
using nlohmann::json;

namespace {

const std::string kData = std::string(FUSION_DATA_DIR) + "/incidents";

const TrackerConfig& config() {
  static const auto c = load_tracker_config(kData + "/tracker.json");
  return c;
}

std::vector<NewsArticle> corpus() { return read_articles_file(kData + "/articles.ndjson"); }

json labels() {
  std::ifstream in(kData + "/labels.json");
  return json::parse(in);
}

NewsArticle article(std::string body, std::optional<Date> published = Date{2023, 5, 1}) {
  return {"https://x/" + std::to_string(std::hash<std::string>{}(body)), "t", std::move(body), published, "s"};
}

IncidentRecord record(std::string country, int year, int month, IncidentType type = IncidentType::seizure) {
  IncidentRecord r;
  r.country = std::move(country);
  r.date = Date{year, month, 1};
  r.type = type;
  return r;
}

}  // namespace

TEST_CASE("article corpus reading") {
  const auto articles = corpus();
  CHECK(articles.size() == 30);
  std::istringstream bad(R"({"url": "u", "published": "14/05/2023"})");
  CHECK_THROWS_WITH_AS(read_articles(bad), doctest::Contains("line 1"), Error);
  std::istringstream no_url(R"({"title": "t"})");
  CHECK_THROWS_AS(read_articles(no_url), Error);
  std::istringstream round(article_to_json(articles[0]) + "\n");
  CHECK(read_articles(round).front() == articles[0]);
  CorpusSource source(kData + "/articles.ndjson");
  CHECK(source.fetch() == articles);
}

TEST_CASE("eligibility matches labels and partitions the input") {
  const auto articles = corpus();
  const auto result = filter_eligible(articles, config().criteria);
  const auto l = labels();

  std::vector<std::string> eligible;
  for (const auto& a : result.eligible) eligible.push_back(a.url);
  CHECK(eligible == l.at("eligible").get<std::vector<std::string>>());
  REQUIRE(result.rejected.size() == l.at("rejected").size());
  for (std::size_t i = 0; i < result.rejected.size(); ++i) {
    INFO(result.rejected[i].url);
    CHECK(result.rejected[i].url == l["rejected"][i].at("url").get<std::string>());
    CHECK(result.rejected[i].reason == l["rejected"][i].at("reason").get<std::string>());
  }

  std::set<std::size_t> seen(result.eligible_index.begin(), result.eligible_index.end());
  for (const auto& r : result.rejected) CHECK(seen.insert(r.index).second);
  CHECK(seen.size() == articles.size());
  for (std::size_t i = 0; i < result.eligible.size(); ++i) CHECK(result.eligible[i] == articles[result.eligible_index[i]]);
}

TEST_CASE("eligibility reasons") {
  const auto& c = config().criteria;
  const std::string shooting = "A gunman opened fire with a handgun outside the station, police said in a statement today.";
  CHECK(filter_eligible({article(shooting)}, c).eligible.size() == 1);
  CHECK(filter_eligible({article("")}, c).rejected.at(0).reason == "too_short");
  CHECK(filter_eligible({article(shooting, std::nullopt)}, c).rejected.at(0).reason == "no_date");
  CHECK(filter_eligible({article("The team won the final after a dramatic penalty shoot-out in front of forty thousand fans.")}, c)
            .rejected.at(0)
            .reason == "no_incident_keyword");
}

TEST_CASE("eligibility partition holds for random subsets and orders") {
  auto articles = corpus();
  std::mt19937 rng(41);
  for (int iter = 0; iter < 50; ++iter) {
    std::shuffle(articles.begin(), articles.end(), rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, articles.size())(rng);
    const std::vector<NewsArticle> subset(articles.begin(), articles.begin() + static_cast<std::ptrdiff_t>(n));
    const auto r = filter_eligible(subset, config().criteria);
    CHECK(r.eligible.size() + r.rejected.size() == subset.size());
    std::multiset<std::string> in, out;
    for (const auto& a : subset) in.insert(a.url);
    for (const auto& a : r.eligible) out.insert(a.url);
    for (const auto& x : r.rejected) out.insert(x.url);
    CHECK(in == out);
  }
}

TEST_CASE("incident extraction matches labels field for field") {
  const auto result = filter_eligible(corpus(), config().criteria);
  const auto want = labels().at("records");
  REQUIRE(result.eligible.size() >= 20);
  REQUIRE(result.eligible.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    INFO(result.eligible[i].url);
    const auto got = extract_incident(result.eligible[i], config());
    const auto expected = incident_from_json(want[i].dump());
    CHECK(to_string(got.type) == to_string(expected.type));
    CHECK(got.date == expected.date);
    CHECK(got.country == expected.country);
    CHECK(got.city == expected.city);
    CHECK(got.firearm == expected.firearm);
    CHECK(got.victims == expected.victims);
    CHECK(got.perpetrators == expected.perpetrators);
    CHECK(got.source_url == expected.source_url);
    CHECK(got.warnings == expected.warnings);
    CHECK(incident_from_json(incident_to_json(got)) == got);
    CHECK(extract_incident(result.eligible[i], config()) == got);
  }
}

TEST_CASE("Rotterdam seizure example") {
  const auto r = extract_incident(article("Police seized 14 rifles in Rotterdam on 14 May 2023 after a tip-off."), config());
  CHECK(r.type == IncidentType::seizure);
  CHECK(r.country == "NL");
  CHECK(r.city == "Rotterdam");
  CHECK(r.firearm == "rifles");
}

TEST_CASE("type priority, counts and location fallback") {
  const auto both = extract_incident(article("A man was murdered and police seized a pistol in Paris."), config());
  CHECK(both.type == IncidentType::homicide);
  const auto rob = extract_incident(article("An armed robbery in Rome: shots were fired but nobody was shot."), config());
  CHECK(rob.type == IncidentType::shooting);
  CHECK(extract_incident(article("A shooting left three victims in Lyon."), config()).victims == 3);

  const auto nowhere = extract_incident(article("Police seized a pistol somewhere."), config());
  CHECK(nowhere.country == "Unknown");
  CHECK(nowhere.warnings == std::vector<std::string>{"NoLocationFound"});
  CHECK_FALSE(nowhere.city);

  const auto country_first = extract_incident(article("In Germany, police seized guns. Raids followed in Paris and Munich."), config());
  CHECK(country_first.country == "DE");
  CHECK(country_first.city == "Munich");

  CHECK_THROWS_WITH_AS(extract_incident(article("Nothing happened in Paris."), config()),
                       doctest::Contains("PreconditionUnmet"), Error);
}

TEST_CASE("number words zero through twenty") {
  const std::vector<std::string> words{"zero",     "one",     "two",     "three",     "four",     "five",    "six",
                                       "seven",    "eight",   "nine",    "ten",       "eleven",   "twelve",  "thirteen",
                                       "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty"};
  for (std::size_t n = 0; n < words.size(); ++n) {
    CHECK(find_count("There were " + words[n] + " victims.", {"victims"}) == static_cast<int>(n));
    CHECK(find_count("Police held " + std::to_string(n) + " armed suspects.", {"suspects"}) == static_cast<int>(n));
  }
  CHECK_FALSE(find_count("twenty-one victims", {"victims"}));
  CHECK_FALSE(find_count("no numbers here", {"victims"}));
}

TEST_CASE("in-text dates") {
  CHECK(find_text_date("on 2023-05-14 police") == Date{2023, 5, 14});
  CHECK(find_text_date("on 14/05/2023") == Date{2023, 5, 14});
  CHECK(find_text_date("on 14th May 2023") == Date{2023, 5, 14});
  CHECK(find_text_date("on Sept. 3, 2022") == Date{2022, 9, 3});
  CHECK(find_text_date("31 February 2023 then 1 March 2023") == Date{2023, 3, 1});
  CHECK(find_text_date("May 2 2021 before 2020-01-01") == Date{2021, 5, 2});
  CHECK_FALSE(find_text_date("last Tuesday"));
  const auto fallback = extract_incident(article("A shooting with a rifle in Rome.", Date{2022, 12, 30}), config());
  CHECK(fallback.date == Date{2022, 12, 30});
}

TEST_CASE("news topic payload") {
  auto r = extract_incident(article("Police seized 14 rifles in Rotterdam on 14 May 2023. Two suspects held."), config());
  const auto p = incident_payload(r, "inc-1");
  CHECK(p.at("kind") == "event");
  CHECK(p.at("source") == "news");
  CHECK(p.at("country") == "NL");
  CHECK(p.at("date") == "2023-05-14");
  CHECK(p.at("perpetrators") == "2");
  r.country = "Unknown";
  CHECK_FALSE(incident_payload(r, "inc-1").count("country"));
}

TEST_CASE("uniform counts raise no red flags") {
  std::vector<IncidentRecord> recs;
  for (int m = 1; m <= 12; m += 3)
    for (int k = 0; k < 3; ++k) recs.push_back(record("FR", 2023, m));
  const auto report = compute_risk_indicators(recs, 2.0);
  CHECK(report.indicators.size() == 4);
  CHECK(report.flags.empty());
  for (const auto& i : report.indicators) CHECK(i.z_score == 0.0);
}

TEST_CASE("a spike quarter is the only flagged cell") {
  // Counts 2, 3, 2, 3, 25 over five quarters. For the spike the baseline is
  // {2, 3, 2, 3}: mean 2.5, population std 0.5, so z = 22.5 / 0.5 = 45.
  std::vector<IncidentRecord> recs;
  const std::vector<std::pair<int, int>> plan{{2023, 1}, {2023, 4}, {2023, 7}, {2023, 10}, {2024, 1}};
  const std::vector<int> counts{2, 3, 2, 3, 25};
  for (std::size_t q = 0; q < plan.size(); ++q)
    for (int k = 0; k < counts[q]; ++k) recs.push_back(record("NL", plan[q].first, plan[q].second));
  const auto report = compute_risk_indicators(recs, 2.0);
  REQUIRE(report.flags.size() == 1);
  const auto& flagged = report.indicators[report.flags[0].indicator];
  CHECK(flagged.quarter == "2024-Q1");
  CHECK(flagged.count == 25);
  CHECK(flagged.baseline_mean == doctest::Approx(2.5));
  CHECK(flagged.baseline_std == doctest::Approx(0.5));
  CHECK(flagged.z_score == doctest::Approx(45.0));
}

TEST_CASE("zero-variance baseline uses the infinity sentinel") {
  std::vector<IncidentRecord> recs{record("BE", 2023, 1), record("BE", 2023, 4), record("BE", 2023, 7)};
  for (int k = 0; k < 10; ++k) recs.push_back(record("BE", 2023, 10));
  const auto report = compute_risk_indicators(recs, 2.0);
  REQUIRE(report.flags.size() == 1);
  const auto& i = report.indicators[report.flags[0].indicator];
  CHECK(std::isinf(i.z_score));
  CHECK(i.z_score > 0);
  CHECK(json::parse(indicator_to_json(i)).at("z_score") == "+inf");
}

TEST_CASE("single-quarter history emits indicators without flags") {
  std::vector<IncidentRecord> recs(5, record("IT", 2023, 5));
  const auto report = compute_risk_indicators(recs, 0.0);
  REQUIRE(report.indicators.size() == 1);
  CHECK(report.indicators[0].count == 5);
  CHECK(report.flags.empty());
  CHECK(compute_risk_indicators({}, 1.0).indicators.empty());
}

TEST_CASE("risk indicators agree with a brute-force oracle and conserve counts") {
  const std::vector<std::string> countries{"NL", "DE", "FR", "Unknown"};
  std::mt19937 rng(77);
  for (int iter = 0; iter < 150; ++iter) {
    std::vector<IncidentRecord> recs;
    const int n = std::uniform_int_distribution<int>(1, 60)(rng);
    std::size_t known = 0;
    for (int k = 0; k < n; ++k) {
      const auto c = countries[std::uniform_int_distribution<std::size_t>(0, countries.size() - 1)(rng)];
      const int year = std::uniform_int_distribution<int>(2021, 2023)(rng);
      const int month = std::uniform_int_distribution<int>(1, 12)(rng);
      const auto type = kIncidentPriority[std::uniform_int_distribution<int>(0, 3)(rng)];
      recs.push_back(record(c, year, month, type));
      if (c != "Unknown") ++known;
    }
    const double threshold = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    const auto report = compute_risk_indicators(recs, threshold);
    const auto want = oracle::risk_cells(recs, threshold);
    REQUIRE(report.indicators.size() == want.size());
    std::size_t total = 0, flags = 0;
    std::set<std::size_t> flagged;
    for (const auto& f : report.flags) flagged.insert(f.indicator);
    for (std::size_t i = 0; i < report.indicators.size(); ++i) {
      const auto& ind = report.indicators[i];
      const auto it = want.find({ind.country, std::string(to_string(ind.type)), ind.quarter});
      REQUIRE(it != want.end());
      CHECK(ind.count == it->second.count);
      CHECK(ind.baseline_mean == doctest::Approx(it->second.mean).epsilon(1e-12));
      CHECK(ind.baseline_std == doctest::Approx(it->second.std).epsilon(1e-12));
      if (std::isinf(it->second.z)) CHECK(ind.z_score == it->second.z);
      else CHECK(ind.z_score == doctest::Approx(it->second.z).epsilon(1e-9));
      CHECK(flagged.count(i) == static_cast<std::size_t>(it->second.flagged));
      total += static_cast<std::size_t>(ind.count);
      flags += it->second.flagged;
    }
    CHECK(total == known);
    CHECK(report.flags.size() == flags);
  }
}
