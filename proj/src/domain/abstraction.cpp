#include "fusion/domain/abstraction.hpp"

#include <array>
#include <set>
#include <sstream>

namespace fusion::domain {
namespace {

constexpr std::array<std::string_view, kContinentCount> kContinentNames{
    "Africa", "Asia", "Europe", "NorthAmerica", "SouthAmerica", "Oceania", "Unknown"};

// Cyprus is grouped with Europe (EU member state); Turkey with Asia.
constexpr std::string_view kAfrica =
    "DZ AO BJ BW BF BI CV CM CF TD KM CG CD CI DJ EG GQ ER SZ ET GA GM GH GN GW KE LS LR LY MG "
    "MW ML MR MU YT MA MZ NA NE NG RE RW SH ST SN SC SL SO ZA SS SD TZ TG TN UG EH ZM ZW IO";
constexpr std::string_view kAsia =
    "AF AM AZ BH BD BT BN KH CN GE HK IN ID IR IQ IL JP JO KZ KW KG LA LB MO MY MV MN MM NP KP "
    "OM PK PS PH QA SA SG KR LK SY TW TJ TH TL TR TM AE UZ VN YE";
constexpr std::string_view kEurope =
    "AX AL AD AT BY BE BA BG HR CY CZ DK EE FO FI FR DE GI GR GG VA HU IS IE IM IT JE XK LV LI "
    "LT LU MT MD MC ME NL MK NO PL PT RO RU SM RS SK SI ES SJ SE CH UA GB";
constexpr std::string_view kNorthAmerica =
    "AI AG AW BS BB BZ BM BQ VG CA KY CR CU CW DM DO SV GL GD GP GT HT HN JM MQ MX MS NI PA PR "
    "BL KN LC MF PM VC SX TT TC US VI UM";
constexpr std::string_view kSouthAmerica = "AR BO BR CL CO EC FK GF GY PY PE SR UY VE GS";
constexpr std::string_view kOceania =
    "AS AU CK FJ PF GU KI MH FM NR NC NZ NU NF MP PW PG PN WS SB TK TO TV VU WF CX CC";

void add_all(ContinentTable& table, std::string_view codes, Continent c) {
  std::istringstream in{std::string(codes)};
  std::string code;
  while (in >> code) table.emplace(code, c);
}

}  // namespace

std::string_view to_string(Continent c) noexcept { return kContinentNames[static_cast<int>(c)]; }

std::optional<Continent> parse_continent(std::string_view s) noexcept {
  for (int i = 0; i < kContinentCount; ++i)
    if (kContinentNames[i] == s) return static_cast<Continent>(i);
  return std::nullopt;
}

const ContinentTable& default_continents() {
  static const ContinentTable table = [] {
    ContinentTable t;
    add_all(t, kAfrica, Continent::Africa);
    add_all(t, kAsia, Continent::Asia);
    add_all(t, kEurope, Continent::Europe);
    add_all(t, kNorthAmerica, Continent::NorthAmerica);
    add_all(t, kSouthAmerica, Continent::SouthAmerica);
    add_all(t, kOceania, Continent::Oceania);
    return t;
  }();
  return table;
}

Continent continent_of(std::string_view country, const ContinentTable& table) {
  auto it = table.find(country);
  return it == table.end() ? Continent::Unknown : it->second;
}

std::vector<std::string> FirearmTaxonomy::violations() const {
  std::vector<std::string> out;
  if (top10.size() != 10) out.push_back("top10 must list exactly 10 classes, got " + std::to_string(top10.size()));
  std::set<std::string> seen;
  for (const auto& c : top10) {
    if (c.empty()) out.push_back("top10 contains an empty class name");
    if (c == kOtherClass) out.push_back("top10 must not contain OTHER");
    if (!seen.insert(c).second) out.push_back("duplicate class '" + c + "'");
  }
  for (const auto& [model, cls] : model_to_class)
    if (cls != kOtherClass && !seen.contains(cls))
      out.push_back("model '" + model + "' maps to unknown class '" + cls + "'");
  return out;
}

bool FirearmTaxonomy::is_class(std::string_view c) const {
  for (const auto& t : top10)
    if (t == c) return true;
  return false;
}

std::string FirearmTaxonomy::classify(const std::optional<std::string>& model,
                                      const std::optional<std::string>& type) const {
  if (model) {
    if (auto it = model_to_class.find(*model); it != model_to_class.end()) return it->second;
  }
  if (type && is_class(*type)) return *type;
  return std::string(kOtherClass);
}

std::optional<int> AbstractedEntity::quarter_of_year() const {
  if (!quarter || quarter->size() != 7) return std::nullopt;
  return (*quarter)[6] - '0';
}

std::string quarter_label(const Date& d) { return std::to_string(d.year) + "-Q" + std::to_string(d.quarter()); }

AbstractedEntity abstract_entity(const EntityRecord& e, const FirearmTaxonomy& taxonomy,
                                 const ContinentTable& continents) {
  AbstractedEntity a;
  a.entity_id = e.id;
  if (e.date) {
    a.quarter = quarter_label(*e.date);
    a.year = e.date->year;
  }
  a.continent = e.country ? continent_of(*e.country, continents) : Continent::Unknown;
  a.firearm_class = taxonomy.classify(e.firearm_model, e.firearm_type);
  return a;
}

}  // namespace fusion::domain
