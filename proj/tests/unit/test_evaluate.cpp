#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fusion/error.hpp"
#include "fusion/evaluate/situation.hpp"
#include "oracles/bayes_oracle.hpp"

using namespace fusion;
using namespace fusion::evaluate;

namespace {

NetworkSpec chain_ab() {
  NetworkSpec s;
  s.nodes.push_back({"A", {"t", "f"}, {}, {{{}, {0.3, 0.7}}}});
  s.nodes.push_back({"B", {"t", "f"}, {"A"}, {{{"t"}, {0.9, 0.1}}, {{"f"}, {0.1, 0.9}}}});
  return s;
}

BayesNet fixture_net() {
  return BayesNet::from_spec(parse_network_file(std::string(FUSION_DATA_DIR) + "/networks/modus_operandi.net"));
}

std::map<std::size_t, std::size_t> resolve(const BayesNet& net, const Evidence& ev) {
  std::map<std::size_t, std::size_t> out;
  for (const auto& [n, s] : ev) out[net.require(n)] = *net.state_index(net.require(n), s);
  return out;
}

std::vector<double> oracle_cause(const BayesNet& net, const Evidence& ev) {
  return *oracle::enumerate_posterior(net, net.require("cause"), resolve(net, ev));
}

bool has_kind(const std::vector<Violation>& vs, ViolationKind k) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.kind == k; });
}

const Evidence kDarknetOffer{{"channel", "darknet"}, {"payment", "crypto"}, {"shipment", "parcel"}};
const Evidence kWorkshopBulk{{"firearm_type", "converted_blank"}, {"quantity", "bulk"}};

}  // namespace

TEST_CASE("validate_network") {
  CHECK(validate_network(chain_ab()).empty());

  SUBCASE("row summing to 0.9") {
    auto s = chain_ab();
    s.nodes[1].rows[{"f"}] = {0.1, 0.8};
    const auto v = validate_network(s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::normalization);
    CHECK(v[0].node == "B");
    CHECK(v[0].row == "A=f");
  }
  SUBCASE("two-node cycle") {
    auto s = chain_ab();
    s.nodes[0].parents = {"B"};
    const auto v = validate_network(s);
    CHECK(has_kind(v, ViolationKind::cycle));
    CHECK(std::count_if(v.begin(), v.end(), [](auto& x) { return x.kind == ViolationKind::cycle; }) == 1);
  }
  SUBCASE("violations are reported exhaustively") {
    auto s = chain_ab();
    s.nodes[0].rows[{}] = {0.5, 0.6};
    s.nodes[1].rows.erase({"t"});
    s.nodes.push_back({"C", {"x", "x"}, {"Z"}, {}});
    const auto v = validate_network(s);
    CHECK(has_kind(v, ViolationKind::normalization));
    CHECK(has_kind(v, ViolationKind::missing_row));
    CHECK(has_kind(v, ViolationKind::duplicate_state));
    CHECK(has_kind(v, ViolationKind::unknown_parent));
    CHECK_THROWS_AS(BayesNet::from_spec(s), Error);
    try {
      BayesNet::from_spec(s);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InvalidNetwork);
      CHECK(e.details().size() == v.size());
    }
  }
  SUBCASE("arity, negative and unexpected rows") {
    auto s = chain_ab();
    s.nodes[1].rows[{"t"}] = {1.0};
    s.nodes[1].rows[{"f"}] = {1.2, -0.2};
    s.nodes[1].rows[{"maybe"}] = {0.5, 0.5};
    const auto v = validate_network(s);
    CHECK(has_kind(v, ViolationKind::row_arity));
    CHECK(has_kind(v, ViolationKind::negative_probability));
    CHECK(has_kind(v, ViolationKind::unexpected_row));
  }
}

TEST_CASE("network text format") {
  const auto net = fixture_net();
  CHECK(net.size() == 7);
  CHECK(net.states(net.require("cause")).size() == 4);
  CHECK(net.parents(net.require("priority")).size() == 2);

  const std::string text = serialize_network(net.to_spec());
  std::istringstream in(text);
  const auto again = BayesNet::from_spec(parse_network(in));
  CHECK(serialize_network(again.to_spec()) == text);
  for (std::size_t i = 0; i < net.size(); ++i) CHECK(again.cpt(i) == net.cpt(i));

  std::istringstream bad1("node a {x, y}\nprob b = 1\n");
  CHECK_THROWS_AS(parse_network(bad1), Error);
  std::istringstream bad2("node a x, y\n");
  CHECK_THROWS_AS(parse_network(bad2), Error);
  std::istringstream bad3("node a {x, y}\nprob a = 0.5, zero\n");
  CHECK_THROWS_AS(parse_network(bad3), Error);
  std::istringstream bad4("frobnicate\n");
  CHECK_THROWS_AS(parse_network(bad4), Error);
}

TEST_CASE("infer_posterior hand examples") {
  const auto net = BayesNet::from_spec(chain_ab());
  CHECK(infer_posterior(net, "A", {}) == std::vector<double>{0.3, 0.7});
  const auto b = infer_posterior(net, "B", {});
  CHECK(b[0] == doctest::Approx(0.3 * 0.9 + 0.7 * 0.1).epsilon(1e-14));
  CHECK(b[0] + b[1] == doctest::Approx(1.0).epsilon(1e-15));

  const auto row = infer_posterior(net, "B", {{"A", "f"}});
  CHECK(row[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(row[1] == doctest::Approx(0.9).epsilon(1e-15));

  const auto fixture = fixture_net();
  const auto pr = infer_posterior(fixture, "priority", {{"firearm_type", "military"}, {"quantity", "bulk"}, {"channel", "darknet"}});
  CHECK(pr[0] == doctest::Approx(0.95).epsilon(1e-12));

  CHECK_THROWS_AS(infer_posterior(net, "A", {{"A", "t"}}), Error);
  CHECK_THROWS_AS(infer_posterior(net, "C", {}), Error);
  CHECK_THROWS_AS(infer_posterior(net, "A", {{"B", "maybe"}}), Error);
  CHECK_THROWS_AS(infer_posterior(net, "A", {{"Z", "t"}}), Error);
  try {
    infer_posterior(net, "A", {{"A", "t"}});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EvidenceOnQueryNode);
  }
}

TEST_CASE("zero-probability evidence is flagged") {
  NetworkSpec s;
  s.nodes.push_back({"A", {"t", "f"}, {}, {{{}, {1.0, 0.0}}}});
  s.nodes.push_back({"B", {"t", "f"}, {"A"}, {{{"t"}, {1.0, 0.0}}, {{"f"}, {0.5, 0.5}}}});
  const auto net = BayesNet::from_spec(s);
  try {
    infer_posterior(net, "A", {{"B", "f"}});
    FAIL("expected InconsistentEvidence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InconsistentEvidence);
  }
}

TEST_CASE("variable elimination equals enumeration on random networks") {
  std::mt19937 rng(77);
  int checked = 0, inconsistent = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto net = BayesNet::from_spec(oracle::random_network(rng));
    const auto query = std::uniform_int_distribution<std::size_t>(0, net.size() - 1)(rng);
    Evidence ev;
    std::map<std::size_t, std::size_t> ev_idx;
    for (std::size_t i = 0; i < net.size(); ++i) {
      if (i == query || !std::bernoulli_distribution(0.35)(rng)) continue;
      const auto s = std::uniform_int_distribution<std::size_t>(0, net.cardinality(i) - 1)(rng);
      ev[net.name(i)] = net.states(i)[s];
      ev_idx[i] = s;
    }
    const auto expected = oracle::enumerate_posterior(net, query, ev_idx);
    if (!expected) {
      ++inconsistent;
      CHECK_THROWS_AS(infer_posterior(net, net.name(query), ev), Error);
      continue;
    }
    const auto got = infer_posterior(net, net.name(query), ev);
    REQUIRE(got.size() == expected->size());
    for (std::size_t s = 0; s < got.size(); ++s) CHECK(std::fabs(got[s] - (*expected)[s]) <= 1e-9);

    // Reverse and shuffled elimination orders give the same posterior.
    std::vector<std::string> hidden;
    for (std::size_t i = 0; i < net.size(); ++i)
      if (i != query && !ev_idx.contains(i)) hidden.push_back(net.name(i));
    std::shuffle(hidden.begin(), hidden.end(), rng);
    const auto other = infer_posterior(net, net.name(query), ev, InferenceOptions{hidden});
    for (std::size_t s = 0; s < got.size(); ++s) CHECK(std::fabs(got[s] - other[s]) <= 1e-12);
    ++checked;
  }
  CHECK(checked > 60);
  MESSAGE("consistent=" << checked << " inconsistent=" << inconsistent);
}

TEST_CASE("elimination order validation") {
  const auto net = BayesNet::from_spec(chain_ab());
  CHECK_THROWS_AS(infer_posterior(net, "B", {}, InferenceOptions{{"B"}}), Error);
  CHECK_THROWS_AS(infer_posterior(net, "B", {}, InferenceOptions{{"A", "A"}}), Error);
  CHECK(infer_posterior(net, "B", {}, InferenceOptions{{"A"}}).size() == 2);
}

TEST_CASE("event_priority on the fixture network") {
  const auto net = fixture_net();
  const auto prior = *oracle::enumerate_posterior(net, net.require("priority"), {});
  CHECK(std::fabs(event_priority(net, {}) - prior[0]) <= 1e-9);
  const auto offer = *oracle::enumerate_posterior(net, net.require("priority"), resolve(net, kDarknetOffer));
  CHECK(std::fabs(event_priority(net, kDarknetOffer) - offer[0]) <= 1e-9);

  try {
    event_priority(net, {{"priority", "high"}});
    FAIL("expected EvidenceOnQueryNode");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EvidenceOnQueryNode);
  }
  try {
    event_priority(BayesNet::from_spec(chain_ab()), {});
    FAIL("expected MissingPriorityNode");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingPriorityNode);
  }
  SituationConfig renamed;
  renamed.high_state = "urgent";
  CHECK_THROWS_AS(event_priority(net, {}, renamed), Error);
}

TEST_CASE("event_similarity") {
  const auto net = fixture_net();
  CHECK(event_similarity(net, kDarknetOffer, kDarknetOffer) == 1.0);
  CHECK(event_similarity(net, {{"cause", "private_seller"}}, {{"cause", "organized_network"}}) == 0.0);

  const double expected = oracle::cosine(oracle_cause(net, kDarknetOffer), oracle_cause(net, kWorkshopBulk));
  const double got = event_similarity(net, kDarknetOffer, kWorkshopBulk);
  CHECK(std::fabs(got - expected) <= 1e-9);
  CHECK(got == event_similarity(net, kWorkshopBulk, kDarknetOffer));
  CHECK(got > 0.0);
  CHECK(got < 1.0);

  try {
    event_similarity(BayesNet::from_spec(chain_ab()), {}, {});
    FAIL("expected MissingCauseNode");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingCauseNode);
  }
}

TEST_CASE("similarity properties on random evidence") {
  const auto net = fixture_net();
  std::mt19937 rng(9);
  auto random_evidence = [&] {
    Evidence ev;
    for (std::size_t i = 0; i < net.size(); ++i)
      if (std::bernoulli_distribution(0.3)(rng))
        ev[net.name(i)] = net.states(i)[std::uniform_int_distribution<std::size_t>(0, net.cardinality(i) - 1)(rng)];
    return ev;
  };
  for (int t = 0; t < 200; ++t) {
    const auto a = random_evidence(), b = random_evidence();
    double ab, ba;
    try {
      ab = event_similarity(net, a, b);
      ba = event_similarity(net, b, a);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::InconsistentEvidence);
      continue;
    }
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(std::fabs(event_similarity(net, a, a) - 1.0) <= 1e-12);
  }
}

TEST_CASE("query_similar_events") {
  const auto net = fixture_net();
  const std::vector<std::pair<std::string, Evidence>> raw{
      {"ev-05", kWorkshopBulk},
      {"ev-01", kDarknetOffer},
      {"ev-03", {{"channel", "physical"}, {"payment", "cash"}}},
      {"ev-02", {{"firearm_type", "military"}, {"quantity", "bulk"}}},
      {"ev-04", {{"shipment", "courier"}}},
  };
  std::vector<EventObservation> store;
  for (const auto& [id, ev] : raw) store.push_back(observe_event(net, id, ev));

  const auto top = query_similar_events(net, kDarknetOffer, store, 5);
  REQUIRE(top.size() == 5);
  CHECK(top[0].id == "ev-01");
  CHECK(top[0].similarity == 1.0);
  CHECK(query_similar_events(net, kDarknetOffer, store, 0).empty());
  CHECK(query_similar_events(net, kDarknetOffer, store, 2).size() == 2);

  // Oracle: recompute every similarity by enumeration and sort.
  const auto trace = oracle_cause(net, kDarknetOffer);
  std::vector<std::pair<double, std::string>> expected;
  for (const auto& [id, ev] : raw) expected.emplace_back(oracle::cosine(trace, oracle_cause(net, ev)), id);
  std::sort(expected.begin(), expected.end(), [](auto& x, auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  for (std::size_t i = 0; i < top.size(); ++i) {
    CHECK(top[i].id == expected[i].second);
    CHECK(std::fabs(top[i].similarity - expected[i].first) <= 1e-9);
  }

  auto reversed = store;
  std::reverse(reversed.begin(), reversed.end());
  CHECK(query_similar_events(net, kDarknetOffer, reversed, 5) == top);

  // Equal similarities fall back to id order.
  std::vector<EventObservation> twins{observe_event(net, "b", kWorkshopBulk), observe_event(net, "a", kWorkshopBulk)};
  const auto tied = query_similar_events(net, kWorkshopBulk, twins, 2);
  CHECK(tied[0].id == "a");
  CHECK(tied[1].id == "b");

  const auto obs = observe_event(net, "x", kDarknetOffer);
  CHECK(obs.priority == event_priority(net, kDarknetOffer));
  CHECK(obs.cause_posterior == cause_posterior(net, kDarknetOffer));
}
