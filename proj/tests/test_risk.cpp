#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cntmf/dsl.hpp"
#include "cntmf/risk.hpp"
#include "helpers.hpp"

using namespace cntmf;

namespace {

ScoreInputs inputs(double ts, double ei, double rc, double p) {
    ScoreInputs in;
    in.technical_severity = ts;
    in.economic_impact = ei;
    in.regulatory_consequence = rc;
    in.exploit_probability = p;
    return in;
}

Threat dummy_threat(std::string target, ThreatCategory category) {
    Threat t;
    t.target = std::move(target);
    t.category = category;
    t.id = t.target + ":" + std::string(category.code()) + ":1";
    return t;
}

}  // namespace

TEST_CASE("the three worked scores reproduce exactly at one decimal") {
    struct Case {
        ScoreInputs in;
        double expected;
        const char* formatted;
        Band band;
    };
    const Case cases[] = {
        {inputs(9, 8, 7, 0.7), 16.8, "16.8", Band::High},
        {inputs(8.5, 7, 6, 0.6), 12.9, "12.9", Band::High},
        {inputs(9, 10, 8, 0.8), 21.6, "21.6", Band::High},
    };
    for (const Case& c : cases) {
        const double score = risk_score(c.in);
        CHECK(score == Catch::Approx(c.expected).margin(0.05));
        CHECK(format_score(score) == c.formatted);
        CHECK(band(score) == c.band);
    }
}

TEST_CASE("zero probability annihilates the score") {
    CHECK(risk_score(inputs(10, 10, 10, 0)) == 0.0);
    CHECK(band(0.0) == Band::Low);
}

TEST_CASE("out-of-range inputs raise errors naming the field") {
    CHECK_THROWS_WITH(risk_score(inputs(10.5, 5, 5, 0.5)),
                      Catch::Matchers::ContainsSubstring("technical_severity"));
    CHECK_THROWS_WITH(risk_score(inputs(5, -1, 5, 0.5)),
                      Catch::Matchers::ContainsSubstring("economic_impact"));
    CHECK_THROWS_WITH(risk_score(inputs(5, 5, 11, 0.5)),
                      Catch::Matchers::ContainsSubstring("regulatory_consequence"));
    CHECK_THROWS_WITH(risk_score(inputs(5, 5, 5, 1.5)),
                      Catch::Matchers::ContainsSubstring("exploit_probability"));
}

TEST_CASE("band boundaries follow the quoted definition") {
    CHECK(band(4.999) == Band::Low);
    CHECK(band(5.0) == Band::Medium);
    CHECK(band(10.0) == Band::Medium);
    CHECK(band(10.001) == Band::High);
    CHECK(band(16.8) == Band::High);
    CHECK(band(0.0) == Band::Low);
}

TEST_CASE("economic impact anchors and interior bands") {
    CHECK(economic_impact_from_loss(15'000'000) == 10.0);
    CHECK(economic_impact_from_loss(7'000'000) == 8.0);
    CHECK(economic_impact_from_loss(0) == 0.0);
    CHECK(economic_impact_from_loss(500'000) == 6.0);
    CHECK(economic_impact_from_loss(999) == 0.0);
    CHECK(economic_impact_from_loss(1'000) == 2.0);
    CHECK(economic_impact_from_loss(10'000) == 4.0);
    CHECK(economic_impact_from_loss(1'000'000) == 7.0);
    CHECK(economic_impact_from_loss(10'000'000) == 8.0);   // closed upper edge
    CHECK(economic_impact_from_loss(10'000'001) == 10.0);
    CHECK_THROWS_AS(economic_impact_from_loss(-1), std::out_of_range);
}

TEST_CASE("economic impact is monotone over 1000 random loss pairs") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> loss(0.0, 30'000'000.0);
    for (int i = 0; i < 1000; ++i) {
        double a = loss(rng);
        double b = loss(rng);
        if (a > b) std::swap(a, b);
        CHECK(economic_impact_from_loss(a) <= economic_impact_from_loss(b));
    }
}

TEST_CASE("default probabilities follow the pattern table") {
    SystemModel m;
    m.name = "m";
    Element bridge;
    bridge.id = "hop";
    bridge.kind = ElementKind::DataFlow;
    bridge.source = bridge.target = "vault";
    bridge.tags.insert("bridge");
    Element oracle;
    oracle.id = "feed";
    oracle.name = "Feed";
    oracle.kind = ElementKind::ExternalEntity;
    oracle.variant = BlockchainVariant::Oracle;
    Element vault;
    vault.id = "vault";
    vault.name = "Vault";
    vault.kind = ElementKind::DataStore;
    vault.layer = Layer::Infrastructure;
    vault.tags.insert("mpc");
    Element plain;
    plain.id = "svc";
    plain.name = "Svc";
    plain.kind = ElementKind::Process;
    plain.layer = Layer::Application;
    m.elements = {bridge, oracle, vault, plain};

    CHECK(default_probability(dummy_threat("hop", StrideCategory::Tampering), m) == 0.7);
    CHECK(default_probability(
              dummy_threat("feed", CryptoqCategory::ReentrancyOracleManipulation), m) == 0.6);
    CHECK(default_probability(dummy_threat("vault", StrideCategory::Tampering), m) == 0.8);
    CHECK(default_probability(dummy_threat("vault", CryptoqCategory::Collusion), m) == 0.8);
    CHECK(default_probability(dummy_threat("svc", StrideCategory::Spoofing), m) == 0.5);
    // Non-key-compromise categories on infrastructure fall through.
    CHECK(default_probability(dummy_threat("vault", StrideCategory::Repudiation), m) == 0.5);
}

TEST_CASE("score_all resolves the worked oracle threat to 12.9 High") {
    const auto parsed = parse_model(testutil::fixture("defi_integration.cntmf"));
    REQUIRE(parsed.ok());
    const auto threats = enumerate_threats(*parsed.model);
    const OverrideSet overrides = parse_overrides(testutil::fixture("defi_overrides.json"));

    const auto scored = score_all(threats, *parsed.model, overrides);
    const auto it = std::find_if(scored.begin(), scored.end(), [](const ScoredThreat& st) {
        return st.threat.id == "oracle:C-ROM:1";
    });
    REQUIRE(it != scored.end());
    CHECK(format_score(it->score) == "12.9");
    CHECK(it->band == Band::High);
    CHECK(it->inputs.ts_provenance == Provenance::Override);
    CHECK(it->inputs.ei_provenance == Provenance::Override);
    CHECK(it->inputs.rc_provenance == Provenance::Override);
    CHECK(it->inputs.p_provenance == Provenance::Default);
    CHECK(it->inputs.exploit_probability == 0.6);
}

TEST_CASE("value at risk feeds the economic impact default") {
    const auto parsed = parse_model(testutil::fixture("defi_integration.cntmf"));
    REQUIRE(parsed.ok());
    const auto threats = enumerate_threats(*parsed.model);
    const auto scored = score_all(threats, *parsed.model, {});
    const auto it = std::find_if(scored.begin(), scored.end(), [](const ScoredThreat& st) {
        return st.threat.target == "chain_ledger";
    });
    REQUIRE(it != scored.end());
    CHECK(it->inputs.economic_impact == 8.0);  // var=7,000,000
    CHECK(it->inputs.ei_provenance == Provenance::DerivedFromValueAtRisk);
    CHECK(it->inputs.technical_severity == 5.0);
    CHECK(it->inputs.ts_provenance == Provenance::Default);
}

TEST_CASE("score_all edge cases") {
    SECTION("empty threat list") {
        SystemModel m;
        m.name = "m";
        CHECK(score_all({}, m, {}).empty());
    }
    SECTION("unknown override ids are rejected and listed") {
        SystemModel m;
        m.name = "m";
        OverrideSet overrides;
        overrides.by_threat_id["nope:S-TAM:1"] = {};
        CHECK_THROWS_WITH(score_all({}, m, overrides),
                          Catch::Matchers::ContainsSubstring("nope:S-TAM:1"));
    }
    SECTION("suppressed threats are dropped") {
        const auto parsed = parse_model("system \"s\"\nprocess p \"P\" layer=app\n");
        REQUIRE(parsed.ok());
        const auto threats = enumerate_threats(*parsed.model);
        REQUIRE(threats.size() == 6);
        OverrideSet overrides;
        Override o;
        o.suppress = true;
        overrides.by_threat_id["p:S-TAM:1"] = o;
        const auto scored = score_all(threats, *parsed.model, overrides);
        CHECK(scored.size() == 5);
        for (const ScoredThreat& st : scored) CHECK(st.threat.id != "p:S-TAM:1");
    }
    SECTION("out-of-range override values are rejected") {
        const auto parsed = parse_model("system \"s\"\nprocess p \"P\" layer=app\n");
        REQUIRE(parsed.ok());
        const auto threats = enumerate_threats(*parsed.model);
        OverrideSet overrides;
        Override o;
        o.p = 1.5;
        overrides.by_threat_id["p:S-TAM:1"] = o;
        CHECK_THROWS_AS(score_all(threats, *parsed.model, overrides), std::out_of_range);
    }
}

TEST_CASE("score scales linearly in probability") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> component(0.0, 10.0);
    std::uniform_real_distribution<double> prob(0.01, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double ts = component(rng), ei = component(rng), rc = component(rng);
        const double p = prob(rng);
        const double k = std::uniform_real_distribution<double>(0.0, 1.0 / p)(rng);
        const double direct = risk_score(inputs(ts, ei, rc, std::min(1.0, k * p)));
        const double scaled = k * risk_score(inputs(ts, ei, rc, p));
        if (k * p <= 1.0) {
            CHECK(direct == Catch::Approx(scaled).margin(1e-9));
        }
    }
}

TEST_CASE("prioritize orders by score, probability, target, category") {
    const auto parsedm = parse_model("system \"s\"\nprocess a \"A\" layer=app\nprocess b \"B\" layer=app\n");
    REQUIRE(parsedm.ok());

    auto scored_with = [](std::string target, ThreatCategory cat, double ts, double p) {
        return make_scored(dummy_threat(std::move(target), cat), inputs(ts, 5, 5, p));
    };

    SECTION("worked scores keep their order") {
        std::vector<ScoredThreat> scored{
            make_scored(dummy_threat("a", StrideCategory::Spoofing), inputs(8.5, 7, 6, 0.6)),
            make_scored(dummy_threat("b", StrideCategory::Tampering), inputs(9, 10, 8, 0.8)),
            make_scored(dummy_threat("c", StrideCategory::Repudiation), inputs(9, 8, 7, 0.7)),
        };
        const auto ordered = prioritize(scored);
        CHECK(format_score(ordered[0].score) == "21.6");
        CHECK(format_score(ordered[1].score) == "16.8");
        CHECK(format_score(ordered[2].score) == "12.9");
    }
    SECTION("probability breaks score ties") {
        // Binary-exact tie: 15 * 0.5 == 7.5 and 30 * 0.25 == 7.5.
        auto high_p = make_scored(dummy_threat("a", StrideCategory::Spoofing),
                                  inputs(5, 5, 5, 0.5));
        auto low_p = make_scored(dummy_threat("a", StrideCategory::Tampering),
                                 inputs(10, 10, 10, 0.25));
        REQUIRE(low_p.score == high_p.score);
        const auto ordered = prioritize({low_p, high_p});
        CHECK(ordered[0].inputs.exploit_probability == 0.5);
    }
    SECTION("target id breaks remaining ties") {
        auto first = scored_with("b", StrideCategory::Spoofing, 5, 0.5);
        auto second = scored_with("a", StrideCategory::Spoofing, 5, 0.5);
        const auto ordered = prioritize({first, second});
        CHECK(ordered[0].threat.target == "a");
    }
    SECTION("category code breaks the last tie") {
        auto tam = scored_with("a", StrideCategory::Tampering, 5, 0.5);
        auto spo = scored_with("a", StrideCategory::Spoofing, 5, 0.5);
        const auto ordered = prioritize({tam, spo});
        CHECK(ordered[0].threat.category == ThreatCategory(StrideCategory::Spoofing));
    }
}

TEST_CASE("prioritize is a permutation and idempotent") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> component(0.0, 10.0);
    std::uniform_real_distribution<double> prob(0.0, 1.0);
    std::vector<ScoredThreat> scored;
    for (int i = 0; i < 200; ++i) {
        scored.push_back(make_scored(
            dummy_threat("t" + std::to_string(i % 17), StrideCategory::Spoofing),
            inputs(component(rng), component(rng), component(rng), prob(rng))));
    }
    const auto once = prioritize(scored);
    const auto twice = prioritize(once);
    CHECK(once == twice);
    CHECK(once.size() == scored.size());
    auto sorted_ids = [](std::vector<ScoredThreat> v) {
        std::vector<std::string> ids;
        for (const auto& st : v) ids.push_back(st.threat.id + format_score(st.score));
        std::sort(ids.begin(), ids.end());
        return ids;
    };
    CHECK(sorted_ids(once) == sorted_ids(scored));
}

TEST_CASE("heatmap placement follows the bin arithmetic") {
    const auto st = make_scored(dummy_threat("t", StrideCategory::Spoofing), inputs(9, 8, 7, 0.7));
    const Heatmap map = build_heatmap({st});
    // p = 0.7 -> [0.6, 0.8); mean impact = 8.0 -> [8, 10].
    CHECK(map.cells[3][4].threat_ids == std::vector<std::string>{"t:S-SPO:1"});
    CHECK(map.cells[3][4].dominant == Band::High);
    CHECK(map.total == 1);

    std::size_t occupied = 0;
    for (const auto& row : map.cells) {
        for (const auto& cell : row) occupied += cell.threat_ids.size();
    }
    CHECK(occupied == 1);
}

TEST_CASE("bin edges put boundary values in the upper bin") {
    CHECK(probability_bin(0.6) == 3);
    CHECK(probability_bin(0.8) == 4);
    CHECK(probability_bin(1.0) == 4);
    CHECK(probability_bin(0.0) == 0);
    CHECK(probability_bin(0.19) == 0);
    CHECK(impact_bin(8.0) == 4);
    CHECK(impact_bin(10.0) == 4);
    CHECK(impact_bin(7.99) == 3);
    CHECK(impact_bin(0.0) == 0);
}

TEST_CASE("empty heatmap has 25 empty cells") {
    const Heatmap map = build_heatmap({});
    CHECK(map.total == 0);
    for (const auto& row : map.cells) {
        for (const auto& cell : row) {
            CHECK(cell.threat_ids.empty());
            CHECK_FALSE(cell.dominant.has_value());
        }
    }
}

TEST_CASE("cohabiting threats are sorted inside their cell") {
    const auto a = make_scored(dummy_threat("zz", StrideCategory::Spoofing), inputs(9, 8, 7, 0.7));
    const auto b = make_scored(dummy_threat("aa", StrideCategory::Spoofing), inputs(9, 8, 7, 0.7));
    const Heatmap map = build_heatmap({a, b});
    CHECK(map.cells[3][4].threat_ids ==
          std::vector<std::string>{"aa:S-SPO:1", "zz:S-SPO:1"});
}

TEST_CASE("heatmap partitions any scored set") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> component(0.0, 10.0);
    std::uniform_real_distribution<double> prob(0.0, 1.0);
    for (int round = 0; round < 50; ++round) {
        std::vector<ScoredThreat> scored;
        const int n = std::uniform_int_distribution<int>(0, 120)(rng);
        for (int i = 0; i < n; ++i) {
            scored.push_back(make_scored(
                dummy_threat("t" + std::to_string(i), StrideCategory::Spoofing),
                inputs(component(rng), component(rng), component(rng), prob(rng))));
        }
        const Heatmap map = build_heatmap(scored);
        std::size_t occupied = 0;
        for (const auto& row : map.cells) {
            for (const auto& cell : row) occupied += cell.threat_ids.size();
        }
        CHECK(occupied == scored.size());
        CHECK(map.total == scored.size());
    }
}

TEST_CASE("band field always matches the recomputed band") {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> component(0.0, 10.0);
    std::uniform_real_distribution<double> prob(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const auto st = make_scored(
            dummy_threat("t", StrideCategory::Spoofing),
            inputs(component(rng), component(rng), component(rng), prob(rng)));
        CHECK(st.band == band(st.score));
    }
}
