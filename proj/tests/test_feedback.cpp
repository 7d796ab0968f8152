#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cntmf/feedback.hpp"
#include "helpers.hpp"

using namespace cntmf;

namespace {

IncidentRecord record(std::string id, UtcSeconds occurred, UtcSeconds detected,
                      std::optional<UtcSeconds> remediated, ThreatCategory category,
                      double loss = 0.0, IncidentSource source = IncidentSource::IncidentReport) {
    IncidentRecord r;
    r.id = std::move(id);
    r.occurred_at = occurred;
    r.detected_at = detected;
    r.remediated_at = remediated;
    r.category = category;
    r.loss_usd = loss;
    r.source = source;
    return r;
}

constexpr UtcSeconds kHour = 3600;
const UtcSeconds kQ1 = *parse_utc("2025-01-15T00:00:00Z");

}  // namespace

TEST_CASE("ISO-8601 parsing and formatting") {
    const auto t = parse_utc("2025-04-03T10:30:05Z");
    REQUIRE(t.has_value());
    CHECK(format_utc(*t) == "2025-04-03T10:30:05Z");
    CHECK(parse_utc("2025-04-03 10:30:05Z") == std::nullopt);
    CHECK(parse_utc("2025-13-01T00:00:00Z") == std::nullopt);
    CHECK(parse_utc("2025-02-29T00:00:00Z") == std::nullopt);  // 2025 is not a leap year
    CHECK(parse_utc("2024-02-29T00:00:00Z").has_value());
    CHECK(parse_utc("2025-04-03T24:00:00Z") == std::nullopt);
    CHECK(parse_utc("2025-04-03T10:30:05") == std::nullopt);
    CHECK(parse_utc_date("2025-04-03").has_value());
    CHECK(parse_utc_date("2025-4-3") == std::nullopt);
}

TEST_CASE("quarter parsing and ranges") {
    const auto q = parse_quarter("2025Q2");
    REQUIRE(q.has_value());
    CHECK(quarter_label(*q) == "2025Q2");
    const TimeRange range = quarter_range(*q);
    CHECK(range.contains(*parse_utc("2025-04-01T00:00:00Z")));
    CHECK(range.contains(*parse_utc("2025-06-30T23:59:59Z")));
    CHECK_FALSE(range.contains(*parse_utc("2025-07-01T00:00:00Z")));
    CHECK_FALSE(range.contains(*parse_utc("2025-03-31T23:59:59Z")));
    CHECK(parse_quarter("2025Q5") == std::nullopt);
    CHECK(parse_quarter("2025") == std::nullopt);
    CHECK(parse_quarter("25Q1") == std::nullopt);
}

TEST_CASE("ingest appends by value and validates") {
    const Ledger empty;
    const auto r1 = record("a", kQ1, kQ1 + kHour, kQ1 + 2 * kHour, StrideCategory::Tampering);

    const Ledger one = ingest_incident(empty, r1);
    CHECK(empty.records.empty());
    REQUIRE(one.records.size() == 1);

    SECTION("duplicate ids are named errors") {
        CHECK_THROWS_AS(ingest_incident(one, r1), DuplicateIdError);
    }
    SECTION("timestamp order is enforced, each direction named distinctly") {
        auto bad_detect = record("b", kQ1 + kHour, kQ1, std::nullopt, StrideCategory::Tampering);
        CHECK_THROWS_AS(ingest_incident(one, bad_detect), TimestampOrderError);
        auto bad_remediate =
            record("c", kQ1, kQ1 + 2 * kHour, kQ1 + kHour, StrideCategory::Tampering);
        CHECK_THROWS_AS(ingest_incident(one, bad_remediate), TimestampOrderError);
    }
    SECTION("negative loss never enters the ledger") {
        auto bad_loss = record("d", kQ1, kQ1, kQ1 + kHour, StrideCategory::Tampering, -5.0);
        CHECK_THROWS_AS(ingest_incident(one, bad_loss), std::invalid_argument);
    }
    SECTION("the previous records are preserved verbatim") {
        const auto r2 = record("b", kQ1, kQ1 + kHour, std::nullopt, CryptoqCategory::Collusion);
        const Ledger two = ingest_incident(one, r2);
        REQUIRE(two.records.size() == 2);
        CHECK(two.records[0] == one.records[0]);
    }
}

TEST_CASE("mttr is the mean over closed incidents") {
    Ledger ledger;
    ledger = ingest_incident(ledger, record("ten", kQ1, kQ1, kQ1 + 10 * kHour,
                                            CryptoqCategory::ReentrancyOracleManipulation));
    ledger = ingest_incident(ledger, record("thirty", kQ1, kQ1 + kHour, kQ1 + 31 * kHour,
                                            CryptoqCategory::PhishingSocialEngineering));
    const auto mean = mttr(ledger);
    REQUIRE(mean.has_value());
    CHECK(*mean == Catch::Approx(20.0 * kHour));
}

TEST_CASE("mttr is empty when only open incidents match") {
    Ledger ledger;
    ledger = ingest_incident(
        ledger, record("open", kQ1, kQ1, std::nullopt, StrideCategory::Tampering));
    CHECK_FALSE(mttr(ledger).has_value());
}

TEST_CASE("the oracle-category 12h incident meets the sub-24h target") {
    Ledger ledger;
    ledger = ingest_incident(ledger, record("a", kQ1, kQ1, kQ1 + 12 * kHour,
                                            CryptoqCategory::ReentrancyOracleManipulation));
    ledger = ingest_incident(ledger, record("b", kQ1, kQ1, kQ1 + 40 * kHour,
                                            CryptoqCategory::PhishingSocialEngineering));
    MttrFilter filter;
    filter.category = CryptoqCategory::ReentrancyOracleManipulation;
    const auto oracle_mttr = mttr(ledger, filter);
    REQUIRE(oracle_mttr.has_value());
    CHECK(*oracle_mttr == Catch::Approx(12.0 * kHour));
    CHECK(meets_mttr_target(*oracle_mttr));

    filter.category = CryptoqCategory::PhishingSocialEngineering;
    const auto phishing_mttr = mttr(ledger, filter);
    REQUIRE(phishing_mttr.has_value());
    CHECK_FALSE(meets_mttr_target(*phishing_mttr));
    CHECK_FALSE(meets_mttr_target(24.0 * kHour));  // boundary: strictly under
    CHECK(meets_mttr_target(24.0 * kHour - 1.0));
}

TEST_CASE("mttr equals a brute-force mean on randomized ledgers") {
    std::mt19937_64 rng(777);
    for (int round = 0; round < 200; ++round) {
        Ledger ledger;
        const int n = std::uniform_int_distribution<int>(0, 40)(rng);
        for (int i = 0; i < n; ++i) {
            const UtcSeconds occurred =
                kQ1 + std::uniform_int_distribution<UtcSeconds>(0, 90 * 24 * kHour)(rng);
            const UtcSeconds detected =
                occurred + std::uniform_int_distribution<UtcSeconds>(0, 48 * kHour)(rng);
            std::optional<UtcSeconds> remediated;
            if (std::uniform_int_distribution<int>(0, 3)(rng) > 0) {
                remediated =
                    detected + std::uniform_int_distribution<UtcSeconds>(0, 200 * kHour)(rng);
            }
            const auto& cats = all_categories();
            ledger = ingest_incident(
                ledger,
                record("r" + std::to_string(i), occurred, detected, remediated,
                       cats[std::uniform_int_distribution<std::size_t>(0, cats.size() - 1)(rng)]));
        }

        // Independent brute force.
        double sum = 0.0;
        int count = 0;
        for (const IncidentRecord& r : ledger.records) {
            if (r.remediated_at) {
                sum += static_cast<double>(*r.remediated_at - r.detected_at);
                ++count;
            }
        }
        const auto computed = mttr(ledger);
        if (count == 0) {
            CHECK_FALSE(computed.has_value());
        } else {
            REQUIRE(computed.has_value());
            CHECK(*computed == Catch::Approx(sum / count));
        }
    }
}

TEST_CASE("recalibration follows the blend rule") {
    Ledger ledger;
    for (int i = 0; i < 4; ++i) {
        ledger = ingest_incident(ledger, record("i" + std::to_string(i), kQ1 + i * kHour,
                                                kQ1 + i * kHour, std::nullopt,
                                                CryptoqCategory::ReentrancyOracleManipulation));
    }
    const TimeRange window = quarter_range(Quarter{2025, 1});
    const ProbabilityPriors priors = default_priors();
    REQUIRE(priors.by_category.at(CryptoqCategory::ReentrancyOracleManipulation) == 0.6);

    SECTION("worked case: prior 0.6, alpha 0.5, all incidents in one category") {
        const ProbabilityPriors updated = recalibrate(ledger, priors, window, 0.5);
        CHECK(updated.by_category.at(CryptoqCategory::ReentrancyOracleManipulation) ==
              Catch::Approx(0.8).margin(1e-12));
        // Quiet categories decay toward zero by the same formula.
        CHECK(updated.by_category.at(CryptoqCategory::Collusion) == Catch::Approx(0.4));
        CHECK(updated.by_category.at(StrideCategory::Spoofing) == Catch::Approx(0.25));
    }
    SECTION("empty window leaves priors unchanged") {
        const TimeRange empty_window = quarter_range(Quarter{2031, 1});
        CHECK(recalibrate(ledger, priors, empty_window, 0.5) == priors);
    }
    SECTION("alpha zero is the identity") {
        CHECK(recalibrate(ledger, priors, window, 0.0) == priors);
    }
    SECTION("alpha outside [0,1] is a range error") {
        CHECK_THROWS_AS(recalibrate(ledger, priors, window, 1.5), std::out_of_range);
        CHECK_THROWS_AS(recalibrate(ledger, priors, window, -0.1), std::out_of_range);
    }
}

TEST_CASE("recalibrated probabilities stay in [0,1] on random ledgers") {
    std::mt19937_64 rng(4242);
    const auto& cats = all_categories();
    for (int round = 0; round < 200; ++round) {
        Ledger ledger;
        const int n = std::uniform_int_distribution<int>(0, 30)(rng);
        for (int i = 0; i < n; ++i) {
            const UtcSeconds occurred =
                kQ1 + std::uniform_int_distribution<UtcSeconds>(0, 80 * 24 * kHour)(rng);
            ledger = ingest_incident(
                ledger,
                record("r" + std::to_string(i), occurred, occurred, std::nullopt,
                       cats[std::uniform_int_distribution<std::size_t>(0, cats.size() - 1)(rng)]));
        }
        ProbabilityPriors priors;
        for (const ThreatCategory& c : cats) {
            priors.by_category[c] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        }
        const double alpha = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const ProbabilityPriors updated =
            recalibrate(ledger, priors, quarter_range(Quarter{2025, 1}), alpha);
        for (const auto& [category, p] : updated.by_category) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
        }
    }
}

TEST_CASE("recalibration is monotone in a category's incident count") {
    const TimeRange window = quarter_range(Quarter{2025, 1});
    const ProbabilityPriors priors = default_priors();
    double previous = -1.0;
    for (int extra = 0; extra <= 6; ++extra) {
        Ledger ledger;
        // A fixed backdrop of three spoofing incidents plus `extra` collusion ones.
        for (int i = 0; i < 3; ++i) {
            ledger = ingest_incident(ledger,
                                     record("s" + std::to_string(i), kQ1, kQ1, std::nullopt,
                                            StrideCategory::Spoofing));
        }
        for (int i = 0; i < extra; ++i) {
            ledger = ingest_incident(ledger,
                                     record("c" + std::to_string(i), kQ1, kQ1, std::nullopt,
                                            CryptoqCategory::Collusion));
        }
        const ProbabilityPriors updated = recalibrate(ledger, priors, window, 0.4);
        const double p = updated.by_category.at(CryptoqCategory::Collusion);
        CHECK(p >= previous);
        previous = p;
    }
}

TEST_CASE("quarterly snapshot aggregates counts, losses and MTTR") {
    Ledger ledger;
    ledger = ingest_incident(ledger,
                             record("a", kQ1, kQ1, kQ1 + 10 * kHour,
                                    CryptoqCategory::ReentrancyOracleManipulation, 1'000'000,
                                    IncidentSource::MonitoringAlert));
    ledger = ingest_incident(ledger,
                             record("b", kQ1 + kHour, kQ1 + 2 * kHour, std::nullopt,
                                    CryptoqCategory::PhishingSocialEngineering, 3'000'000,
                                    IncidentSource::BugBounty));
    // Outside the quarter; must be ignored.
    const UtcSeconds q3 = *parse_utc("2025-08-01T00:00:00Z");
    ledger = ingest_incident(
        ledger, record("z", q3, q3, std::nullopt, StrideCategory::Tampering, 9'000'000));

    const MetricsSnapshot snap = quarterly_snapshot(ledger, Quarter{2025, 1});
    CHECK(snap.quarter == "2025Q1");
    CHECK(snap.incident_count == 2);
    CHECK(snap.open_count == 1);
    CHECK(snap.total_loss_usd == 4'000'000.0);
    CHECK(snap.mean_loss_usd == 2'000'000.0);
    REQUIRE(snap.mttr_seconds.has_value());
    CHECK(*snap.mttr_seconds == Catch::Approx(10.0 * kHour));
    CHECK(snap.by_source.at("monitoring_alert") == 1);
    CHECK(snap.by_source.at("bug_bounty") == 1);
    REQUIRE(snap.mttr_by_category.size() == 1);
    CHECK(snap.mttr_by_category.at(CryptoqCategory::ReentrancyOracleManipulation) ==
          Catch::Approx(10.0 * kHour));
}

TEST_CASE("an empty quarter yields a zero snapshot") {
    const MetricsSnapshot snap = quarterly_snapshot(Ledger{}, Quarter{2030, 4});
    CHECK(snap.incident_count == 0);
    CHECK(snap.open_count == 0);
    CHECK(snap.total_loss_usd == 0.0);
    CHECK(snap.mean_loss_usd == 0.0);
    CHECK_FALSE(snap.mttr_seconds.has_value());
    CHECK(snap.by_source.empty());
}

TEST_CASE("incident JSONL round-trips") {
    const std::string text = testutil::fixture("incidents_2025.jsonl");
    const auto [ledger, error] = load_ledger(text);
    REQUIRE_FALSE(error.has_value());
    REQUIRE(ledger.has_value());
    CHECK(ledger->records.size() == 7);

    const std::string serialized = ledger_to_jsonl(*ledger);
    const auto [reloaded, reload_error] = load_ledger(serialized);
    REQUIRE_FALSE(reload_error.has_value());
    CHECK(*reloaded == *ledger);
}

TEST_CASE("malformed ledger lines report their line number") {
    const std::string text =
        "{\"id\":\"ok\",\"occurred_at\":\"2025-01-01T00:00:00Z\",\"detected_at\":"
        "\"2025-01-01T01:00:00Z\",\"remediated_at\":null,\"category\":\"tampering\","
        "\"loss_usd\":5,\"source\":\"pen_test\"}\n"
        "{\"id\":\"bad\",\"occurred_at\":\"2025-01-02T00:00:00Z\"}\n";
    const auto [ledger, error] = load_ledger(text);
    CHECK_FALSE(ledger.has_value());
    REQUIRE(error.has_value());
    CHECK(error->line == 2);
}

TEST_CASE("priors files round-trip and validate") {
    const ProbabilityPriors priors = default_priors();
    const std::string text = priors_to_json(priors);
    CHECK(parse_priors(text) == priors);
    CHECK_THROWS_WITH(parse_priors("{\"priors\":{\"nonsense\":0.5}}"),
                      Catch::Matchers::ContainsSubstring("nonsense"));
    CHECK_THROWS_WITH(parse_priors("{\"priors\":{\"tampering\":1.5}}"),
                      Catch::Matchers::ContainsSubstring("tampering"));
}
