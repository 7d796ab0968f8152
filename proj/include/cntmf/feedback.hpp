#pragma once

// Incident-driven feedback: an append-only ledger of dated loss events, MTTR
// and quarterly metrics over it, and a deterministic recalibration rule that
// blends category priors toward observed incident shares:
//
//   p'_c = clamp[0,1]((1 - alpha) * p_c + alpha * count_c / n)
//
// Records are validated on ingestion so malformed or poisoned entries never
// enter the ledger.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cntmf/taxonomy.hpp"
#include "cntmf/time.hpp"

namespace cntmf {

enum class IncidentSource { BugBounty, PenTest, IncidentReport, MonitoringAlert };

inline constexpr std::array<std::string_view, 4> kIncidentSourceSlugs{
    "bug_bounty", "pen_test", "incident_report", "monitoring_alert",
};

constexpr std::string_view incident_source_slug(IncidentSource s) {
    return kIncidentSourceSlugs[static_cast<std::size_t>(s)];
}

inline std::optional<IncidentSource> incident_source_from_slug(std::string_view slug) {
    for (std::size_t i = 0; i < kIncidentSourceSlugs.size(); ++i) {
        if (kIncidentSourceSlugs[i] == slug) return static_cast<IncidentSource>(i);
    }
    return std::nullopt;
}

struct IncidentRecord {
    std::string id;
    UtcSeconds occurred_at = 0;
    UtcSeconds detected_at = 0;
    std::optional<UtcSeconds> remediated_at;  // absent = still open
    ThreatCategory category;
    double loss_usd = 0.0;
    IncidentSource source = IncidentSource::IncidentReport;
    std::string note;

    bool closed() const { return remediated_at.has_value(); }

    bool operator==(const IncidentRecord&) const = default;
};

// Returns the first validation failure, or nullopt for a clean record.
inline std::optional<std::string> validate_record(const IncidentRecord& r) {
    if (r.id.empty()) return "incident id must be non-empty";
    if (r.occurred_at > r.detected_at) return "occurred_at must not be after detected_at";
    if (r.remediated_at && r.detected_at > *r.remediated_at) {
        return "detected_at must not be after remediated_at";
    }
    if (r.loss_usd < 0) return "loss_usd must be non-negative";
    return std::nullopt;
}

struct Ledger {
    std::vector<IncidentRecord> records;  // append order
    int schema_version = 1;

    bool operator==(const Ledger&) const = default;
};

struct DuplicateIdError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TimestampOrderError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Value semantics: returns a new ledger with the record appended; the input
// ledger is untouched.
inline Ledger ingest_incident(const Ledger& ledger, const IncidentRecord& record) {
    for (const IncidentRecord& existing : ledger.records) {
        if (existing.id == record.id) {
            throw DuplicateIdError("incident id '" + record.id + "' already present in ledger");
        }
    }
    if (record.occurred_at > record.detected_at) {
        throw TimestampOrderError("occurred_at must not be after detected_at");
    }
    if (record.remediated_at && record.detected_at > *record.remediated_at) {
        throw TimestampOrderError("detected_at must not be after remediated_at");
    }
    if (auto problem = validate_record(record)) throw std::invalid_argument(*problem);
    Ledger out = ledger;
    out.records.push_back(record);
    return out;
}

struct MttrFilter {
    std::optional<ThreatCategory> category;
    std::optional<TimeRange> window;  // on occurred_at
};

// Mean (remediated_at - detected_at) in seconds over closed incidents
// matching the filter; nullopt when none match.
inline std::optional<double> mttr(const Ledger& ledger, const MttrFilter& filter = {}) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const IncidentRecord& r : ledger.records) {
        if (!r.closed()) continue;
        if (filter.category && !(r.category == *filter.category)) continue;
        if (filter.window && !filter.window->contains(r.occurred_at)) continue;
        sum += static_cast<double>(*r.remediated_at - r.detected_at);
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

// Remediation target from the oracle-incident KPI: strictly under 24 hours.
inline constexpr double kMttrTargetSeconds = 24.0 * 3600.0;

inline bool meets_mttr_target(double mttr_seconds) { return mttr_seconds < kMttrTargetSeconds; }

struct ProbabilityPriors {
    std::map<ThreatCategory, double> by_category;  // all 20 categories, each in [0, 1]

    bool operator==(const ProbabilityPriors&) const = default;
};

// Category priors seeded from the scoring defaults (pattern defaults
// collapsed onto their nearest category; everything else at the fallback).
inline ProbabilityPriors default_priors() {
    ProbabilityPriors priors;
    for (const ThreatCategory& c : all_categories()) priors.by_category[c] = 0.5;
    priors.by_category[CryptoqCategory::ReentrancyOracleManipulation] = 0.6;
    priors.by_category[CryptoqCategory::Collusion] = 0.8;
    priors.by_category[StrideCategory::Tampering] = 0.7;
    return priors;
}

// Exponential blend toward the observed category share within the window.
// n = 0 leaves the priors unchanged; categories absent from the window decay
// toward zero by the same formula.
inline ProbabilityPriors recalibrate(const Ledger& ledger, const ProbabilityPriors& priors,
                                     const TimeRange& window, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::out_of_range("alpha must be within [0, 1]");
    }
    std::map<ThreatCategory, std::size_t> counts;
    std::size_t n = 0;
    for (const IncidentRecord& r : ledger.records) {
        if (!window.contains(r.occurred_at)) continue;
        ++counts[r.category];
        ++n;
    }
    if (n == 0) return priors;

    ProbabilityPriors updated = priors;
    for (auto& [category, p] : updated.by_category) {
        const auto it = counts.find(category);
        const double share =
            it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n);
        p = std::clamp((1.0 - alpha) * p + alpha * share, 0.0, 1.0);
    }
    return updated;
}

// Headline ecosystem benchmark used as a report annotation: mean loss per
// incident across H1-2025 ($7.18M).
inline constexpr double kEcosystemMeanLossH12025Usd = 7'180'000.0;

struct MetricsSnapshot {
    std::string quarter;  // "YYYYQn"
    std::size_t incident_count = 0;
    std::size_t open_count = 0;
    std::map<std::string, std::size_t> by_source;        // source slug -> count
    double total_loss_usd = 0.0;
    double mean_loss_usd = 0.0;                          // over all (closed + open) incidents
    std::optional<double> mttr_seconds;                  // closed incidents only
    std::map<ThreatCategory, double> mttr_by_category;   // categories with >= 1 closed incident

    bool operator==(const MetricsSnapshot&) const = default;
};

inline MetricsSnapshot quarterly_snapshot(const Ledger& ledger, const Quarter& quarter) {
    const TimeRange window = quarter_range(quarter);
    MetricsSnapshot snap;
    snap.quarter = quarter_label(quarter);

    std::map<ThreatCategory, std::pair<double, std::size_t>> closed_by_category;
    double mttr_sum = 0.0;
    std::size_t mttr_n = 0;
    for (const IncidentRecord& r : ledger.records) {
        if (!window.contains(r.occurred_at)) continue;
        ++snap.incident_count;
        snap.total_loss_usd += r.loss_usd;
        ++snap.by_source[std::string(incident_source_slug(r.source))];
        if (r.closed()) {
            const auto duration = static_cast<double>(*r.remediated_at - r.detected_at);
            mttr_sum += duration;
            ++mttr_n;
            auto& [sum, count] = closed_by_category[r.category];
            sum += duration;
            ++count;
        } else {
            ++snap.open_count;
        }
    }
    if (snap.incident_count > 0) {
        snap.mean_loss_usd = snap.total_loss_usd / static_cast<double>(snap.incident_count);
    }
    if (mttr_n > 0) snap.mttr_seconds = mttr_sum / static_cast<double>(mttr_n);
    for (const auto& [category, acc] : closed_by_category) {
        snap.mttr_by_category[category] = acc.first / static_cast<double>(acc.second);
    }
    return snap;
}

// ---------------------------------------------------------------------------
// File formats

// One incident per line:
// {"id":"inc1","occurred_at":"2025-04-03T09:00:00Z","detected_at":"...",
//  "remediated_at":"..."|null,"category":"<slug>","loss_usd":1000000,
//  "source":"<slug>","note":"..."}
inline IncidentRecord parse_incident_json(const std::string& line) {
    const nlohmann::json doc = nlohmann::json::parse(line);
    if (!doc.is_object()) throw std::invalid_argument("incident record must be a JSON object");

    IncidentRecord r;
    auto timestamp = [&](const char* field, bool required) -> std::optional<UtcSeconds> {
        if (!doc.contains(field) || doc[field].is_null()) {
            if (required) throw std::invalid_argument(std::string("missing field '") + field + "'");
            return std::nullopt;
        }
        const auto text = doc[field].get<std::string>();
        const auto t = parse_utc(text);
        if (!t) {
            throw std::invalid_argument(std::string("field '") + field +
                                        "' must be a UTC timestamp (YYYY-MM-DDTHH:MM:SSZ)");
        }
        return t;
    };

    if (!doc.contains("id")) throw std::invalid_argument("missing field 'id'");
    r.id = doc["id"].get<std::string>();
    r.occurred_at = *timestamp("occurred_at", true);
    r.detected_at = *timestamp("detected_at", true);
    r.remediated_at = timestamp("remediated_at", false);

    if (!doc.contains("category")) throw std::invalid_argument("missing field 'category'");
    const auto category = category_from_slug(doc["category"].get<std::string>());
    if (!category) {
        throw std::invalid_argument("unknown category '" + doc["category"].get<std::string>() + "'");
    }
    r.category = *category;

    if (!doc.contains("loss_usd")) throw std::invalid_argument("missing field 'loss_usd'");
    r.loss_usd = doc["loss_usd"].get<double>();

    if (!doc.contains("source")) throw std::invalid_argument("missing field 'source'");
    const auto source = incident_source_from_slug(doc["source"].get<std::string>());
    if (!source) {
        throw std::invalid_argument("unknown source '" + doc["source"].get<std::string>() + "'");
    }
    r.source = *source;

    if (doc.contains("note") && !doc["note"].is_null()) r.note = doc["note"].get<std::string>();

    if (auto problem = validate_record(r)) throw std::invalid_argument(*problem);
    return r;
}

inline std::string incident_to_json(const IncidentRecord& r) {
    nlohmann::json doc;
    doc["id"] = r.id;
    doc["occurred_at"] = format_utc(r.occurred_at);
    doc["detected_at"] = format_utc(r.detected_at);
    doc["remediated_at"] = r.remediated_at ? nlohmann::json(format_utc(*r.remediated_at))
                                           : nlohmann::json(nullptr);
    doc["category"] = std::string(r.category.slug());
    doc["loss_usd"] = r.loss_usd;
    doc["source"] = std::string(incident_source_slug(r.source));
    doc["note"] = r.note;
    return doc.dump();
}

struct LedgerParseError {
    int line = 0;
    std::string message;
};

// Loads a JSONL ledger. Blank lines are skipped. On the first malformed
// record the error (with its 1-based line number) is returned instead.
inline std::pair<std::optional<Ledger>, std::optional<LedgerParseError>> load_ledger(
    const std::string& text) {
    Ledger ledger;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? text.size() - pos : nl - pos);
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) {
            try {
                ledger = ingest_incident(ledger, parse_incident_json(line));
            } catch (const std::exception& e) {
                return {std::nullopt, LedgerParseError{lineno, e.what()}};
            }
        }
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return {ledger, std::nullopt};
}

inline std::string ledger_to_jsonl(const Ledger& ledger) {
    std::string out;
    for (const IncidentRecord& r : ledger.records) {
        out += incident_to_json(r);
        out += '\n';
    }
    return out;
}

// Priors file: {"schema_version": 1, "priors": {"<category slug>": p, ...}}
inline ProbabilityPriors parse_priors(const std::string& json_text) {
    const nlohmann::json doc = nlohmann::json::parse(json_text);
    if (!doc.is_object() || !doc.contains("priors") || !doc["priors"].is_object()) {
        throw std::invalid_argument("priors file must contain a \"priors\" object");
    }
    ProbabilityPriors priors = default_priors();
    for (const auto& [slug, value] : doc["priors"].items()) {
        const auto category = category_from_slug(slug);
        if (!category) throw std::invalid_argument("unknown category '" + slug + "' in priors");
        const double p = value.get<double>();
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("prior for '" + slug + "' must be within [0, 1]");
        }
        priors.by_category[*category] = p;
    }
    return priors;
}

inline std::string priors_to_json(const ProbabilityPriors& priors) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [category, p] : priors.by_category) {
        obj[std::string(category.slug())] = p;
    }
    nlohmann::json doc;
    doc["schema_version"] = 1;
    doc["priors"] = obj;
    return doc.dump(2) + "\n";
}

}  // namespace cntmf
