#pragma once

// Risk scoring: score = (technical severity + economic impact + regulatory
// consequence) x exploit probability, banded Low (< 5), Medium (5-10,
// inclusive both ends), High (> 10). Scores are computed in binary floating
// point and reported at one decimal, rounded half-up in a single step.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cntmf/catalog.hpp"
#include "cntmf/model.hpp"

namespace cntmf {

enum class Band { Low, Medium, High };

constexpr std::string_view band_name(Band b) {
    switch (b) {
        case Band::Low: return "Low";
        case Band::Medium: return "Medium";
        case Band::High: return "High";
    }
    return "Low";
}

constexpr char band_letter(Band b) {
    switch (b) {
        case Band::Low: return 'L';
        case Band::Medium: return 'M';
        case Band::High: return 'H';
    }
    return 'L';
}

inline std::optional<Band> band_from_name(std::string_view s) {
    if (s == "Low") return Band::Low;
    if (s == "Medium") return Band::Medium;
    if (s == "High") return Band::High;
    return std::nullopt;
}

enum class Provenance { Default, Override, DerivedFromValueAtRisk };

constexpr std::string_view provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Default: return "default";
        case Provenance::Override: return "override";
        case Provenance::DerivedFromValueAtRisk: return "value_at_risk";
    }
    return "default";
}

inline std::optional<Provenance> provenance_from_name(std::string_view s) {
    if (s == "default") return Provenance::Default;
    if (s == "override") return Provenance::Override;
    if (s == "value_at_risk") return Provenance::DerivedFromValueAtRisk;
    return std::nullopt;
}

struct ScoreInputs {
    double technical_severity = 5.0;     // 0..10
    double economic_impact = 5.0;        // 0..10
    double regulatory_consequence = 5.0; // 0..10
    double exploit_probability = 0.5;    // 0..1
    Provenance ts_provenance = Provenance::Default;
    Provenance ei_provenance = Provenance::Default;
    Provenance rc_provenance = Provenance::Default;
    Provenance p_provenance = Provenance::Default;

    bool operator==(const ScoreInputs&) const = default;
};

namespace risk_detail {

inline void check_range(double value, double lo, double hi, const char* field) {
    if (!(value >= lo && value <= hi)) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s must be within [%g, %g], got %g", field, lo, hi, value);
        throw std::out_of_range(buf);
    }
}

}  // namespace risk_detail

inline double risk_score(const ScoreInputs& in) {
    risk_detail::check_range(in.technical_severity, 0, 10, "technical_severity");
    risk_detail::check_range(in.economic_impact, 0, 10, "economic_impact");
    risk_detail::check_range(in.regulatory_consequence, 0, 10, "regulatory_consequence");
    risk_detail::check_range(in.exploit_probability, 0, 1, "exploit_probability");
    return (in.technical_severity + in.economic_impact + in.regulatory_consequence) *
           in.exploit_probability;
}

inline Band band(double score) {
    if (score < 5.0) return Band::Low;
    if (score <= 10.0) return Band::Medium;
    return Band::High;
}

// One decimal place, rounded half-up in a single step.
inline std::string format_score(double score) {
    const auto tenths = static_cast<long long>(std::llround(score * 10.0));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld.%lld", tenths / 10, tenths % 10);
    return buf;
}

// Loss band table for the 0-10 economic impact component.
inline double economic_impact_from_loss(double loss_usd) {
    if (loss_usd < 0) throw std::out_of_range("loss_usd must be non-negative");
    if (loss_usd < 1'000.0) return 0.0;
    if (loss_usd < 10'000.0) return 2.0;
    if (loss_usd < 100'000.0) return 4.0;
    if (loss_usd < 1'000'000.0) return 6.0;
    if (loss_usd < 5'000'000.0) return 7.0;
    if (loss_usd <= 10'000'000.0) return 8.0;
    return 10.0;
}

// Pattern-based probability defaults; first matching rule wins.
inline double default_probability(const Threat& threat, const SystemModel& model) {
    const Element* target = model.find(threat.target);
    if (target == nullptr) return 0.5;
    if (target->is_flow() && target->has_tag("bridge")) return 0.7;
    if (target->variant == BlockchainVariant::Oracle &&
        threat.category == ThreatCategory(CryptoqCategory::ReentrancyOracleManipulation)) {
        return 0.6;
    }
    // Infrastructure key compromise: collusion or tampering against custody assets.
    if (target->layer == Layer::Infrastructure &&
        (threat.category == ThreatCategory(CryptoqCategory::Collusion) ||
         threat.category == ThreatCategory(StrideCategory::Tampering))) {
        return 0.8;
    }
    return 0.5;
}

struct ScoredThreat {
    Threat threat;
    ScoreInputs inputs;
    double score = 0.0;   // derived from inputs
    Band band = Band::Low;

    bool operator==(const ScoredThreat&) const = default;
};

inline ScoredThreat make_scored(Threat threat, ScoreInputs inputs) {
    ScoredThreat st;
    st.threat = std::move(threat);
    st.inputs = inputs;
    st.score = risk_score(inputs);
    st.band = cntmf::band(st.score);
    return st;
}

struct Override {
    std::optional<double> ts;
    std::optional<double> ei;
    std::optional<double> rc;
    std::optional<double> p;
    bool suppress = false;
};

struct OverrideSet {
    std::map<std::string, Override> by_threat_id;

    bool empty() const { return by_threat_id.empty(); }
};

// Override file: {"schema_version": 1, "overrides": {"<threat id>":
// {"ts": 8.5, "ei": 7, "rc": 6, "p": 0.6, "suppress": false}, ...}}
inline OverrideSet parse_overrides(const std::string& json_text) {
    const nlohmann::json doc = nlohmann::json::parse(json_text);
    if (!doc.is_object() || !doc.contains("overrides") || !doc["overrides"].is_object()) {
        throw std::invalid_argument("override file must contain an \"overrides\" object");
    }
    OverrideSet set;
    for (const auto& [id, entry] : doc["overrides"].items()) {
        if (!entry.is_object()) {
            throw std::invalid_argument("override for '" + id + "' must be an object");
        }
        Override o;
        for (const auto& [key, value] : entry.items()) {
            if (key == "ts") o.ts = value.get<double>();
            else if (key == "ei") o.ei = value.get<double>();
            else if (key == "rc") o.rc = value.get<double>();
            else if (key == "p") o.p = value.get<double>();
            else if (key == "suppress") o.suppress = value.get<bool>();
            else throw std::invalid_argument("override for '" + id + "' has unknown field '" + key + "'");
        }
        set.by_threat_id[id] = o;
    }
    return set;
}

// Resolves score inputs for every threat. Precedence per field:
// override > value_at_risk (economic impact only) > defaults. Throws
// std::invalid_argument when an override names a threat that does not exist
// and std::out_of_range when a resolved input leaves its interval.
inline std::vector<ScoredThreat> score_all(const std::vector<Threat>& threats,
                                           const SystemModel& model, const OverrideSet& overrides) {
    std::set<std::string> known;
    for (const Threat& t : threats) known.insert(t.id);
    std::string unknown;
    for (const auto& [id, o] : overrides.by_threat_id) {
        if (known.count(id) == 0) {
            if (!unknown.empty()) unknown += ", ";
            unknown += id;
        }
    }
    if (!unknown.empty()) {
        throw std::invalid_argument("overrides reference unknown threat ids: " + unknown);
    }

    std::vector<ScoredThreat> out;
    out.reserve(threats.size());
    for (const Threat& t : threats) {
        const auto it = overrides.by_threat_id.find(t.id);
        const Override* o = it != overrides.by_threat_id.end() ? &it->second : nullptr;
        if (o != nullptr && o->suppress) continue;

        ScoreInputs in;
        const Element* target = model.find(t.target);
        if (target != nullptr && target->value_at_risk) {
            in.economic_impact = economic_impact_from_loss(*target->value_at_risk);
            in.ei_provenance = Provenance::DerivedFromValueAtRisk;
        }
        in.exploit_probability = default_probability(t, model);

        if (o != nullptr) {
            if (o->ts) { in.technical_severity = *o->ts; in.ts_provenance = Provenance::Override; }
            if (o->ei) { in.economic_impact = *o->ei; in.ei_provenance = Provenance::Override; }
            if (o->rc) { in.regulatory_consequence = *o->rc; in.rc_provenance = Provenance::Override; }
            if (o->p) { in.exploit_probability = *o->p; in.p_provenance = Provenance::Override; }
        }
        out.push_back(make_scored(t, in));
    }
    return out;
}

// Descending score; ties by descending probability, then target id, then
// category code. Stable, total, idempotent.
inline std::vector<ScoredThreat> prioritize(std::vector<ScoredThreat> scored) {
    std::stable_sort(scored.begin(), scored.end(), [](const ScoredThreat& a, const ScoredThreat& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.inputs.exploit_probability != b.inputs.exploit_probability) {
            return a.inputs.exploit_probability > b.inputs.exploit_probability;
        }
        if (a.threat.target != b.threat.target) return a.threat.target < b.threat.target;
        return a.threat.category.code() < b.threat.category.code();
    });
    return scored;
}

inline constexpr std::size_t kHeatmapBins = 5;

// Axis labels, lowest bin first.
inline constexpr std::array<std::string_view, kHeatmapBins> kProbabilityBinLabels{
    "0.0-0.2", "0.2-0.4", "0.4-0.6", "0.6-0.8", "0.8-1.0",
};
inline constexpr std::array<std::string_view, kHeatmapBins> kImpactBinLabels{
    "0-2", "2-4", "4-6", "6-8", "8-10",
};

// Comparisons against the exact bin-edge doubles, so a stored 0.6 lands in
// [0.6, 0.8) even though 0.6/0.2 rounds below 3.
inline std::size_t probability_bin(double p) {
    if (p >= 0.8) return 4;
    if (p >= 0.6) return 3;
    if (p >= 0.4) return 2;
    if (p >= 0.2) return 1;
    return 0;
}

inline std::size_t impact_bin(double mean_impact) {
    if (mean_impact >= 8.0) return 4;
    if (mean_impact >= 6.0) return 3;
    if (mean_impact >= 4.0) return 2;
    if (mean_impact >= 2.0) return 1;
    return 0;
}

inline double mean_impact(const ScoreInputs& in) {
    return (in.technical_severity + in.economic_impact + in.regulatory_consequence) / 3.0;
}

struct HeatmapCell {
    std::vector<std::string> threat_ids;  // sorted
    std::optional<Band> dominant;         // highest band present

    bool operator==(const HeatmapCell&) const = default;
};

struct Heatmap {
    // cells[probability_bin][impact_bin], bin 0 = lowest.
    std::array<std::array<HeatmapCell, kHeatmapBins>, kHeatmapBins> cells{};
    std::size_t total = 0;

    bool operator==(const Heatmap&) const = default;
};

inline Heatmap build_heatmap(const std::vector<ScoredThreat>& scored) {
    Heatmap map;
    for (const ScoredThreat& st : scored) {
        HeatmapCell& cell =
            map.cells[probability_bin(st.inputs.exploit_probability)][impact_bin(mean_impact(st.inputs))];
        cell.threat_ids.push_back(st.threat.id);
        if (!cell.dominant || static_cast<int>(st.band) > static_cast<int>(*cell.dominant)) {
            cell.dominant = st.band;
        }
        ++map.total;
    }
    for (auto& row : map.cells) {
        for (HeatmapCell& cell : row) {
            std::sort(cell.threat_ids.begin(), cell.threat_ids.end());
        }
    }
    return map;
}

}  // namespace cntmf
