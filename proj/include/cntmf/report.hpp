#pragma once

// Report compilation: the Assessment aggregate plus four renderers
// (canonical JSON export, Markdown report, DOT diagram, heatmap grids) and a
// reader that reloads the canonical export. All renderers are pure; with the
// timestamp suppressed, identical inputs yield identical bytes.

#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cntmf/catalog.hpp"
#include "cntmf/feedback.hpp"
#include "cntmf/mitigation.hpp"
#include "cntmf/model.hpp"
#include "cntmf/risk.hpp"
#include "cntmf/version.hpp"

namespace cntmf {

struct Assessment {
    std::string model_name;
    std::size_t element_count = 0;
    std::vector<Actor> actors;
    HybridAssetMatrix matrix;
    std::vector<Threat> threats;       // enumeration order
    std::vector<ScoredThreat> scored;  // prioritized order
    Heatmap heatmap;
    std::optional<CoverageReport> coverage;
    std::optional<MetricsSnapshot> metrics;
    std::string tool_version{kToolVersion};
    std::optional<std::string> generated_at;  // ISO-8601; absent when suppressed

    bool operator==(const Assessment&) const = default;
};

inline Assessment build_assessment(const SystemModel& model, const OverrideSet& overrides,
                                   const std::optional<std::set<std::string>>& selected_controls,
                                   const std::optional<MetricsSnapshot>& metrics,
                                   std::optional<UtcSeconds> timestamp) {
    Assessment a;
    a.model_name = model.name;
    a.element_count = model.elements.size();
    a.actors = model.actors;
    a.matrix = layer_matrix(model);
    a.threats = enumerate_threats(model);
    a.scored = prioritize(score_all(a.threats, model, overrides));
    a.heatmap = build_heatmap(a.scored);
    if (selected_controls) a.coverage = coverage(a.scored, *selected_controls);
    a.metrics = metrics;
    if (timestamp) a.generated_at = format_utc(*timestamp);
    return a;
}

// Internal-consistency predicate used by tests and the reader.
inline bool assessment_consistent(const Assessment& a) {
    std::set<std::string> threat_ids;
    for (const Threat& t : a.threats) threat_ids.insert(t.id);
    for (const ScoredThreat& st : a.scored) {
        if (threat_ids.count(st.threat.id) == 0) return false;
        if (st.band != band(st.score)) return false;
    }
    return a.heatmap.total == a.scored.size();
}

namespace report_detail {

inline std::string usd(double amount) {
    char raw[32];
    std::snprintf(raw, sizeof(raw), "%lld", static_cast<long long>(std::llround(amount)));
    std::string digits = raw;
    std::string out;
    int count = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (count > 0 && count % 3 == 0 && *it != '-') out += ',';
        out += *it;
        ++count;
    }
    std::reverse(out.begin(), out.end());
    return "$" + out;
}

inline std::string hours(double seconds) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1fh", seconds / 3600.0);
    return buf;
}

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\\' || c == '"') out += '\\';
        out += c;
    }
    return out;
}

inline nlohmann::json matrix_to_json(const HybridAssetMatrix& matrix) {
    nlohmann::json rows = nlohmann::json::array();
    for (const LayerRow& row : matrix.rows) {
        nlohmann::json edges = nlohmann::json::array();
        for (const LayerRow::Edge& e : row.interdependencies) {
            edges.push_back({{"flow", e.flow_id},
                             {"from", std::string(layer_keyword(e.from))},
                             {"to", std::string(layer_keyword(e.to))}});
        }
        rows.push_back({{"layer", std::string(layer_keyword(row.layer))},
                        {"elements", row.element_ids},
                        {"interdependencies", edges}});
    }
    return rows;
}

inline HybridAssetMatrix matrix_from_json(const nlohmann::json& rows) {
    HybridAssetMatrix matrix;
    for (const auto& row : rows) {
        LayerRow lr;
        const auto layer = layer_from_keyword(row.at("layer").get<std::string>());
        if (!layer) throw std::invalid_argument("unknown layer keyword in assessment");
        lr.layer = *layer;
        for (const auto& id : row.at("elements")) lr.element_ids.push_back(id.get<std::string>());
        for (const auto& edge : row.at("interdependencies")) {
            const auto from = layer_from_keyword(edge.at("from").get<std::string>());
            const auto to = layer_from_keyword(edge.at("to").get<std::string>());
            if (!from || !to) throw std::invalid_argument("unknown layer keyword in assessment");
            lr.interdependencies.push_back(
                LayerRow::Edge{edge.at("flow").get<std::string>(), *from, *to});
        }
        matrix.rows.push_back(std::move(lr));
    }
    return matrix;
}

inline nlohmann::json threat_to_json(const Threat& t) {
    nlohmann::json apis = nlohmann::json::array();
    for (ApiRisk r : t.api_mappings) apis.push_back(std::string(api_code(r)));
    return {{"id", t.id},
            {"target", t.target},
            {"category",
             {{"family", std::string(t.category.family())},
              {"code", std::string(t.category.code())},
              {"slug", std::string(t.category.slug())},
              {"name", std::string(t.category.name())}}},
            {"rationale", {{"rule", t.rationale.rule}, {"text", t.rationale.text}}},
            {"api_mappings", apis},
            {"suggested_actor", t.suggested_actor
                                    ? nlohmann::json(std::string(archetype_keyword(*t.suggested_actor)))
                                    : nlohmann::json(nullptr)}};
}

inline Threat threat_from_json(const nlohmann::json& doc) {
    Threat t;
    t.id = doc.at("id").get<std::string>();
    t.target = doc.at("target").get<std::string>();
    const auto category = category_from_code(doc.at("category").at("code").get<std::string>());
    if (!category) throw std::invalid_argument("unknown category code in assessment");
    t.category = *category;
    t.rationale.rule = doc.at("rationale").at("rule").get<std::string>();
    t.rationale.text = doc.at("rationale").at("text").get<std::string>();
    for (const auto& code : doc.at("api_mappings")) {
        const auto api = api_from_code(code.get<std::string>());
        if (!api) throw std::invalid_argument("unknown API risk code in assessment");
        t.api_mappings.insert(*api);
    }
    if (!doc.at("suggested_actor").is_null()) {
        const auto arch = archetype_from_keyword(doc.at("suggested_actor").get<std::string>());
        if (!arch) throw std::invalid_argument("unknown actor archetype in assessment");
        t.suggested_actor = *arch;
    }
    return t;
}

inline nlohmann::json scored_to_json(const ScoredThreat& st) {
    const double rounded = std::llround(st.score * 10.0) / 10.0;
    return {{"threat_id", st.threat.id},
            {"score", rounded},
            {"band", std::string(band_name(st.band))},
            {"inputs",
             {{"technical_severity", st.inputs.technical_severity},
              {"economic_impact", st.inputs.economic_impact},
              {"regulatory_consequence", st.inputs.regulatory_consequence},
              {"exploit_probability", st.inputs.exploit_probability}}},
            {"provenance",
             {{"technical_severity", std::string(provenance_name(st.inputs.ts_provenance))},
              {"economic_impact", std::string(provenance_name(st.inputs.ei_provenance))},
              {"regulatory_consequence", std::string(provenance_name(st.inputs.rc_provenance))},
              {"exploit_probability", std::string(provenance_name(st.inputs.p_provenance))}}}};
}

inline nlohmann::json heatmap_to_json(const Heatmap& map) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : map.cells) {
        nlohmann::json cells = nlohmann::json::array();
        for (const HeatmapCell& cell : row) {
            cells.push_back(
                {{"count", cell.threat_ids.size()},
                 {"band", cell.dominant ? std::string(1, band_letter(*cell.dominant)) : "-"},
                 {"threats", cell.threat_ids}});
        }
        rows.push_back(cells);
    }
    nlohmann::json probability_bins = nlohmann::json::array();
    for (auto label : kProbabilityBinLabels) probability_bins.push_back(std::string(label));
    nlohmann::json impact_bins = nlohmann::json::array();
    for (auto label : kImpactBinLabels) impact_bins.push_back(std::string(label));
    return {{"cells", rows},
            {"probability_bins", probability_bins},
            {"impact_bins", impact_bins},
            {"total", map.total}};
}

inline Heatmap heatmap_from_json(const nlohmann::json& doc) {
    Heatmap map;
    const auto& rows = doc.at("cells");
    if (rows.size() != kHeatmapBins) throw std::invalid_argument("heatmap must have 5 rows");
    for (std::size_t r = 0; r < kHeatmapBins; ++r) {
        const auto& cells = rows[r];
        if (cells.size() != kHeatmapBins) throw std::invalid_argument("heatmap must have 5 columns");
        for (std::size_t c = 0; c < kHeatmapBins; ++c) {
            HeatmapCell& cell = map.cells[r][c];
            for (const auto& id : cells[c].at("threats")) {
                cell.threat_ids.push_back(id.get<std::string>());
            }
            const auto letter = cells[c].at("band").get<std::string>();
            if (letter == "L") cell.dominant = Band::Low;
            else if (letter == "M") cell.dominant = Band::Medium;
            else if (letter == "H") cell.dominant = Band::High;
            else if (letter != "-") throw std::invalid_argument("unknown band letter in heatmap");
        }
    }
    map.total = doc.at("total").get<std::size_t>();
    return map;
}

}  // namespace report_detail

// Canonical structured export. Keys are emitted in lexical order; the only
// run-dependent field is generated_at, which is null when suppressed.
inline std::string render_structured(const Assessment& a) {
    using nlohmann::json;
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["tool"] = {{"name", std::string(kToolName)}, {"version", a.tool_version}};
    doc["generated_at"] = a.generated_at ? json(*a.generated_at) : json(nullptr);

    json actors = json::array();
    for (const Actor& actor : a.actors) {
        actors.push_back({{"id", actor.id},
                          {"name", actor.name},
                          {"archetype", std::string(archetype_keyword(actor.archetype))},
                          {"note", actor.note}});
    }
    doc["model"] = {{"name", a.model_name},
                    {"element_count", a.element_count},
                    {"actors", actors},
                    {"layers", report_detail::matrix_to_json(a.matrix)}};

    json threats = json::array();
    for (const Threat& t : a.threats) threats.push_back(report_detail::threat_to_json(t));
    doc["threats"] = threats;

    json scored = json::array();
    for (const ScoredThreat& st : a.scored) scored.push_back(report_detail::scored_to_json(st));
    doc["scored"] = scored;

    doc["heatmap"] = report_detail::heatmap_to_json(a.heatmap);

    if (a.coverage) {
        json per_threat = json::object();
        for (const auto& [id, controls] : a.coverage->per_threat) per_threat[id] = controls;
        json residual = json::array();
        for (const ScoredThreat& st : a.coverage->residual) residual.push_back(st.threat.id);
        doc["coverage"] = {{"covered", a.coverage->covered},
                           {"total", a.coverage->total},
                           {"coverage_ratio", a.coverage->coverage_ratio},
                           {"per_threat", per_threat},
                           {"residual", residual}};
    } else {
        doc["coverage"] = nullptr;
    }

    if (a.metrics) {
        const MetricsSnapshot& m = *a.metrics;
        json by_source = json::object();
        for (const auto& [slug, count] : m.by_source) by_source[slug] = count;
        json mttr_by_category = json::object();
        for (const auto& [category, seconds] : m.mttr_by_category) {
            mttr_by_category[std::string(category.slug())] = {
                {"seconds", seconds}, {"meets_24h_target", meets_mttr_target(seconds)}};
        }
        const char* vs_average = m.mean_loss_usd < kEcosystemMeanLossH12025Usd   ? "below"
                                 : m.mean_loss_usd > kEcosystemMeanLossH12025Usd ? "above"
                                                                                 : "at";
        doc["metrics"] = {{"quarter", m.quarter},
                          {"incident_count", m.incident_count},
                          {"open_count", m.open_count},
                          {"by_source", by_source},
                          {"total_loss_usd", m.total_loss_usd},
                          {"mean_loss_usd", m.mean_loss_usd},
                          {"mean_loss_vs_h1_2025_average", vs_average},
                          {"mttr_seconds", m.mttr_seconds ? json(*m.mttr_seconds) : json(nullptr)},
                          {"mttr_meets_24h_target",
                           m.mttr_seconds ? json(meets_mttr_target(*m.mttr_seconds)) : json(nullptr)},
                          {"mttr_by_category", mttr_by_category}};
    } else {
        doc["metrics"] = nullptr;
    }

    return doc.dump(2) + "\n";
}

// Reloads render_structured output. Scores and bands are recomputed from the
// stored inputs, so a reloaded assessment compares equal to its source.
inline Assessment read_structured(const std::string& json_text) {
    const nlohmann::json doc = nlohmann::json::parse(json_text);
    Assessment a;
    a.tool_version = doc.at("tool").at("version").get<std::string>();
    if (!doc.at("generated_at").is_null()) {
        a.generated_at = doc.at("generated_at").get<std::string>();
    }
    a.model_name = doc.at("model").at("name").get<std::string>();
    a.element_count = doc.at("model").at("element_count").get<std::size_t>();
    for (const auto& actor_doc : doc.at("model").at("actors")) {
        Actor actor;
        actor.id = actor_doc.at("id").get<std::string>();
        actor.name = actor_doc.at("name").get<std::string>();
        const auto arch = archetype_from_keyword(actor_doc.at("archetype").get<std::string>());
        if (!arch) throw std::invalid_argument("unknown actor archetype in assessment");
        actor.archetype = *arch;
        actor.note = actor_doc.at("note").get<std::string>();
        a.actors.push_back(std::move(actor));
    }
    a.matrix = report_detail::matrix_from_json(doc.at("model").at("layers"));

    std::map<std::string, Threat> threat_by_id;
    for (const auto& threat_doc : doc.at("threats")) {
        Threat t = report_detail::threat_from_json(threat_doc);
        threat_by_id[t.id] = t;
        a.threats.push_back(std::move(t));
    }

    std::map<std::string, ScoredThreat> scored_by_id;
    for (const auto& scored_doc : doc.at("scored")) {
        const auto id = scored_doc.at("threat_id").get<std::string>();
        const auto it = threat_by_id.find(id);
        if (it == threat_by_id.end()) {
            throw std::invalid_argument("scored entry references unknown threat '" + id + "'");
        }
        ScoreInputs in;
        const auto& inputs = scored_doc.at("inputs");
        in.technical_severity = inputs.at("technical_severity").get<double>();
        in.economic_impact = inputs.at("economic_impact").get<double>();
        in.regulatory_consequence = inputs.at("regulatory_consequence").get<double>();
        in.exploit_probability = inputs.at("exploit_probability").get<double>();
        const auto& prov = scored_doc.at("provenance");
        auto parse_prov = [&](const char* field) {
            const auto p = provenance_from_name(prov.at(field).get<std::string>());
            if (!p) throw std::invalid_argument("unknown provenance in assessment");
            return *p;
        };
        in.ts_provenance = parse_prov("technical_severity");
        in.ei_provenance = parse_prov("economic_impact");
        in.rc_provenance = parse_prov("regulatory_consequence");
        in.p_provenance = parse_prov("exploit_probability");
        ScoredThreat st = make_scored(it->second, in);
        scored_by_id[id] = st;
        a.scored.push_back(std::move(st));
    }

    a.heatmap = report_detail::heatmap_from_json(doc.at("heatmap"));

    if (!doc.at("coverage").is_null()) {
        const auto& cov = doc.at("coverage");
        CoverageReport report;
        report.covered = cov.at("covered").get<std::size_t>();
        report.total = cov.at("total").get<std::size_t>();
        report.coverage_ratio = cov.at("coverage_ratio").get<double>();
        for (const auto& [id, controls] : cov.at("per_threat").items()) {
            std::vector<std::string> ids;
            for (const auto& c : controls) ids.push_back(c.get<std::string>());
            report.per_threat[id] = std::move(ids);
        }
        for (const auto& id_doc : cov.at("residual")) {
            const auto id = id_doc.get<std::string>();
            const auto it = scored_by_id.find(id);
            if (it == scored_by_id.end()) {
                throw std::invalid_argument("residual references unknown scored threat '" + id + "'");
            }
            report.residual.push_back(it->second);
        }
        a.coverage = std::move(report);
    }

    if (!doc.at("metrics").is_null()) {
        const auto& met = doc.at("metrics");
        MetricsSnapshot m;
        m.quarter = met.at("quarter").get<std::string>();
        m.incident_count = met.at("incident_count").get<std::size_t>();
        m.open_count = met.at("open_count").get<std::size_t>();
        for (const auto& [slug, count] : met.at("by_source").items()) {
            m.by_source[slug] = count.get<std::size_t>();
        }
        m.total_loss_usd = met.at("total_loss_usd").get<double>();
        m.mean_loss_usd = met.at("mean_loss_usd").get<double>();
        if (!met.at("mttr_seconds").is_null()) {
            m.mttr_seconds = met.at("mttr_seconds").get<double>();
        }
        for (const auto& [slug, entry] : met.at("mttr_by_category").items()) {
            const auto category = category_from_slug(slug);
            if (!category) throw std::invalid_argument("unknown category in metrics");
            m.mttr_by_category[*category] = entry.at("seconds").get<double>();
        }
        a.metrics = std::move(m);
    }

    return a;
}

inline std::string render_markdown(const Assessment& a) {
    std::string out;
    out += "# Threat Assessment: " + a.model_name + "\n\n";
    out += "Generated by " + std::string(kToolName) + " " + a.tool_version;
    if (a.generated_at) out += " at " + *a.generated_at;
    out += ".\n\n";

    out += "## Model Summary\n\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%zu elements, %zu threats enumerated, %zu scored.\n\n",
                  a.element_count, a.threats.size(), a.scored.size());
    out += line;
    if (!a.actors.empty()) {
        out += "Actors:";
        for (std::size_t i = 0; i < a.actors.size(); ++i) {
            out += i == 0 ? " " : ", ";
            out += a.actors[i].name + " (" + std::string(archetype_name(a.actors[i].archetype)) + ")";
        }
        out += "\n\n";
    }
    out += "| Layer | Elements | Interdependencies |\n| --- | --- | --- |\n";
    for (const LayerRow& row : a.matrix.rows) {
        out += "| " + std::string(layer_name(row.layer)) + " | ";
        for (std::size_t i = 0; i < row.element_ids.size(); ++i) {
            if (i > 0) out += ", ";
            out += row.element_ids[i];
        }
        out += " | ";
        for (std::size_t i = 0; i < row.interdependencies.size(); ++i) {
            const LayerRow::Edge& e = row.interdependencies[i];
            if (i > 0) out += ", ";
            out += e.flow_id + ": " + std::string(layer_name(e.from)) + " -> " +
                   std::string(layer_name(e.to));
        }
        out += " |\n";
    }
    out += "\n";

    out += "## Threats\n\n";
    if (a.scored.empty()) {
        out += "No threats to report.\n\n";
    } else {
        out += "| # | Threat | Target | Category | Score | Band | Suggested Controls |\n";
        out += "| --- | --- | --- | --- | --- | --- | --- |\n";
        std::size_t rank = 1;
        for (const ScoredThreat& st : a.scored) {
            out += "| " + std::to_string(rank++) + " | " + st.threat.id + " | " + st.threat.target +
                   " | " + std::string(st.threat.category.name()) + " | " + format_score(st.score) +
                   " | " + std::string(band_name(st.band)) + " | ";
            const std::vector<Control> controls = controls_for(st.threat);
            for (std::size_t i = 0; i < controls.size(); ++i) {
                if (i > 0) out += ", ";
                out += controls[i].id;
            }
            out += " |\n";
        }
        out += "\n";
    }

    out += "## Heatmap\n\n";
    out += "Rows: exploit probability (descending). Columns: mean impact component.\n\n";
    out += "| p \\ impact | 0-2 | 2-4 | 4-6 | 6-8 | 8-10 |\n| --- | --- | --- | --- | --- | --- |\n";
    for (std::size_t r = kHeatmapBins; r-- > 0;) {
        out += "| " + std::string(kProbabilityBinLabels[r]) + " |";
        for (std::size_t c = 0; c < kHeatmapBins; ++c) {
            const HeatmapCell& cell = a.heatmap.cells[r][c];
            if (cell.threat_ids.empty()) {
                out += "  |";
            } else {
                out += " " + std::to_string(cell.threat_ids.size()) + " " +
                       std::string(1, band_letter(*cell.dominant)) + " |";
            }
        }
        out += "\n";
    }
    out += "\n";

    out += "## Mitigation Coverage\n\n";
    if (!a.coverage) {
        out += "No control selection evaluated.\n\n";
    } else {
        const CoverageReport& cov = *a.coverage;
        char pct[64];
        std::snprintf(pct, sizeof(pct), "%.1f%%", cov.coverage_ratio * 100.0);
        out += std::to_string(cov.covered) + "/" + std::to_string(cov.total) +
               " threats covered (" + pct + ").\n\n";
        if (cov.residual.empty()) {
            out += "No residual threats: every threat matched a selected control.\n\n";
        } else {
            out += "Residual threats:\n\n| Threat | Category | Score | Band |\n| --- | --- | --- | --- |\n";
            for (const ScoredThreat& st : cov.residual) {
                out += "| " + st.threat.id + " | " + std::string(st.threat.category.name()) + " | " +
                       format_score(st.score) + " | " + std::string(band_name(st.band)) + " |\n";
            }
            out += "\n";
        }
    }

    out += "## Metrics\n\n";
    if (!a.metrics) {
        out += "No incident metrics attached.\n";
    } else {
        const MetricsSnapshot& m = *a.metrics;
        out += "Quarter " + m.quarter + ": " + std::to_string(m.incident_count) + " incidents (" +
               std::to_string(m.open_count) + " open).\n\n";
        if (m.incident_count > 0) {
            const char* vs_average = m.mean_loss_usd < kEcosystemMeanLossH12025Usd   ? "below"
                                     : m.mean_loss_usd > kEcosystemMeanLossH12025Usd ? "above"
                                                                                     : "at";
            out += "Total loss " + report_detail::usd(m.total_loss_usd) + "; mean loss " +
                   report_detail::usd(m.mean_loss_usd) + " per incident (" + vs_average +
                   " the 2025-H1 ecosystem average of $7.18M).\n\n";
        }
        if (m.mttr_seconds) {
            out += "MTTR: " + report_detail::hours(*m.mttr_seconds) + " (meets <24h target: " +
                   (meets_mttr_target(*m.mttr_seconds) ? "yes" : "no") + ").\n\n";
        } else {
            out += "MTTR: no closed incidents.\n\n";
        }
        if (!m.mttr_by_category.empty()) {
            out += "Per category:\n\n";
            for (const auto& [category, seconds] : m.mttr_by_category) {
                out += "- " + std::string(category.name()) + ": " + report_detail::hours(seconds) +
                       " (meets <24h target: " + (meets_mttr_target(seconds) ? "yes" : "no") + ")\n";
            }
            out += "\n";
        }
        if (!m.by_source.empty()) {
            out += "By source:";
            bool first = true;
            for (const auto& [slug, count] : m.by_source) {
                out += first ? " " : ", ";
                out += slug + " " + std::to_string(count);
                first = false;
            }
            out += ".\n";
        }
    }
    return out;
}

// Extended-DFD emitter. Shape mapping: external entity -> box (oracle marker
// on the label), process -> ellipse (gear marker for smart contracts),
// multi-process -> double ellipse (DeFi marker), store -> cylinder (double
// periphery for on-chain ledgers), flow -> edge (bold with lock marker for
// crypto flows), boundary -> dashed cluster. Statements follow declaration
// order.
inline std::string render_dfd(const SystemModel& model) {
    using report_detail::dot_escape;
    std::string out = "digraph \"" + dot_escape(model.name) + "\" {\n  rankdir=LR;\n";
    for (const Element& e : model.elements) {
        switch (e.kind) {
            case ElementKind::ExternalEntity: {
                std::string label = dot_escape(e.name);
                if (e.variant == BlockchainVariant::Oracle) label += "\\n[oracle]";
                out += "  \"" + e.id + "\" [shape=box, label=\"" + label + "\"];\n";
                break;
            }
            case ElementKind::Process: {
                std::string label = dot_escape(e.name);
                if (e.variant == BlockchainVariant::SmartContract) label += "\\n[gear]";
                out += "  \"" + e.id + "\" [shape=ellipse, label=\"" + label + "\"];\n";
                break;
            }
            case ElementKind::MultiProcess: {
                std::string label = dot_escape(e.name);
                if (e.variant == BlockchainVariant::DeFi) label += "\\n[DeFi]";
                out += "  \"" + e.id + "\" [shape=ellipse, peripheries=2, label=\"" + label + "\"];\n";
                break;
            }
            case ElementKind::DataStore: {
                const char* peripheries =
                    e.variant == BlockchainVariant::OnChainLedger ? ", peripheries=2" : "";
                out += "  \"" + e.id + "\" [shape=cylinder" + peripheries + ", label=\"" +
                       dot_escape(e.name) + "\"];\n";
                break;
            }
            case ElementKind::PrivilegeBoundary: {
                out += "  subgraph \"cluster_" + e.id + "\" {\n";
                out += "    style=dashed;\n";
                out += "    label=\"" + dot_escape(e.name) + "\";\n";
                out += "    \"" + e.id + "\" [shape=point, style=invis];\n";
                out += "  }\n";
                break;
            }
            case ElementKind::DataFlow: {
                std::string label = dot_escape(e.name);
                if (e.variant == BlockchainVariant::CryptoFlow) {
                    label += label.empty() ? "[lock]" : " [lock]";
                }
                if (!e.crosses.empty()) {
                    std::string names;
                    for (const std::string& b : e.crosses) {
                        if (!names.empty()) names += ", ";
                        const Element* boundary = model.find(b);
                        names += dot_escape(boundary != nullptr ? boundary->name : b);
                    }
                    label += (label.empty() ? "" : " ") + std::string("(crosses ") + names + ")";
                }
                std::string attrs;
                if (e.variant == BlockchainVariant::CryptoFlow) attrs = "style=bold";
                if (!label.empty()) {
                    if (!attrs.empty()) attrs += ", ";
                    attrs += "label=\"" + label + "\"";
                }
                out += "  \"" + e.source + "\" -> \"" + e.target + "\"";
                if (!attrs.empty()) out += " [" + attrs + "]";
                out += ";\n";
                break;
            }
        }
    }
    out += "}\n";
    return out;
}

enum class GridFormat { Ascii, Csv };

// Grid renderers print rows from the highest probability bin down.
inline std::string render_heatmap_grid(const Heatmap& map, GridFormat format) {
    std::string out;
    if (format == GridFormat::Csv) {
        out += "prob\\impact";
        for (auto label : kImpactBinLabels) out += "," + std::string(label);
        out += "\n";
        for (std::size_t r = kHeatmapBins; r-- > 0;) {
            out += std::string(kProbabilityBinLabels[r]);
            for (std::size_t c = 0; c < kHeatmapBins; ++c) {
                const HeatmapCell& cell = map.cells[r][c];
                out += "," + std::to_string(cell.threat_ids.size()) + ":" +
                       (cell.dominant ? std::string(1, band_letter(*cell.dominant)) : "-");
            }
            out += "\n";
        }
        return out;
    }

    char buf[64];
    std::snprintf(buf, sizeof(buf), "%12s", "prob\\impact");
    out += buf;
    for (auto label : kImpactBinLabels) {
        std::snprintf(buf, sizeof(buf), "%9s", std::string(label).c_str());
        out += buf;
    }
    out += "\n";
    for (std::size_t r = kHeatmapBins; r-- > 0;) {
        std::snprintf(buf, sizeof(buf), "%12s", std::string(kProbabilityBinLabels[r]).c_str());
        out += buf;
        for (std::size_t c = 0; c < kHeatmapBins; ++c) {
            const HeatmapCell& cell = map.cells[r][c];
            std::string text = ".";
            if (!cell.threat_ids.empty()) {
                text = std::to_string(cell.threat_ids.size()) + " " +
                       std::string(1, band_letter(*cell.dominant));
            }
            std::snprintf(buf, sizeof(buf), "%9s", text.c_str());
            out += buf;
        }
        out += "\n";
    }
    return out;
}

// Rule tables and taxonomies in the canonical schema, for `catalog dump`.
inline std::string render_catalog_json() {
    using nlohmann::json;
    json doc;
    doc["schema_version"] = kSchemaVersion;

    auto taxonomy = [](auto first, std::size_t count) {
        json arr = json::array();
        for (std::size_t i = 0; i < count; ++i) {
            const ThreatCategory c(static_cast<decltype(first)>(i));
            arr.push_back({{"code", std::string(c.code())},
                           {"slug", std::string(c.slug())},
                           {"name", std::string(c.name())}});
        }
        return arr;
    };
    doc["taxonomies"] = {{"stride", taxonomy(StrideCategory::Spoofing, kStrideCount)},
                         {"cryptoq", taxonomy(CryptoqCategory::Collusion, kCryptoqCount)},
                         {"linddun", taxonomy(LinddunCategory::Linkability, kLinddunCount)}};

    json api_risks = json::array();
    for (std::size_t i = 0; i < kApiRiskCount; ++i) {
        const auto risk = static_cast<ApiRisk>(i);
        api_risks.push_back(
            {{"code", std::string(api_code(risk))}, {"name", std::string(api_name(risk))}});
    }
    doc["api_risks"] = api_risks;

    json stride_api = json::object();
    for (std::size_t i = 0; i < kStrideCount; ++i) {
        const ThreatCategory c(static_cast<StrideCategory>(i));
        json arr = json::array();
        for (ApiRisk r : map_stride_to_api(c)) arr.push_back(std::string(api_code(r)));
        stride_api[std::string(c.code())] = arr;
    }

    auto codes = [](std::initializer_list<ThreatCategory> categories) {
        std::set<ThreatCategory> ordered(categories);
        json arr = json::array();
        for (const ThreatCategory& c : ordered) arr.push_back(std::string(c.code()));
        return arr;
    };
    using S = StrideCategory;
    using C = CryptoqCategory;
    using L = LinddunCategory;
    doc["rules"] = {
        {"base_kind",
         {{"entity", codes({S::Spoofing, S::Repudiation})},
          {"process", codes({S::Spoofing, S::Tampering, S::Repudiation, S::InformationDisclosure,
                             S::DenialOfService, S::ElevationOfPrivilege})},
          {"multiprocess", codes({S::Spoofing, S::Tampering, S::Repudiation,
                                  S::InformationDisclosure, S::DenialOfService,
                                  S::ElevationOfPrivilege})},
          {"store", codes({S::Tampering, S::InformationDisclosure, S::Repudiation,
                           S::DenialOfService})},
          {"flow", codes({S::Tampering, S::InformationDisclosure, S::DenialOfService})},
          {"boundary", json::array()}}},
        {"variant_additions",
         {{"oracle", codes({C::ReentrancyOracleManipulation, C::OffChainDataPoisoning})},
          {"contract", codes({C::ReentrancyOracleManipulation, C::TokenisationRisks})},
          {"defi", codes({C::YieldFarmingExploits, C::ReentrancyOracleManipulation})},
          {"onchain", json::array()},
          {"crypto", json::array()},
          {"offonchain", json::array()}}},
        {"tag_additions",
         {{"mpc", codes({C::Collusion})},
          {"bridge", codes({S::Tampering})},
          {"user_facing", codes({C::PhishingSocialEngineering, L::Unawareness})},
          {"personal_data", codes({L::Linkability, L::Identifiability, L::Detectability,
                                   L::DisclosureOfInformation, L::NonCompliance})},
          {"signature_dependent", codes({C::QuantumThreats})}}},
        {"conditional",
         json::array({"flows with non-empty crosses add S-EOP",
                      "layer ui behaves like tag user_facing",
                      "signature_dependent applies on onchain stores and crypto flows",
                      "personal_data adds L-NRP on on-chain elements",
                      "variant onchain suppresses S-TAM (tamper-resistant ledger)"})},
        {"stride_api_map", stride_api},
        {"oracle_api_attachment", "API7"},
        {"actor_suggestions",
         {{"C-PSE", "phishing"},
          {"C-COL", "insider"},
          {"C-QNT", "state_sponsored"},
          {"S-TAM@infra", "state_sponsored"}}},
        {"default_probabilities",
         {{"bridge_flow", 0.7},
          {"oracle_manipulation", 0.6},
          {"infrastructure_key_compromise", 0.8},
          {"fallback", 0.5}}},
    };
    return doc.dump(2) + "\n";
}

// Control catalogue in the canonical schema, for `catalog dump --controls`.
inline std::string render_controls_json() {
    using nlohmann::json;
    json controls = json::array();
    for (const Control& c : control_catalogue()) {
        json applies = json::array();
        for (const ThreatCategory& category : c.applies_to) {
            applies.push_back(std::string(category.code()));
        }
        controls.push_back({{"id", c.id},
                            {"name", c.name},
                            {"layer", std::string(mitigation_layer_slug(c.layer))},
                            {"applies_to", applies},
                            {"note", c.note}});
    }
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["controls"] = controls;
    return doc.dump(2) + "\n";
}

}  // namespace cntmf
