#pragma once

// Command-line surface. One command per framework phase plus plumbing:
//
//   validate | threats | report | dfd | heatmap
//   incidents ingest|metrics|recalibrate
//   catalog dump
//
// Exit codes are a compatibility contract:
//   0 success, 1 validation violations, 2 parse error, 3 I/O or schema
//   error, 4 usage error.

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cntmf/dsl.hpp"
#include "cntmf/feedback.hpp"
#include "cntmf/report.hpp"
#include "cntmf/version.hpp"

namespace cntmf::cli {

inline constexpr int kOk = 0;
inline constexpr int kViolations = 1;
inline constexpr int kParseFailure = 2;
inline constexpr int kIoError = 3;
inline constexpr int kUsage = 4;

namespace cli_detail {

inline std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return out.good();
}

inline void print_parse_errors(const ParseResult& result, std::ostream& err) {
    for (const ParseError& e : result.errors) {
        err << e.span.file << ":" << e.span.line << ":" << e.span.column << ": error: " << e.message;
        if (!e.expected.empty()) {
            err << " (expected: ";
            for (std::size_t i = 0; i < e.expected.size(); ++i) {
                if (i > 0) err << ", ";
                err << e.expected[i];
            }
            err << ")";
        }
        err << "\n";
    }
}

inline void print_violations(const std::vector<Violation>& violations, const ParseResult& parsed,
                             std::ostream& err) {
    for (const Violation& v : violations) {
        const auto span = parsed.spans.find(v.element_id);
        if (span != parsed.spans.end()) {
            err << span->second.file << ":" << span->second.line << ": ";
        }
        err << (v.severity == Severity::Error ? "error" : "warning") << ": [" << v.rule << "] "
            << v.element_id << ": " << v.message << "\n";
    }
}

struct ModelGate {
    SystemModel model;
    ParseResult parsed;
    int exit_code = kOk;  // kOk when usable
};

// Loads, parses, and validates a model file; diagnostics go to stderr so
// machine-readable stdout stays clean. The model is usable when
// exit_code == kOk.
inline ModelGate load_model(const std::string& path, bool allow_warnings, std::ostream& err) {
    ModelGate gate;
    const auto text = read_file(path);
    if (!text) {
        err << "error: cannot read model file '" << path << "'\n";
        gate.exit_code = kIoError;
        return gate;
    }
    gate.parsed = parse_model(*text, path);
    if (!gate.parsed.ok()) {
        print_parse_errors(gate.parsed, err);
        gate.exit_code = kParseFailure;
        return gate;
    }
    gate.model = *gate.parsed.model;
    const std::vector<Violation> violations = validate_model(gate.model);
    if (!violations.empty()) {
        print_violations(violations, gate.parsed, err);
        if (has_errors(violations) || !allow_warnings) {
            gate.exit_code = kViolations;
            return gate;
        }
        err << "proceeding with " << violations.size() << " warning(s)\n";
    }
    return gate;
}

inline std::string probability_text(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", p);
    return buf;
}

inline void print_snapshot(const MetricsSnapshot& m, std::ostream& out) {
    out << "Quarter " << m.quarter << ": " << m.incident_count << " incidents (" << m.open_count
        << " open)\n";
    if (m.incident_count > 0) {
        const char* vs_average = m.mean_loss_usd < kEcosystemMeanLossH12025Usd   ? "below"
                                 : m.mean_loss_usd > kEcosystemMeanLossH12025Usd ? "above"
                                                                                 : "at";
        out << "Total loss " << report_detail::usd(m.total_loss_usd) << "; mean loss "
            << report_detail::usd(m.mean_loss_usd) << " per incident (" << vs_average
            << " the 2025-H1 ecosystem average of $7.18M)\n";
    }
    if (m.mttr_seconds) {
        out << "MTTR: " << report_detail::hours(*m.mttr_seconds) << " (meets <24h target: "
            << (meets_mttr_target(*m.mttr_seconds) ? "yes" : "no") << ")\n";
    } else {
        out << "MTTR: no closed incidents\n";
    }
    for (const auto& [category, seconds] : m.mttr_by_category) {
        out << "  " << category.name() << ": " << report_detail::hours(seconds)
            << " (meets <24h target: " << (meets_mttr_target(seconds) ? "yes" : "no") << ")\n";
    }
    if (!m.by_source.empty()) {
        out << "By source:";
        bool first = true;
        for (const auto& [slug, count] : m.by_source) {
            out << (first ? " " : ", ") << slug << " " << count;
            first = false;
        }
        out << "\n";
    }
}

}  // namespace cli_detail

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    using cli_detail::read_file;
    using cli_detail::write_file;

    CLI::App app{"CNTMF: threat-model-as-code for hybrid fiat/crypto systems"};
    app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kToolVersion));
    app.require_subcommand(1);

    // validate
    std::string validate_path;
    auto* cmd_validate = app.add_subcommand("validate", "Check a model's structural rules");
    cmd_validate->add_option("model", validate_path, "Model file (.cntmf)")->required();

    // threats
    std::string threats_path;
    bool threats_json = false;
    bool threats_allow_warnings = false;
    auto* cmd_threats = app.add_subcommand("threats", "Enumerate threats for a model");
    cmd_threats->add_option("model", threats_path, "Model file (.cntmf)")->required();
    cmd_threats->add_flag("--json", threats_json, "Emit the canonical JSON schema");
    cmd_threats->add_flag("--allow-warnings", threats_allow_warnings,
                          "Proceed when only warning-class violations exist");

    // report
    std::string report_path, report_out_dir, report_overrides, report_controls, report_ledger,
        report_quarter;
    bool report_no_timestamp = false;
    bool report_allow_warnings = false;
    std::size_t report_top = 10;
    auto* cmd_report = app.add_subcommand("report", "Run the full pipeline and write artifacts");
    cmd_report->add_option("model", report_path, "Model file (.cntmf)")->required();
    cmd_report->add_option("--out", report_out_dir, "Output directory")->required();
    cmd_report->add_option("--overrides", report_overrides, "Score override file (JSON)");
    cmd_report->add_option("--controls", report_controls, "Selected control ids (one per line)");
    cmd_report->add_option("--ledger", report_ledger, "Incident ledger (JSONL) for the metrics section");
    cmd_report->add_option("--quarter", report_quarter, "Quarter (YYYYQn) for the metrics section");
    cmd_report->add_flag("--no-timestamp", report_no_timestamp,
                         "Suppress the timestamp for byte-stable output");
    cmd_report->add_flag("--allow-warnings", report_allow_warnings,
                         "Proceed when only warning-class violations exist");
    cmd_report->add_option("--top", report_top, "Rows in the stdout summary");

    // dfd
    std::string dfd_path, dfd_out;
    bool dfd_allow_warnings = false;
    auto* cmd_dfd = app.add_subcommand("dfd", "Emit the extended DFD as a DOT graph");
    cmd_dfd->add_option("model", dfd_path, "Model file (.cntmf)")->required();
    cmd_dfd->add_option("-o,--out", dfd_out, "Write to a file instead of stdout");
    cmd_dfd->add_flag("--allow-warnings", dfd_allow_warnings,
                      "Proceed when only warning-class violations exist");

    // heatmap
    std::string heatmap_path, heatmap_overrides, heatmap_format = "ascii";
    bool heatmap_json = false;
    bool heatmap_allow_warnings = false;
    auto* cmd_heatmap = app.add_subcommand("heatmap", "Render the probability-impact grid");
    cmd_heatmap->add_option("model", heatmap_path, "Model file (.cntmf)")->required();
    cmd_heatmap->add_option("--overrides", heatmap_overrides, "Score override file (JSON)");
    cmd_heatmap->add_option("--format", heatmap_format, "Grid format")
        ->check(CLI::IsMember({"ascii", "csv"}));
    cmd_heatmap->add_flag("--json", heatmap_json, "Emit the canonical JSON schema");
    cmd_heatmap->add_flag("--allow-warnings", heatmap_allow_warnings,
                          "Proceed when only warning-class violations exist");

    // incidents
    auto* cmd_incidents = app.add_subcommand("incidents", "Feedback-loop commands");
    cmd_incidents->require_subcommand(1);

    std::string ingest_ledger, ingest_records;
    auto* cmd_ingest = cmd_incidents->add_subcommand("ingest", "Append validated records");
    cmd_ingest->add_option("--ledger", ingest_ledger, "Ledger file (JSONL)")->required();
    cmd_ingest->add_option("--records", ingest_records, "New records file (JSONL)")->required();

    std::string metrics_ledger, metrics_quarter;
    auto* cmd_metrics = cmd_incidents->add_subcommand("metrics", "Print a quarterly snapshot");
    cmd_metrics->add_option("--ledger", metrics_ledger, "Ledger file (JSONL)")->required();
    cmd_metrics->add_option("--quarter", metrics_quarter, "Quarter (YYYYQn)")->required();

    std::string recal_ledger, recal_priors, recal_out, recal_quarter, recal_from, recal_to;
    double recal_alpha = 0.3;
    auto* cmd_recal = cmd_incidents->add_subcommand("recalibrate",
                                                    "Blend priors toward observed incident shares");
    cmd_recal->add_option("--ledger", recal_ledger, "Ledger file (JSONL)")->required();
    cmd_recal->add_option("--priors", recal_priors, "Current priors file (JSON); defaults if omitted");
    cmd_recal->add_option("--out", recal_out, "Where to write updated priors");
    cmd_recal->add_option("--quarter", recal_quarter, "Window as a quarter (YYYYQn)");
    cmd_recal->add_option("--from", recal_from, "Window start date (YYYY-MM-DD, inclusive)");
    cmd_recal->add_option("--to", recal_to, "Window end date (YYYY-MM-DD, exclusive)");
    cmd_recal->add_option("--alpha", recal_alpha, "Blend factor in [0, 1]");

    // catalog
    auto* cmd_catalog = app.add_subcommand("catalog", "Rule-table and control-catalogue dumps");
    cmd_catalog->require_subcommand(1);
    bool dump_controls = false;
    auto* cmd_dump = cmd_catalog->add_subcommand("dump", "Dump tables in the canonical schema");
    cmd_dump->add_flag("--controls", dump_controls, "Dump the control catalogue instead");

    std::vector<std::string> cli_args(args.rbegin(), args.rend());
    try {
        app.parse(cli_args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion& e) {
        out << app.version() << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (*cmd_validate) {
            const auto text = read_file(validate_path);
            if (!text) {
                err << "error: cannot read model file '" << validate_path << "'\n";
                return kIoError;
            }
            const ParseResult parsed = parse_model(*text, validate_path);
            if (!parsed.ok()) {
                cli_detail::print_parse_errors(parsed, err);
                return kParseFailure;
            }
            const std::vector<Violation> violations = validate_model(*parsed.model);
            cli_detail::print_violations(violations, parsed, out);
            return violations.empty() ? kOk : kViolations;
        }

        if (*cmd_threats) {
            auto gate = cli_detail::load_model(threats_path, threats_allow_warnings, err);
            if (gate.exit_code != kOk) return gate.exit_code;
            const std::vector<Threat> threats = enumerate_threats(gate.model);
            if (threats_json) {
                nlohmann::json arr = nlohmann::json::array();
                for (const Threat& t : threats) arr.push_back(report_detail::threat_to_json(t));
                nlohmann::json doc;
                doc["schema_version"] = kSchemaVersion;
                doc["threats"] = arr;
                out << doc.dump(2) << "\n";
            } else {
                for (const Threat& t : threats) {
                    out << t.id << "  " << t.category.name() << "  target=" << t.target;
                    if (t.suggested_actor) {
                        out << "  actor=" << archetype_keyword(*t.suggested_actor);
                    }
                    if (!t.api_mappings.empty()) {
                        out << "  api=";
                        bool first = true;
                        for (ApiRisk r : t.api_mappings) {
                            if (!first) out << ",";
                            out << api_code(r);
                            first = false;
                        }
                    }
                    out << "\n";
                }
            }
            return kOk;
        }

        if (*cmd_report) {
            if (report_ledger.empty() != report_quarter.empty()) {
                err << "usage error: --ledger and --quarter must be given together\n";
                return kUsage;
            }
            auto gate = cli_detail::load_model(report_path, report_allow_warnings, err);
            if (gate.exit_code != kOk) return gate.exit_code;

            OverrideSet overrides;
            if (!report_overrides.empty()) {
                const auto text = read_file(report_overrides);
                if (!text) {
                    err << "error: cannot read overrides file '" << report_overrides << "'\n";
                    return kIoError;
                }
                overrides = parse_overrides(*text);
            }

            std::optional<std::set<std::string>> selection;
            if (!report_controls.empty()) {
                const auto text = read_file(report_controls);
                if (!text) {
                    err << "error: cannot read controls file '" << report_controls << "'\n";
                    return kIoError;
                }
                selection = parse_control_selection(*text);
            }

            std::optional<MetricsSnapshot> snapshot;
            if (!report_ledger.empty()) {
                const auto quarter = parse_quarter(report_quarter);
                if (!quarter) {
                    err << "usage error: invalid quarter '" << report_quarter
                        << "' (expected YYYYQn)\n";
                    return kUsage;
                }
                const auto text = read_file(report_ledger);
                if (!text) {
                    err << "error: cannot read ledger file '" << report_ledger << "'\n";
                    return kIoError;
                }
                const auto [ledger, parse_error] = load_ledger(*text);
                if (parse_error) {
                    err << report_ledger << ":" << parse_error->line << ": " << parse_error->message
                        << "\n";
                    return kIoError;
                }
                snapshot = quarterly_snapshot(*ledger, *quarter);
            }

            std::optional<UtcSeconds> timestamp;
            if (!report_no_timestamp) timestamp = static_cast<UtcSeconds>(std::time(nullptr));
            const Assessment assessment =
                build_assessment(gate.model, overrides, selection, snapshot, timestamp);

            namespace fs = std::filesystem;
            std::error_code ec;
            fs::create_directories(report_out_dir, ec);
            if (ec) {
                err << "error: cannot create output directory '" << report_out_dir << "'\n";
                return kIoError;
            }
            const fs::path dir(report_out_dir);
            const bool wrote =
                write_file((dir / "report.md").string(), render_markdown(assessment)) &&
                write_file((dir / "assessment.json").string(), render_structured(assessment)) &&
                write_file((dir / "model.dot").string(), render_dfd(gate.model)) &&
                write_file((dir / "heatmap.csv").string(),
                           render_heatmap_grid(assessment.heatmap, GridFormat::Csv));
            if (!wrote) {
                err << "error: cannot write artifacts into '" << report_out_dir << "'\n";
                return kIoError;
            }

            std::size_t rank = 1;
            for (const ScoredThreat& st : assessment.scored) {
                if (rank > report_top) break;
                out << rank << ". " << st.threat.id << "  " << format_score(st.score) << " "
                    << band_name(st.band) << "  " << st.threat.category.name() << " -> "
                    << st.threat.target << "\n";
                ++rank;
            }
            return kOk;
        }

        if (*cmd_dfd) {
            auto gate = cli_detail::load_model(dfd_path, dfd_allow_warnings, err);
            if (gate.exit_code != kOk) return gate.exit_code;
            const std::string dot = render_dfd(gate.model);
            if (dfd_out.empty()) {
                out << dot;
            } else if (!write_file(dfd_out, dot)) {
                err << "error: cannot write '" << dfd_out << "'\n";
                return kIoError;
            }
            return kOk;
        }

        if (*cmd_heatmap) {
            auto gate = cli_detail::load_model(heatmap_path, heatmap_allow_warnings, err);
            if (gate.exit_code != kOk) return gate.exit_code;
            OverrideSet overrides;
            if (!heatmap_overrides.empty()) {
                const auto text = read_file(heatmap_overrides);
                if (!text) {
                    err << "error: cannot read overrides file '" << heatmap_overrides << "'\n";
                    return kIoError;
                }
                overrides = parse_overrides(*text);
            }
            const std::vector<Threat> threats = enumerate_threats(gate.model);
            const Heatmap map = build_heatmap(prioritize(score_all(threats, gate.model, overrides)));
            if (heatmap_json) {
                nlohmann::json doc;
                doc["schema_version"] = kSchemaVersion;
                doc["heatmap"] = report_detail::heatmap_to_json(map);
                out << doc.dump(2) << "\n";
            } else {
                out << render_heatmap_grid(
                    map, heatmap_format == "csv" ? GridFormat::Csv : GridFormat::Ascii);
            }
            return kOk;
        }

        if (*cmd_ingest) {
            const auto records_text = read_file(ingest_records);
            if (!records_text) {
                err << "error: cannot read records file '" << ingest_records << "'\n";
                return kIoError;
            }
            Ledger ledger;
            if (const auto existing = read_file(ingest_ledger)) {
                const auto [loaded, parse_error] = load_ledger(*existing);
                if (parse_error) {
                    err << ingest_ledger << ":" << parse_error->line << ": " << parse_error->message
                        << "\n";
                    return kIoError;
                }
                ledger = *loaded;
            }
            const std::size_t before = ledger.records.size();
            int lineno = 0;
            std::size_t pos = 0;
            const std::string& text = *records_text;
            std::string appended;
            while (pos <= text.size()) {
                const std::size_t nl = text.find('\n', pos);
                std::string line =
                    text.substr(pos, nl == std::string::npos ? text.size() - pos : nl - pos);
                ++lineno;
                while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
                if (!line.empty()) {
                    try {
                        const IncidentRecord record = parse_incident_json(line);
                        ledger = ingest_incident(ledger, record);
                        appended += incident_to_json(record) + "\n";
                    } catch (const std::exception& e) {
                        err << ingest_records << ":" << lineno << ": " << e.what() << "\n";
                        return kIoError;
                    }
                }
                if (nl == std::string::npos) break;
                pos = nl + 1;
            }
            std::ofstream append(ingest_ledger, std::ios::binary | std::ios::app);
            if (!append || !(append << appended)) {
                err << "error: cannot write ledger '" << ingest_ledger << "'\n";
                return kIoError;
            }
            out << "ingested " << (ledger.records.size() - before) << " record(s); ledger now holds "
                << ledger.records.size() << "\n";
            return kOk;
        }

        if (*cmd_metrics) {
            const auto quarter = parse_quarter(metrics_quarter);
            if (!quarter) {
                err << "usage error: invalid quarter '" << metrics_quarter << "' (expected YYYYQn)\n";
                return kUsage;
            }
            const auto text = read_file(metrics_ledger);
            if (!text) {
                err << "error: cannot read ledger file '" << metrics_ledger << "'\n";
                return kIoError;
            }
            const auto [ledger, parse_error] = load_ledger(*text);
            if (parse_error) {
                err << metrics_ledger << ":" << parse_error->line << ": " << parse_error->message
                    << "\n";
                return kIoError;
            }
            cli_detail::print_snapshot(quarterly_snapshot(*ledger, *quarter), out);
            return kOk;
        }

        if (*cmd_recal) {
            TimeRange window;
            if (!recal_quarter.empty()) {
                if (!recal_from.empty() || !recal_to.empty()) {
                    err << "usage error: give either --quarter or --from/--to, not both\n";
                    return kUsage;
                }
                const auto quarter = parse_quarter(recal_quarter);
                if (!quarter) {
                    err << "usage error: invalid quarter '" << recal_quarter
                        << "' (expected YYYYQn)\n";
                    return kUsage;
                }
                window = quarter_range(*quarter);
            } else if (!recal_from.empty() && !recal_to.empty()) {
                const auto from = parse_utc_date(recal_from);
                const auto to = parse_utc_date(recal_to);
                if (!from || !to) {
                    err << "usage error: dates must be YYYY-MM-DD\n";
                    return kUsage;
                }
                window = TimeRange{*from, *to};
            } else {
                err << "usage error: a window is required (--quarter or --from/--to)\n";
                return kUsage;
            }
            if (!(recal_alpha >= 0.0 && recal_alpha <= 1.0)) {
                err << "usage error: --alpha must be within [0, 1]\n";
                return kUsage;
            }

            const auto text = read_file(recal_ledger);
            if (!text) {
                err << "error: cannot read ledger file '" << recal_ledger << "'\n";
                return kIoError;
            }
            const auto [ledger, parse_error] = load_ledger(*text);
            if (parse_error) {
                err << recal_ledger << ":" << parse_error->line << ": " << parse_error->message
                    << "\n";
                return kIoError;
            }

            ProbabilityPriors priors = default_priors();
            if (!recal_priors.empty()) {
                const auto priors_text = read_file(recal_priors);
                if (!priors_text) {
                    err << "error: cannot read priors file '" << recal_priors << "'\n";
                    return kIoError;
                }
                priors = parse_priors(*priors_text);
            }

            const ProbabilityPriors updated = recalibrate(*ledger, priors, window, recal_alpha);
            if (updated == priors) {
                out << "no change (no incidents in window)\n";
            } else {
                for (const auto& [category, p] : updated.by_category) {
                    const double old_p = priors.by_category.at(category);
                    if (old_p == p) continue;
                    out << category.slug() << ": " << cli_detail::probability_text(old_p) << " -> "
                        << cli_detail::probability_text(p) << "\n";
                }
            }
            if (!recal_out.empty() && !write_file(recal_out, priors_to_json(updated))) {
                err << "error: cannot write priors file '" << recal_out << "'\n";
                return kIoError;
            }
            return kOk;
        }

        if (*cmd_dump) {
            out << (dump_controls ? render_controls_json() : render_catalog_json());
            return kOk;
        }
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
    }

    err << "usage error: no command given\n";
    return kUsage;
}

inline int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace cntmf::cli
