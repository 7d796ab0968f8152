#pragma once

// Adaptive mitigation layers: a fixed control catalogue mapping threat
// categories to controls, plus binary coverage reporting over a selected
// control set. The catalogue covers every category (checked by tests), so no
// enumerable threat is unmitigable.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cntmf/catalog.hpp"
#include "cntmf/risk.hpp"
#include "cntmf/taxonomy.hpp"

namespace cntmf {

enum class MitigationLayer { TraditionalControls, CryptoControls, Web3Analytics, ProcessControls };

constexpr std::string_view mitigation_layer_name(MitigationLayer l) {
    switch (l) {
        case MitigationLayer::TraditionalControls: return "Traditional Controls";
        case MitigationLayer::CryptoControls: return "Crypto Controls";
        case MitigationLayer::Web3Analytics: return "Web3 Analytics";
        case MitigationLayer::ProcessControls: return "Process Controls";
    }
    return "Traditional Controls";
}

constexpr std::string_view mitigation_layer_slug(MitigationLayer l) {
    switch (l) {
        case MitigationLayer::TraditionalControls: return "traditional_controls";
        case MitigationLayer::CryptoControls: return "crypto_controls";
        case MitigationLayer::Web3Analytics: return "web3_analytics";
        case MitigationLayer::ProcessControls: return "process_controls";
    }
    return "traditional_controls";
}

struct Control {
    std::string id;
    std::string name;
    MitigationLayer layer = MitigationLayer::TraditionalControls;
    std::set<ThreatCategory> applies_to;
    std::string note;

    bool operator==(const Control&) const = default;
};

// The shipped catalogue, sorted by control id.
inline const std::vector<Control>& control_catalogue() {
    using S = StrideCategory;
    using C = CryptoqCategory;
    using L = LinddunCategory;
    static const std::vector<Control> catalogue{
        {"audit_logging", "Audit Logging", MitigationLayer::TraditionalControls,
         {S::Repudiation},
         "Tamper-evident activity logs across fiat and crypto operations."},
        {"firewalls_access_controls", "Firewalls and Access Controls", MitigationLayer::TraditionalControls,
         {S::DenialOfService, S::InformationDisclosure},
         "Perimeter and least-privilege controls for fiat-side layers."},
        {"formal_verification", "Formal Verification", MitigationLayer::CryptoControls,
         {C::ReentrancyOracleManipulation, C::TokenisationRisks},
         "Machine-checked proofs of smart-contract state transitions."},
        {"graph_analytics_monitoring", "Graph Analytics Monitoring", MitigationLayer::Web3Analytics,
         {C::OffChainDataPoisoning, C::ReentrancyOracleManipulation},
         "Graph databases and analytics that surface hidden risk connections."},
        {"hardware_wallets_hsm", "Hardware Wallets / HSM", MitigationLayer::CryptoControls,
         {S::Tampering, S::InformationDisclosure},
         "Hardware-isolated key storage for custody assets."},
        {"mpc_key_management", "MPC Key Management", MitigationLayer::CryptoControls,
         {S::Tampering, S::Spoofing},
         "Distributed key shares remove single-point signing authority."},
        {"post_quantum_signatures", "Post-Quantum Signatures", MitigationLayer::CryptoControls,
         {C::QuantumThreats},
         "Quantum-resistant key schemes for long-lived signatures."},
        {"realtime_monitoring_response", "Real-Time Monitoring and Response", MitigationLayer::Web3Analytics,
         {C::ReentrancyOracleManipulation, C::YieldFarmingExploits, S::DenialOfService},
         "On-chain monitoring with automated alert-to-response hand-off."},
        {"runtime_policy_cicd", "Runtime Policy in CI/CD", MitigationLayer::ProcessControls,
         {S::ElevationOfPrivilege, S::Tampering, L::NonCompliance},
         "Policy-as-code gates on configurations and deployments."},
        {"sast_dast", "SAST/DAST", MitigationLayer::CryptoControls,
         {C::ReentrancyOracleManipulation, C::YieldFarmingExploits, S::ElevationOfPrivilege},
         "Static and dynamic analysis of contract and API code."},
        {"supplier_audit", "Supplier Audit", MitigationLayer::ProcessControls,
         {C::Collusion, C::OffChainDataPoisoning},
         "Integrated audits of third-party code, feeds, and operators."},
        {"user_education", "User Education", MitigationLayer::ProcessControls,
         {C::PhishingSocialEngineering, L::Unawareness},
         "Phishing and wallet-security training for end users."},
        {"zero_trust", "Zero-Trust Architecture", MitigationLayer::TraditionalControls,
         {S::Spoofing, S::ElevationOfPrivilege},
         "Continuous verification of every access request."},
        {"zk_snark_privacy", "zk-SNARK Privacy", MitigationLayer::CryptoControls,
         {L::Linkability, L::Identifiability, L::Detectability, L::DisclosureOfInformation,
          L::NonRepudiation, S::InformationDisclosure},
         "Verifiable computation without revealing underlying data."},
    };
    return catalogue;
}

inline const Control* find_control(std::string_view id) {
    for (const Control& c : control_catalogue()) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

// All catalogue controls applicable to the threat's category, by control id.
inline std::vector<Control> controls_for(const Threat& threat) {
    std::vector<Control> out;
    for (const Control& c : control_catalogue()) {
        if (c.applies_to.count(threat.category) > 0) out.push_back(c);
    }
    return out;
}

struct CoverageReport {
    std::map<std::string, std::vector<std::string>> per_threat;  // threat id -> matched control ids
    std::vector<ScoredThreat> residual;                          // uncovered, prioritized
    std::size_t covered = 0;
    std::size_t total = 0;
    double coverage_ratio = 1.0;  // covered / total; 1 for an empty threat set

    bool operator==(const CoverageReport&) const = default;
};

// A threat is covered iff at least one selected control applies to its
// category. Throws std::invalid_argument when the selection names controls
// that are not in the catalogue.
inline CoverageReport coverage(const std::vector<ScoredThreat>& scored,
                               const std::set<std::string>& selected) {
    std::string unknown;
    for (const std::string& id : selected) {
        if (find_control(id) == nullptr) {
            if (!unknown.empty()) unknown += ", ";
            unknown += id;
        }
    }
    if (!unknown.empty()) {
        throw std::invalid_argument("unknown control ids: " + unknown);
    }

    CoverageReport report;
    report.total = scored.size();
    std::vector<ScoredThreat> residual;
    for (const ScoredThreat& st : scored) {
        std::vector<std::string> matched;
        for (const Control& c : control_catalogue()) {
            if (selected.count(c.id) > 0 && c.applies_to.count(st.threat.category) > 0) {
                matched.push_back(c.id);
            }
        }
        if (matched.empty()) {
            residual.push_back(st);
        } else {
            ++report.covered;
        }
        report.per_threat[st.threat.id] = std::move(matched);
    }
    report.residual = prioritize(std::move(residual));
    report.coverage_ratio =
        report.total == 0 ? 1.0 : static_cast<double>(report.covered) / static_cast<double>(report.total);
    return report;
}

// Selection file: one control id per line; '#' comments and blank lines skipped.
inline std::set<std::string> parse_control_selection(const std::string& text) {
    std::set<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? text.size() - pos : nl - pos);
        if (const std::size_t hash = line.find('#'); hash != std::string::npos) {
            line.resize(hash);
        }
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
            line.pop_back();
        }
        std::size_t start = 0;
        while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
        if (start < line.size()) out.insert(line.substr(start));
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return out;
}

}  // namespace cntmf
