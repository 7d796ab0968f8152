#pragma once

// Threat enumeration rules. Three layered passes build the category set for
// an element: the base STRIDE-per-kind table, then blockchain-variant /
// layer / tag additions, then suppressions (tamper-resistant on-chain
// ledgers drop Tampering). A later rule re-adding a category replaces its
// rationale, so e.g. bridge-tagged flows keep a single Tampering threat with
// the bridge-specific wording.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cntmf/model.hpp"
#include "cntmf/taxonomy.hpp"

namespace cntmf {

struct ThreatRationale {
    std::string rule;  // rule-table row id, e.g. "variant:oracle"
    std::string text;  // one-sentence explanation for reports

    bool operator==(const ThreatRationale&) const = default;
};

struct Threat {
    std::string id;  // "<element_id>:<category_code>:<n>", n = 1 per (element, category)
    std::string target;
    ThreatCategory category;
    ThreatRationale rationale;
    std::set<ApiRisk> api_mappings;
    std::optional<ActorArchetype> suggested_actor;

    bool operator==(const Threat&) const = default;
};

// STRIDE -> OWASP API Top 10. Total over all categories; privacy and
// cryptocurrency categories map to the empty set (Oracle-variant targets pick
// up API7 separately in enumerate_threats).
inline std::set<ApiRisk> map_stride_to_api(const ThreatCategory& category) {
    const auto* stride = std::get_if<StrideCategory>(&category.value());
    if (stride == nullptr) return {};
    switch (*stride) {
        case StrideCategory::Spoofing:
            return {ApiRisk::BrokenAuthentication};
        case StrideCategory::DenialOfService:
            return {ApiRisk::UnrestrictedResourceConsumption};
        case StrideCategory::ElevationOfPrivilege:
            return {ApiRisk::BrokenObjectLevelAuthorisation, ApiRisk::BrokenFunctionLevelAuthorisation};
        case StrideCategory::InformationDisclosure:
            return {ApiRisk::BrokenObjectPropertyLevelAuthorisation};
        case StrideCategory::Tampering:
            return {ApiRisk::SecurityMisconfiguration, ApiRisk::UnsafeConsumptionOfApis};
        case StrideCategory::Repudiation:
            return {};
    }
    return {};
}

namespace catalog_detail {

// Variants that put an element on the on-chain side of the system.
inline bool is_on_chain(const Element& e) {
    if (!e.variant) return false;
    switch (*e.variant) {
        case BlockchainVariant::SmartContract:
        case BlockchainVariant::DeFi:
        case BlockchainVariant::OnChainLedger:
        case BlockchainVariant::CryptoFlow:
            return true;
        case BlockchainVariant::Oracle:
        case BlockchainVariant::OffOnChainTransition:
            return false;
    }
    return false;
}

using RuleMap = std::map<ThreatCategory, ThreatRationale>;

inline void add(RuleMap& rules, ThreatCategory c, std::string rule, std::string text) {
    rules[c] = ThreatRationale{std::move(rule), std::move(text)};
}

inline void apply_base_kind(RuleMap& rules, const Element& e) {
    using S = StrideCategory;
    switch (e.kind) {
        case ElementKind::ExternalEntity:
            add(rules, S::Spoofing, "base:entity", "External entity identity can be impersonated.");
            add(rules, S::Repudiation, "base:entity",
                "External entity can deny having performed an interaction.");
            break;
        case ElementKind::Process:
        case ElementKind::MultiProcess: {
            const std::string rule =
                e.kind == ElementKind::Process ? "base:process" : "base:multiprocess";
            add(rules, S::Spoofing, rule, "Callers or upstream components can spoof this process.");
            add(rules, S::Tampering, rule, "Data handled by the process can be modified in flight.");
            add(rules, S::Repudiation, rule,
                "Actions of the process can be denied without an audit trail.");
            add(rules, S::InformationDisclosure, rule, "The process can leak the data it handles.");
            add(rules, S::DenialOfService, rule,
                "Excessive or hostile requests can exhaust the process.");
            add(rules, S::ElevationOfPrivilege, rule,
                "The process can be abused to gain capabilities beyond its role.");
            break;
        }
        case ElementKind::DataStore:
            add(rules, S::Tampering, "base:store", "Stored records can be altered without authorisation.");
            add(rules, S::InformationDisclosure, "base:store",
                "Stored records can be read without authorisation.");
            add(rules, S::Repudiation, "base:store",
                "Writes to the store can be denied without tamper-evident logs.");
            add(rules, S::DenialOfService, "base:store",
                "The store can be made unavailable or filled beyond capacity.");
            break;
        case ElementKind::DataFlow:
            add(rules, S::Tampering, "base:flow", "Data in transit can be modified between endpoints.");
            add(rules, S::InformationDisclosure, "base:flow",
                "Data in transit can be observed by third parties.");
            add(rules, S::DenialOfService, "base:flow", "The flow can be interrupted or flooded.");
            if (!e.crosses.empty()) {
                add(rules, S::ElevationOfPrivilege, "flow:crosses_boundary",
                    "The flow crosses a privilege boundary; a compromised endpoint can escalate "
                    "across it.");
            }
            break;
        case ElementKind::PrivilegeBoundary:
            break;  // boundaries are not threat targets
    }
}

inline void apply_variant(RuleMap& rules, const Element& e) {
    using C = CryptoqCategory;
    if (!e.variant) return;
    switch (*e.variant) {
        case BlockchainVariant::Oracle:
            add(rules, C::ReentrancyOracleManipulation, "variant:oracle",
                "Feed values can be manipulated to misprice assets downstream.");
            add(rules, C::OffChainDataPoisoning, "variant:oracle",
                "Off-chain source data can be poisoned before it reaches consumers.");
            break;
        case BlockchainVariant::SmartContract:
            add(rules, C::ReentrancyOracleManipulation, "variant:contract",
                "Contract call sequences permit reentrancy before state updates land.");
            add(rules, C::TokenisationRisks, "variant:contract",
                "Token and governance logic can be abused for hostile control.");
            break;
        case BlockchainVariant::DeFi:
            add(rules, C::YieldFarmingExploits, "variant:defi",
                "Pool incentives can be exploited to drain or distort yields.");
            add(rules, C::ReentrancyOracleManipulation, "variant:defi",
                "Protocol pricing depends on feeds that can be manipulated.");
            break;
        case BlockchainVariant::OnChainLedger:
            if (e.has_tag("signature_dependent")) {
                add(rules, C::QuantumThreats, "variant:onchain",
                    "Recorded signatures rely on elliptic curves vulnerable to future quantum "
                    "attack.");
            }
            break;
        case BlockchainVariant::CryptoFlow:
            if (e.has_tag("signature_dependent")) {
                add(rules, C::QuantumThreats, "variant:crypto",
                    "The signature scheme protecting this flow is vulnerable to future quantum "
                    "attack.");
            }
            break;
        case BlockchainVariant::OffOnChainTransition:
            break;
    }
}

inline void apply_layer_and_tags(RuleMap& rules, const Element& e) {
    using C = CryptoqCategory;
    using L = LinddunCategory;

    if (e.has_tag("user_facing") || e.layer == Layer::PresentationUI) {
        const std::string rule = e.has_tag("user_facing") ? "tag:user_facing" : "layer:ui";
        add(rules, C::PhishingSocialEngineering, rule,
            "Users can be tricked into authorising hostile transactions or disclosing "
            "credentials.");
        add(rules, L::Unawareness, rule,
            "Users may not understand how their data and approvals are used.");
    }
    if (e.has_tag("mpc")) {
        add(rules, C::Collusion, "tag:mpc",
            "A threshold of key-share holders can collude to sign unauthorised transactions.");
    }
    if (e.has_tag("bridge")) {
        add(rules, StrideCategory::Tampering, "tag:bridge",
            "Cross-chain bridge exploit: inter-chain transfer messages can be forged or "
            "replayed.");
    }
    if (e.has_tag("personal_data")) {
        add(rules, L::Linkability, "tag:personal_data",
            "Records can be linked across datasets to profile a person.");
        add(rules, L::Identifiability, "tag:personal_data",
            "Pseudonymous records can be re-identified.");
        add(rules, L::Detectability, "tag:personal_data",
            "The presence of a person's activity can be detected by observers.");
        add(rules, L::DisclosureOfInformation, "tag:personal_data",
            "Personal data can be disclosed beyond its intended audience.");
        add(rules, L::NonCompliance, "tag:personal_data",
            "Processing may violate data-protection and AML obligations.");
        if (is_on_chain(e)) {
            add(rules, L::NonRepudiation, "tag:personal_data",
                "Immutable records make user actions permanently undeniable.");
        }
    }
}

inline void apply_suppressions(RuleMap& rules, const Element& e) {
    // Tamper-resistant ledgers: immutability removes the Tampering threat.
    if (e.variant == BlockchainVariant::OnChainLedger) {
        rules.erase(ThreatCategory(StrideCategory::Tampering));
    }
}

inline RuleMap rules_for(const Element& e) {
    RuleMap rules;
    apply_base_kind(rules, e);
    apply_variant(rules, e);
    apply_layer_and_tags(rules, e);
    apply_suppressions(rules, e);
    return rules;
}

}  // namespace catalog_detail

// Set of categories the rule tables assign to this element. Pure lookup.
inline std::set<ThreatCategory> applicable_categories(const Element& element,
                                                      const SystemModel& /*context*/) {
    std::set<ThreatCategory> out;
    for (const auto& [category, rationale] : catalog_detail::rules_for(element)) {
        out.insert(category);
    }
    return out;
}

// Heuristic actor metadata. Never feeds scoring.
inline std::optional<ActorArchetype> suggest_actor(const ThreatCategory& category,
                                                   const Element& target) {
    if (category == ThreatCategory(CryptoqCategory::PhishingSocialEngineering)) {
        return ActorArchetype::PhishingSyndicate;
    }
    if (category == ThreatCategory(CryptoqCategory::Collusion)) {
        return ActorArchetype::Insider;
    }
    if (category == ThreatCategory(CryptoqCategory::QuantumThreats)) {
        return ActorArchetype::StateSponsored;
    }
    // Key-theft pattern: tampering with infrastructure-layer custody assets.
    if (category == ThreatCategory(StrideCategory::Tampering) &&
        target.layer == Layer::Infrastructure) {
        return ActorArchetype::StateSponsored;
    }
    return std::nullopt;
}

// One threat per (element, applicable category). Elements in declaration
// order; categories in code order. Output is byte-stable for equal models.
inline std::vector<Threat> enumerate_threats(const SystemModel& model) {
    std::vector<Threat> out;
    for (const Element& e : model.elements) {
        const catalog_detail::RuleMap rules = catalog_detail::rules_for(e);
        for (const auto& [category, rationale] : rules) {  // RuleMap iterates in code order
            Threat t;
            t.id = e.id + ":" + std::string(category.code()) + ":1";
            t.target = e.id;
            t.category = category;
            t.rationale = rationale;
            t.api_mappings = map_stride_to_api(category);
            if (e.variant == BlockchainVariant::Oracle) {
                t.api_mappings.insert(ApiRisk::ServerSideRequestForgery);
            }
            t.suggested_actor = suggest_actor(category, e);
            out.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace cntmf
