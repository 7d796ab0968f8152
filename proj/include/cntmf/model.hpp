#pragma once

// Domain model for hybrid fiat/cryptocurrency systems: six asset layers,
// extended DFD element kinds with blockchain variants, actors, and the
// structural validation rules every downstream phase depends on.

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cntmf {

// The six rows of the hybrid asset matrix.
enum class Layer {
    PresentationUI,
    Traditional,
    Infrastructure,
    NetworkConsensus,
    Application,
    DataPersistence,
};

inline constexpr std::size_t kLayerCount = 6;

inline constexpr std::array<Layer, kLayerCount> kAllLayers{
    Layer::PresentationUI,   Layer::Traditional, Layer::Infrastructure,
    Layer::NetworkConsensus, Layer::Application, Layer::DataPersistence,
};

// Keywords are the model-language spellings; names are for reports.
inline constexpr std::array<std::string_view, kLayerCount> kLayerKeywords{
    "ui", "traditional", "infra", "network", "app", "data",
};

inline constexpr std::array<std::string_view, kLayerCount> kLayerNames{
    "Presentation/UI", "Traditional",  "Infrastructure",
    "Network/Consensus", "Application", "Data/Persistence",
};

constexpr std::string_view layer_keyword(Layer l) { return kLayerKeywords[static_cast<std::size_t>(l)]; }
constexpr std::string_view layer_name(Layer l) { return kLayerNames[static_cast<std::size_t>(l)]; }

inline std::optional<Layer> layer_from_keyword(std::string_view kw) {
    for (std::size_t i = 0; i < kLayerCount; ++i) {
        if (kLayerKeywords[i] == kw) return static_cast<Layer>(i);
    }
    return std::nullopt;
}

enum class ElementKind {
    ExternalEntity,
    Process,
    MultiProcess,
    DataStore,
    DataFlow,
    PrivilegeBoundary,
};

inline constexpr std::array<std::string_view, 6> kKindKeywords{
    "entity", "process", "multiprocess", "store", "flow", "boundary",
};

inline constexpr std::array<std::string_view, 6> kKindNames{
    "External Entity", "Process", "Multiple Process", "Data Store", "Data Flow", "Privilege Boundary",
};

constexpr std::string_view kind_keyword(ElementKind k) { return kKindKeywords[static_cast<std::size_t>(k)]; }
constexpr std::string_view kind_name(ElementKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

enum class BlockchainVariant {
    Oracle,               // on ExternalEntity
    SmartContract,        // on Process
    DeFi,                 // on MultiProcess
    OnChainLedger,        // on DataStore
    CryptoFlow,           // on DataFlow
    OffOnChainTransition, // on PrivilegeBoundary
};

inline constexpr std::array<std::string_view, 6> kVariantKeywords{
    "oracle", "contract", "defi", "onchain", "crypto", "offonchain",
};

inline constexpr std::array<std::string_view, 6> kVariantNames{
    "Oracle", "Smart Contract", "DeFi", "On-Chain Ledger", "Crypto Flow", "Off/On-Chain Transition",
};

constexpr std::string_view variant_keyword(BlockchainVariant v) {
    return kVariantKeywords[static_cast<std::size_t>(v)];
}
constexpr std::string_view variant_name(BlockchainVariant v) {
    return kVariantNames[static_cast<std::size_t>(v)];
}

inline std::optional<BlockchainVariant> variant_from_keyword(std::string_view kw) {
    for (std::size_t i = 0; i < 6; ++i) {
        if (kVariantKeywords[i] == kw) return static_cast<BlockchainVariant>(i);
    }
    return std::nullopt;
}

// The only element kind each variant may sit on.
constexpr ElementKind variant_host_kind(BlockchainVariant v) {
    switch (v) {
        case BlockchainVariant::Oracle: return ElementKind::ExternalEntity;
        case BlockchainVariant::SmartContract: return ElementKind::Process;
        case BlockchainVariant::DeFi: return ElementKind::MultiProcess;
        case BlockchainVariant::OnChainLedger: return ElementKind::DataStore;
        case BlockchainVariant::CryptoFlow: return ElementKind::DataFlow;
        case BlockchainVariant::OffOnChainTransition: return ElementKind::PrivilegeBoundary;
    }
    return ElementKind::ExternalEntity;  // unreachable
}

enum class ActorArchetype { StateSponsored, Insider, PhishingSyndicate, AutomatedBot };

inline constexpr std::array<std::string_view, 4> kArchetypeKeywords{
    "state_sponsored", "insider", "phishing", "bot",
};

inline constexpr std::array<std::string_view, 4> kArchetypeNames{
    "State-Sponsored Group", "Insider", "Phishing Syndicate", "Automated Bot",
};

constexpr std::string_view archetype_keyword(ActorArchetype a) {
    return kArchetypeKeywords[static_cast<std::size_t>(a)];
}
constexpr std::string_view archetype_name(ActorArchetype a) {
    return kArchetypeNames[static_cast<std::size_t>(a)];
}

inline std::optional<ActorArchetype> archetype_from_keyword(std::string_view kw) {
    for (std::size_t i = 0; i < 4; ++i) {
        if (kArchetypeKeywords[i] == kw) return static_cast<ActorArchetype>(i);
    }
    return std::nullopt;
}

// Tags with rule-table meaning. Unknown tags parse but draw a warning.
inline const std::set<std::string>& recognized_tags() {
    static const std::set<std::string> tags{
        "personal_data", "mpc", "bridge", "user_facing", "signature_dependent",
    };
    return tags;
}

struct Element {
    std::string id;
    std::string name;
    ElementKind kind = ElementKind::ExternalEntity;
    std::optional<BlockchainVariant> variant;
    std::optional<Layer> layer;
    std::set<std::string> tags;
    std::optional<double> value_at_risk;  // USD
    std::string source;                   // DataFlow only
    std::string target;                   // DataFlow only
    std::set<std::string> crosses;        // DataFlow only: boundary ids

    bool is_flow() const { return kind == ElementKind::DataFlow; }
    bool is_boundary() const { return kind == ElementKind::PrivilegeBoundary; }
    bool is_node() const { return !is_flow() && !is_boundary(); }
    bool has_tag(std::string_view t) const { return tags.count(std::string(t)) > 0; }

    bool operator==(const Element&) const = default;
};

struct Actor {
    std::string id;
    std::string name;
    ActorArchetype archetype = ActorArchetype::AutomatedBot;
    std::string note;

    bool operator==(const Actor&) const = default;
};

struct SystemModel {
    std::string name;
    std::vector<Element> elements;  // declaration order
    std::vector<Actor> actors;      // declaration order
    int schema_version = 1;

    const Element* find(std::string_view id) const {
        for (const Element& e : elements) {
            if (e.id == id) return &e;
        }
        return nullptr;
    }

    bool operator==(const SystemModel&) const = default;
};

enum class Severity { Warning, Error };

struct Violation {
    std::string rule;
    Severity severity = Severity::Error;
    std::string element_id;
    std::string message;

    bool operator==(const Violation&) const = default;
};

inline bool has_errors(const std::vector<Violation>& vs) {
    return std::any_of(vs.begin(), vs.end(),
                       [](const Violation& v) { return v.severity == Severity::Error; });
}

namespace detail {

inline void add_violation(std::vector<Violation>& out, std::string rule, Severity sev,
                          const std::string& element_id, std::string message) {
    out.push_back(Violation{std::move(rule), sev, element_id, std::move(message)});
}

}  // namespace detail

// Every structural rule, reported as data. Deterministic order: element id,
// then rule id. Pure; same model always yields the same list.
inline std::vector<Violation> validate_model(const SystemModel& model) {
    std::vector<Violation> out;

    std::set<std::string> seen;
    for (const Element& e : model.elements) {
        if (!seen.insert(e.id).second) {
            detail::add_violation(out, "duplicate_id", Severity::Error, e.id,
                                  "id '" + e.id + "' is declared more than once");
        }
    }
    std::set<std::string> seen_actors;
    for (const Actor& a : model.actors) {
        if (!seen_actors.insert(a.id).second || seen.count(a.id) > 0) {
            detail::add_violation(out, "duplicate_id", Severity::Error, a.id,
                                  "actor id '" + a.id + "' collides with another declaration");
        }
    }

    for (const Element& e : model.elements) {
        if (e.variant && variant_host_kind(*e.variant) != e.kind) {
            detail::add_violation(
                out, "variant_kind_mismatch", Severity::Error, e.id,
                std::string("variant '") + std::string(variant_keyword(*e.variant)) +
                    "' is not valid on a " + std::string(kind_name(e.kind)));
        }

        if (e.value_at_risk && *e.value_at_risk < 0) {
            detail::add_violation(out, "negative_value_at_risk", Severity::Error, e.id,
                                  "value_at_risk must be non-negative");
        }

        if (e.is_flow()) {
            if (e.source.empty() || e.target.empty()) {
                detail::add_violation(out, "missing_flow_endpoint", Severity::Error, e.id,
                                      "flow must name both a source and a target");
            }
            for (const std::string* endpoint : {&e.source, &e.target}) {
                if (endpoint->empty()) continue;
                const Element* ref = model.find(*endpoint);
                if (ref == nullptr) {
                    detail::add_violation(out, "dangling_reference", Severity::Error, e.id,
                                          "flow references missing element '" + *endpoint + "'");
                } else if (!ref->is_node()) {
                    detail::add_violation(out, "reference_kind_mismatch", Severity::Error, e.id,
                                          "flow endpoint '" + *endpoint + "' is a " +
                                              std::string(kind_name(ref->kind)) +
                                              ", not a node element");
                }
            }
            for (const std::string& b : e.crosses) {
                const Element* ref = model.find(b);
                if (ref == nullptr) {
                    detail::add_violation(out, "dangling_reference", Severity::Error, e.id,
                                          "flow crosses missing boundary '" + b + "'");
                } else if (!ref->is_boundary()) {
                    detail::add_violation(out, "reference_kind_mismatch", Severity::Error, e.id,
                                          "'" + b + "' is crossed by a flow but is a " +
                                              std::string(kind_name(ref->kind)) +
                                              ", not a privilege boundary");
                }
            }
        } else if (!e.source.empty() || !e.target.empty() || !e.crosses.empty()) {
            detail::add_violation(out, "flow_fields_on_non_flow", Severity::Error, e.id,
                                  "source/target/crosses are only valid on data flows");
        }

        for (const std::string& tag : e.tags) {
            if (recognized_tags().count(tag) == 0) {
                detail::add_violation(out, "unknown_tag", Severity::Warning, e.id,
                                      "tag '" + tag + "' is not in the recognised vocabulary");
            }
        }
        if (e.has_tag("bridge") && !e.is_flow()) {
            detail::add_violation(out, "invalid_tag_placement", Severity::Error, e.id,
                                  "tag 'bridge' is only valid on data flows");
        }
        if (e.has_tag("mpc") && e.layer != Layer::Infrastructure) {
            detail::add_violation(out, "invalid_tag_placement", Severity::Error, e.id,
                                  "tag 'mpc' is only valid on elements in the infra layer");
        }

        if (e.is_node() && !e.layer) {
            detail::add_violation(out, "missing_layer", Severity::Warning, e.id,
                                  "element has no layer assignment");
        }
    }

    std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
        if (a.element_id != b.element_id) return a.element_id < b.element_id;
        return a.rule < b.rule;
    });
    return out;
}

// One row of the hybrid asset matrix.
struct LayerRow {
    struct Edge {
        std::string flow_id;
        Layer from = Layer::PresentationUI;
        Layer to = Layer::PresentationUI;

        bool operator==(const Edge&) const = default;
    };

    Layer layer = Layer::PresentationUI;
    std::vector<std::string> element_ids;  // declaration order
    std::vector<Edge> interdependencies;   // flows touching this layer whose endpoints differ

    bool operator==(const LayerRow&) const = default;
};

struct HybridAssetMatrix {
    std::vector<LayerRow> rows;  // always six, in Layer order

    bool operator==(const HybridAssetMatrix&) const = default;
};

inline HybridAssetMatrix layer_matrix(const SystemModel& model) {
    HybridAssetMatrix matrix;
    matrix.rows.resize(kLayerCount);
    for (std::size_t i = 0; i < kLayerCount; ++i) matrix.rows[i].layer = kAllLayers[i];

    for (const Element& e : model.elements) {
        if (e.layer) {
            matrix.rows[static_cast<std::size_t>(*e.layer)].element_ids.push_back(e.id);
        }
    }

    for (const Element& e : model.elements) {
        if (!e.is_flow()) continue;
        const Element* src = model.find(e.source);
        const Element* dst = model.find(e.target);
        if (src == nullptr || dst == nullptr || !src->layer || !dst->layer) continue;
        if (*src->layer == *dst->layer) continue;
        const LayerRow::Edge edge{e.id, *src->layer, *dst->layer};
        matrix.rows[static_cast<std::size_t>(*src->layer)].interdependencies.push_back(edge);
        matrix.rows[static_cast<std::size_t>(*dst->layer)].interdependencies.push_back(edge);
    }
    return matrix;
}

}  // namespace cntmf
