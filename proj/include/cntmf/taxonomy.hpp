#pragma once

// Threat taxonomies: STRIDE (6), the CRYPTOQ cryptocurrency mnemonic (7) and
// LINDDUN privacy categories (7), plus the OWASP API Security Top 10 list.
//
// Every category carries three stable spellings:
//   code — short sortable token used inside threat ids ("S-TAM", "C-ROM", ...)
//   slug — snake_case identifier used in JSON files
//   name — display string for reports

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace cntmf {

enum class StrideCategory {
    Spoofing,
    Tampering,
    Repudiation,
    InformationDisclosure,
    DenialOfService,
    ElevationOfPrivilege,
};

enum class CryptoqCategory {
    Collusion,
    ReentrancyOracleManipulation,
    YieldFarmingExploits,
    PhishingSocialEngineering,
    TokenisationRisks,
    OffChainDataPoisoning,
    QuantumThreats,
};

enum class LinddunCategory {
    Linkability,
    Identifiability,
    NonRepudiation,
    Detectability,
    DisclosureOfInformation,
    Unawareness,
    NonCompliance,
};

inline constexpr std::size_t kStrideCount = 6;
inline constexpr std::size_t kCryptoqCount = 7;
inline constexpr std::size_t kLinddunCount = 7;

namespace detail {

struct CategoryRow {
    std::string_view code;
    std::string_view slug;
    std::string_view name;
};

inline constexpr std::array<CategoryRow, kStrideCount> kStrideRows{{
    {"S-SPO", "spoofing", "Spoofing"},
    {"S-TAM", "tampering", "Tampering"},
    {"S-REP", "repudiation", "Repudiation"},
    {"S-INF", "information_disclosure", "Information Disclosure"},
    {"S-DOS", "denial_of_service", "Denial of Service"},
    {"S-EOP", "elevation_of_privilege", "Elevation of Privilege"},
}};

inline constexpr std::array<CategoryRow, kCryptoqCount> kCryptoqRows{{
    {"C-COL", "collusion", "Collusion"},
    {"C-ROM", "reentrancy_oracle_manipulation", "Reentrancy/Oracle Manipulation"},
    {"C-YFE", "yield_farming_exploits", "Yield Farming Exploits"},
    {"C-PSE", "phishing_social_engineering", "Phishing/Social Engineering"},
    {"C-TOK", "tokenisation_risks", "Tokenisation Risks"},
    {"C-ODP", "off_chain_data_poisoning", "Off-Chain Data Poisoning"},
    {"C-QNT", "quantum_threats", "Quantum Threats"},
}};

inline constexpr std::array<CategoryRow, kLinddunCount> kLinddunRows{{
    {"L-LNK", "linkability", "Linkability"},
    {"L-IDN", "identifiability", "Identifiability"},
    {"L-NRP", "non_repudiation", "Non-Repudiation"},
    {"L-DET", "detectability", "Detectability"},
    {"L-DIS", "disclosure_of_information", "Disclosure of Information"},
    {"L-UNA", "unawareness", "Unawareness"},
    {"L-NCM", "non_compliance", "Non-Compliance"},
}};

}  // namespace detail

class ThreatCategory {
public:
    using Value = std::variant<StrideCategory, CryptoqCategory, LinddunCategory>;

    constexpr ThreatCategory() : value_(StrideCategory::Spoofing) {}
    constexpr ThreatCategory(StrideCategory c) : value_(c) {}          // NOLINT(google-explicit-constructor)
    constexpr ThreatCategory(CryptoqCategory c) : value_(c) {}         // NOLINT(google-explicit-constructor)
    constexpr ThreatCategory(LinddunCategory c) : value_(c) {}         // NOLINT(google-explicit-constructor)

    constexpr const Value& value() const { return value_; }

    constexpr bool is_stride() const { return std::holds_alternative<StrideCategory>(value_); }
    constexpr bool is_cryptoq() const { return std::holds_alternative<CryptoqCategory>(value_); }
    constexpr bool is_linddun() const { return std::holds_alternative<LinddunCategory>(value_); }

    constexpr std::string_view family() const {
        if (is_stride()) return "stride";
        if (is_cryptoq()) return "cryptoq";
        return "linddun";
    }

    constexpr std::string_view code() const { return row().code; }
    constexpr std::string_view slug() const { return row().slug; }
    constexpr std::string_view name() const { return row().name; }

    constexpr bool operator==(const ThreatCategory&) const = default;

    // Deterministic order everywhere a set of categories is materialised.
    constexpr bool operator<(const ThreatCategory& other) const { return code() < other.code(); }

private:
    constexpr const detail::CategoryRow& row() const {
        if (const auto* s = std::get_if<StrideCategory>(&value_)) {
            return detail::kStrideRows[static_cast<std::size_t>(*s)];
        }
        if (const auto* c = std::get_if<CryptoqCategory>(&value_)) {
            return detail::kCryptoqRows[static_cast<std::size_t>(*c)];
        }
        return detail::kLinddunRows[static_cast<std::size_t>(std::get<LinddunCategory>(value_))];
    }

    Value value_;
};

// All 20 categories: STRIDE, then CRYPTOQ, then LINDDUN, in declaration order.
inline const std::vector<ThreatCategory>& all_categories() {
    static const std::vector<ThreatCategory> all = [] {
        std::vector<ThreatCategory> v;
        for (std::size_t i = 0; i < kStrideCount; ++i) v.emplace_back(static_cast<StrideCategory>(i));
        for (std::size_t i = 0; i < kCryptoqCount; ++i) v.emplace_back(static_cast<CryptoqCategory>(i));
        for (std::size_t i = 0; i < kLinddunCount; ++i) v.emplace_back(static_cast<LinddunCategory>(i));
        return v;
    }();
    return all;
}

inline std::optional<ThreatCategory> category_from_slug(std::string_view slug) {
    for (const ThreatCategory& c : all_categories()) {
        if (c.slug() == slug) return c;
    }
    return std::nullopt;
}

inline std::optional<ThreatCategory> category_from_code(std::string_view code) {
    for (const ThreatCategory& c : all_categories()) {
        if (c.code() == code) return c;
    }
    return std::nullopt;
}

// OWASP API Security Top 10 (2023 edition).
enum class ApiRisk {
    BrokenObjectLevelAuthorisation,             // API1
    BrokenAuthentication,                       // API2
    BrokenObjectPropertyLevelAuthorisation,     // API3
    UnrestrictedResourceConsumption,            // API4
    BrokenFunctionLevelAuthorisation,           // API5
    UnrestrictedAccessToSensitiveBusinessFlows, // API6
    ServerSideRequestForgery,                   // API7
    SecurityMisconfiguration,                   // API8
    ImproperInventoryManagement,                // API9
    UnsafeConsumptionOfApis,                    // API10
};

inline constexpr std::size_t kApiRiskCount = 10;

inline constexpr std::array<std::string_view, kApiRiskCount> kApiCodes{
    "API1", "API2", "API3", "API4", "API5", "API6", "API7", "API8", "API9", "API10",
};

inline constexpr std::array<std::string_view, kApiRiskCount> kApiNames{
    "Broken Object Level Authorisation",
    "Broken Authentication",
    "Broken Object Property Level Authorisation",
    "Unrestricted Resource Consumption",
    "Broken Function Level Authorisation",
    "Unrestricted Access to Sensitive Business Flows",
    "Server-Side Request Forgery",
    "Security Misconfiguration",
    "Improper Inventory Management",
    "Unsafe Consumption of APIs",
};

constexpr std::string_view api_code(ApiRisk r) { return kApiCodes[static_cast<std::size_t>(r)]; }
constexpr std::string_view api_name(ApiRisk r) { return kApiNames[static_cast<std::size_t>(r)]; }

inline std::optional<ApiRisk> api_from_code(std::string_view code) {
    for (std::size_t i = 0; i < kApiRiskCount; ++i) {
        if (kApiCodes[i] == code) return static_cast<ApiRisk>(i);
    }
    return std::nullopt;
}

}  // namespace cntmf
