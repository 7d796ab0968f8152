#pragma once

// The textual model language. Line-oriented statements, one per line:
//
//   system "<name>"
//   actor <id> "<name>" archetype=<state_sponsored|insider|phishing|bot> [note="..."]
//   entity|process|multiprocess|store <id> "<name>" [variant=<kw>] [layer=<kw>] [tags=a,b] [var=<usd>]
//   boundary <id> "<name>" [variant=<kw>]
//   flow <id> <src> -> <dst> ["<label>"] [variant=<kw>] [crosses=b1,b2] [tags=a,b] [var=<usd>]
//
// '#' starts a comment. Identifiers match [a-z_][a-z0-9_]*. Quoted strings
// carry no escape sequences and cannot contain '"'. UTF-8; LF or CRLF.
// Parsing recovers per line, so one malformed statement never hides the next.

#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cntmf/model.hpp"

namespace cntmf {

struct SourceSpan {
    std::string file;
    int line = 1;    // 1-based
    int column = 1;  // 1-based

    bool operator==(const SourceSpan&) const = default;
};

struct ParseError {
    SourceSpan span;
    std::string message;
    std::vector<std::string> expected;  // valid tokens, when the set is closed

    bool operator==(const ParseError&) const = default;
};

struct ParseResult {
    std::optional<SystemModel> model;           // set iff errors is empty
    std::vector<ParseError> errors;
    std::map<std::string, SourceSpan> spans;    // element/actor id -> declaration site

    bool ok() const { return model.has_value() && errors.empty(); }
};

namespace dsl_detail {

struct Token {
    std::string text;
    int column = 1;
    bool quoted = false;
};

inline bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(s[0] == '_' || (s[0] >= 'a' && s[0] <= 'z'))) return false;
    for (char c : s) {
        if (!(c == '_' || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
    }
    return true;
}

// Splits one physical line into tokens. Returns false on a lexical error
// (unterminated string), which is already reported into `errors`.
inline bool tokenize_line(std::string_view line, const std::string& file, int lineno,
                          std::vector<Token>& out, std::vector<ParseError>& errors) {
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == ' ' || c == '\t') {
            ++i;
            continue;
        }
        if (c == '#') break;  // comment to end of line
        const int column = static_cast<int>(i) + 1;
        if (c == '"') {
            const std::size_t close = line.find('"', i + 1);
            if (close == std::string_view::npos) {
                errors.push_back(ParseError{SourceSpan{file, lineno, column},
                                            "unterminated string literal", {}});
                return false;
            }
            out.push_back(Token{std::string(line.substr(i + 1, close - i - 1)), column, true});
            i = close + 1;
            continue;
        }
        std::size_t end = i;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '"' &&
               line[end] != '#') {
            ++end;
        }
        out.push_back(Token{std::string(line.substr(i, end - i)), column, false});
        i = end;
    }
    return true;
}

struct Attr {
    std::string key;
    std::string value;
    int column = 1;
    bool quoted = false;
};

inline std::vector<std::string> split_list(std::string_view csv) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t comma = csv.find(',', start);
        const std::size_t end = comma == std::string_view::npos ? csv.size() : comma;
        items.emplace_back(csv.substr(start, end - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return items;
}

class LineParser {
public:
    LineParser(std::vector<Token> tokens, const std::string& file, int lineno,
               std::vector<ParseError>& errors)
        : tokens_(std::move(tokens)), file_(file), lineno_(lineno), errors_(errors) {}

    bool failed() const { return failed_; }

    void error(int column, std::string message, std::vector<std::string> expected = {}) {
        errors_.push_back(
            ParseError{SourceSpan{file_, lineno_, column}, std::move(message), std::move(expected)});
        failed_ = true;
    }

    const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }

    const Token* next() { return pos_ < tokens_.size() ? &tokens_[pos_++] : nullptr; }

    int end_column() const {
        if (tokens_.empty()) return 1;
        const Token& last = tokens_.back();
        return last.column + static_cast<int>(last.text.size()) + (last.quoted ? 2 : 0);
    }

    std::optional<std::string> expect_identifier(std::string_view what) {
        const Token* t = next();
        if (t == nullptr || t->quoted || !is_identifier(t->text)) {
            error(t ? t->column : end_column(), "expected " + std::string(what) + " identifier");
            return std::nullopt;
        }
        return t->text;
    }

    std::optional<std::string> expect_string(std::string_view what) {
        const Token* t = next();
        if (t == nullptr || !t->quoted) {
            error(t ? t->column : end_column(),
                  "expected quoted " + std::string(what) + " string");
            return std::nullopt;
        }
        return t->text;
    }

    // Consumes the remaining tokens as key=value attributes.
    std::optional<std::vector<Attr>> parse_attrs(const std::vector<std::string>& allowed) {
        std::vector<Attr> attrs;
        while (const Token* t = next()) {
            if (t->quoted) {
                error(t->column, "unexpected string literal; expected key=value attribute");
                return std::nullopt;
            }
            const std::size_t eq = t->text.find('=');
            if (eq == std::string::npos || eq == 0) {
                error(t->column, "expected key=value attribute, got '" + t->text + "'", allowed);
                return std::nullopt;
            }
            Attr a;
            a.key = t->text.substr(0, eq);
            a.value = t->text.substr(eq + 1);
            a.column = t->column;
            // A quoted attribute value ("note=" followed by a string token).
            if (a.value.empty() && peek() != nullptr && peek()->quoted) {
                const Token* v = next();
                a.value = v->text;
                a.quoted = true;
            }
            bool known = false;
            for (const std::string& k : allowed) known = known || k == a.key;
            if (!known) {
                error(a.column, "unknown attribute '" + a.key + "'", allowed);
                return std::nullopt;
            }
            for (const Attr& prev : attrs) {
                if (prev.key == a.key) {
                    error(a.column, "duplicate attribute '" + a.key + "'");
                    return std::nullopt;
                }
            }
            attrs.push_back(std::move(a));
        }
        return attrs;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    const std::string& file_;
    int lineno_;
    std::vector<ParseError>& errors_;
    bool failed_ = false;
};

inline std::vector<std::string> keyword_list(std::string_view joined) {
    return split_list(joined);
}

}  // namespace dsl_detail

inline ParseResult parse_model(std::string_view text, const std::string& file = "<input>") {
    using dsl_detail::Attr;
    using dsl_detail::LineParser;
    using dsl_detail::Token;

    ParseResult result;
    SystemModel model;
    bool saw_system = false;
    bool saw_any_statement = false;

    const std::vector<std::string> layer_keywords(kLayerKeywords.begin(), kLayerKeywords.end());
    const std::vector<std::string> variant_keywords(kVariantKeywords.begin(), kVariantKeywords.end());
    const std::vector<std::string> archetype_keywords(kArchetypeKeywords.begin(),
                                                      kArchetypeKeywords.end());
    const std::vector<std::string> statement_keywords{
        "system", "actor", "entity", "process", "multiprocess", "store", "boundary", "flow"};

    auto declare_id = [&](const std::string& id, int column, int lineno) {
        if (result.spans.count(id) > 0) {
            result.errors.push_back(ParseError{SourceSpan{file, lineno, column},
                                               "duplicate id '" + id + "'", {}});
            return false;
        }
        result.spans[id] = SourceSpan{file, lineno, column};
        return true;
    };

    auto parse_tags = [&](LineParser& p, const Attr& a) -> std::optional<std::set<std::string>> {
        std::set<std::string> tags;
        for (const std::string& item : dsl_detail::split_list(a.value)) {
            if (!dsl_detail::is_identifier(item)) {
                p.error(a.column, "invalid tag '" + item + "' in tags list");
                return std::nullopt;
            }
            tags.insert(item);
        }
        return tags;
    };

    auto parse_var = [&](LineParser& p, const Attr& a) -> std::optional<double> {
        unsigned long long usd = 0;
        const char* begin = a.value.data();
        const char* end = begin + a.value.size();
        const auto [ptr, ec] = std::from_chars(begin, end, usd);
        if (ec != std::errc{} || ptr != end || a.value.empty()) {
            p.error(a.column, "var must be a non-negative integer USD amount");
            return std::nullopt;
        }
        return static_cast<double>(usd);
    };

    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++lineno;

        std::vector<Token> tokens;
        const bool lexed = dsl_detail::tokenize_line(line, file, lineno, tokens, result.errors);
        if (lexed && !tokens.empty()) {
            saw_any_statement = true;
            LineParser p(tokens, file, lineno, result.errors);
            const Token* head = p.next();
            const std::string& kw = head->text;

            if (head->quoted) {
                p.error(head->column, "expected a statement keyword", statement_keywords);
            } else if (kw == "system") {
                const bool duplicate = saw_system;
                saw_system = true;  // even a malformed header counts as present
                if (duplicate) {
                    p.error(head->column, "duplicate `system` statement");
                } else if (auto name = p.expect_string("system name")) {
                    if (const Token* extra = p.peek()) {
                        p.error(extra->column, "unexpected token after system name");
                    } else {
                        model.name = *name;
                    }
                }
            } else if (kw == "actor") {
                auto id = p.expect_identifier("actor");
                auto name = id ? p.expect_string("actor name") : std::nullopt;
                auto attrs = name ? p.parse_attrs({"archetype", "note"}) : std::nullopt;
                if (attrs) {
                    Actor actor;
                    actor.id = *id;
                    actor.name = *name;
                    bool have_archetype = false;
                    for (const Attr& a : *attrs) {
                        if (a.key == "archetype") {
                            if (auto arch = archetype_from_keyword(a.value)) {
                                actor.archetype = *arch;
                                have_archetype = true;
                            } else {
                                p.error(a.column, "unknown archetype '" + a.value + "'",
                                        archetype_keywords);
                            }
                        } else if (a.key == "note") {
                            actor.note = a.value;
                        }
                    }
                    if (!have_archetype && !p.failed()) {
                        p.error(p.end_column(), "actor requires archetype=<keyword>",
                                archetype_keywords);
                    }
                    if (!p.failed() && declare_id(actor.id, head->column, lineno)) {
                        model.actors.push_back(std::move(actor));
                    }
                }
            } else if (kw == "entity" || kw == "process" || kw == "multiprocess" || kw == "store" ||
                       kw == "boundary") {
                Element e;
                if (kw == "entity") e.kind = ElementKind::ExternalEntity;
                if (kw == "process") e.kind = ElementKind::Process;
                if (kw == "multiprocess") e.kind = ElementKind::MultiProcess;
                if (kw == "store") e.kind = ElementKind::DataStore;
                if (kw == "boundary") e.kind = ElementKind::PrivilegeBoundary;

                auto id = p.expect_identifier("element");
                auto name = id ? p.expect_string("element name") : std::nullopt;
                const std::vector<std::string> allowed =
                    kw == "boundary" ? std::vector<std::string>{"variant"}
                                     : std::vector<std::string>{"variant", "layer", "tags", "var"};
                auto attrs = name ? p.parse_attrs(allowed) : std::nullopt;
                if (attrs) {
                    e.id = *id;
                    e.name = *name;
                    for (const Attr& a : *attrs) {
                        if (a.key == "variant") {
                            if (auto v = variant_from_keyword(a.value)) {
                                e.variant = *v;
                            } else {
                                p.error(a.column, "unknown variant '" + a.value + "'",
                                        variant_keywords);
                            }
                        } else if (a.key == "layer") {
                            if (auto l = layer_from_keyword(a.value)) {
                                e.layer = *l;
                            } else {
                                p.error(a.column, "unknown layer '" + a.value + "'", layer_keywords);
                            }
                        } else if (a.key == "tags") {
                            if (auto tags = parse_tags(p, a)) e.tags = std::move(*tags);
                        } else if (a.key == "var") {
                            if (auto usd = parse_var(p, a)) e.value_at_risk = *usd;
                        }
                    }
                    if (!p.failed() && declare_id(e.id, head->column, lineno)) {
                        model.elements.push_back(std::move(e));
                    }
                }
            } else if (kw == "flow") {
                Element e;
                e.kind = ElementKind::DataFlow;
                auto id = p.expect_identifier("flow");
                auto src = id ? p.expect_identifier("source") : std::nullopt;
                bool arrow_ok = false;
                if (src) {
                    const Token* arrow = p.next();
                    if (arrow == nullptr || arrow->quoted || arrow->text != "->") {
                        p.error(arrow ? arrow->column : p.end_column(), "expected '->'");
                    } else {
                        arrow_ok = true;
                    }
                }
                auto dst = arrow_ok ? p.expect_identifier("target") : std::nullopt;
                if (dst) {
                    e.id = *id;
                    e.source = *src;
                    e.target = *dst;
                    if (p.peek() != nullptr && p.peek()->quoted) e.name = p.next()->text;
                    auto attrs = p.parse_attrs({"variant", "crosses", "tags", "var"});
                    if (attrs) {
                        for (const Attr& a : *attrs) {
                            if (a.key == "variant") {
                                if (auto v = variant_from_keyword(a.value)) {
                                    e.variant = *v;
                                } else {
                                    p.error(a.column, "unknown variant '" + a.value + "'",
                                            variant_keywords);
                                }
                            } else if (a.key == "crosses") {
                                for (const std::string& b : dsl_detail::split_list(a.value)) {
                                    if (!dsl_detail::is_identifier(b)) {
                                        p.error(a.column, "invalid boundary id '" + b +
                                                              "' in crosses list");
                                        break;
                                    }
                                    e.crosses.insert(b);
                                }
                            } else if (a.key == "tags") {
                                if (auto tags = parse_tags(p, a)) e.tags = std::move(*tags);
                            } else if (a.key == "var") {
                                if (auto usd = parse_var(p, a)) e.value_at_risk = *usd;
                            }
                        }
                        if (!p.failed() && declare_id(e.id, head->column, lineno)) {
                            model.elements.push_back(std::move(e));
                        }
                    }
                }
            } else {
                p.error(head->column, "unknown statement '" + kw + "'", statement_keywords);
            }
        }

        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }

    if (!saw_system) {
        result.errors.push_back(ParseError{
            SourceSpan{file, 1, 1},
            saw_any_statement ? "missing `system` header statement"
                              : "empty model: missing `system` header statement",
            {"system"}});
    }

    if (result.errors.empty()) {
        result.model = std::move(model);
    }
    return result;
}

// Canonical text form. Declaration order is preserved; attributes appear in a
// fixed order; tags and crosses are emitted sorted; exactly one statement per
// line, LF-terminated. parse_model(serialize_model(m)) is structurally equal
// to m for every valid model.
inline std::string serialize_model(const SystemModel& model) {
    std::string out;
    auto append_list = [&out](std::string_view key, const std::set<std::string>& items) {
        if (items.empty()) return;
        out += ' ';
        out += key;
        out += '=';
        bool first = true;
        for (const std::string& item : items) {
            if (!first) out += ',';
            out += item;
            first = false;
        }
    };

    out += "system \"" + model.name + "\"\n";
    for (const Actor& a : model.actors) {
        out += "actor " + a.id + " \"" + a.name + "\" archetype=";
        out += std::string(archetype_keyword(a.archetype));
        if (!a.note.empty()) out += " note=\"" + a.note + "\"";
        out += '\n';
    }
    for (const Element& e : model.elements) {
        if (e.is_flow()) {
            out += "flow " + e.id + " " + e.source + " -> " + e.target;
            if (!e.name.empty()) out += " \"" + e.name + "\"";
            if (e.variant) out += " variant=" + std::string(variant_keyword(*e.variant));
            append_list("crosses", e.crosses);
            append_list("tags", e.tags);
        } else {
            out += std::string(kind_keyword(e.kind)) + " " + e.id + " \"" + e.name + "\"";
            if (e.variant) out += " variant=" + std::string(variant_keyword(*e.variant));
            if (e.layer) out += " layer=" + std::string(layer_keyword(*e.layer));
            append_list("tags", e.tags);
        }
        if (e.value_at_risk) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), " var=%lld",
                          static_cast<long long>(*e.value_at_risk + 0.5));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace cntmf
