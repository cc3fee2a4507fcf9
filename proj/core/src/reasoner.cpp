#include "cohortc/reasoner.hpp"

#include <charconv>
#include <cmath>

namespace cohortc::reason {

namespace {

using llf::LfNode;
using llf::NodePath;
using llf::PathStep;

NodePath child_path(const NodePath& base, bool predicate, std::size_t index) {
    auto p = base;
    p.push_back(PathStep{predicate, index});
    return p;
}

std::optional<double> parse_decimal(std::string_view s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

bool valid_window_unit(std::string_view u) {
    return u == "minutes" || u == "hours" || u == "days" || u == "weeks";
}

class Reasoner {
public:
    Reasoner(const kb::KnowledgeBase& kb, const norm::Normalizer& n, const Observer& obs)
        : kb_(kb), norm_(n), observer_(obs) {}

    ReasonedNode run(const LfNode& node, const NodePath& path) {
        ReasonedNode out;
        out.source = node;
        out.path = path;
        if (is_structural_function(node.name)) {
            structural(out);
        } else if (is_demographic_function(node.name)) {
            demographic(out);
        } else if (is_entity_function(node.name)) {
            entity(out);
        } else {
            fail(out, "unsupported function '" + node.name + "'");
        }
        if (observer_) observer_(out);
        return out;
    }

private:
    const kb::KnowledgeBase& kb_;
    const norm::Normalizer& norm_;
    const Observer& observer_;

    static void fail(ReasonedNode& n, std::string why) {
        if (n.status == Status::NonComputable) return;
        n.status = Status::NonComputable;
        n.reason = std::move(why);
    }

    void structural(ReasonedNode& out) {
        const auto& node = out.source;
        out.status = Status::Structural;
        std::size_t computable = 0;
        for (std::size_t i = 0; i < node.args.size(); ++i) {
            out.children.push_back(run(node.args[i], child_path(out.path, false, i)));
            if (out.children.back().computable()) ++computable;
        }
        if (node.name == "union") {
            if (computable == 0) fail(out, "no computable branch");
        } else if (computable != out.children.size()) {
            fail(out, "non-computable operand");
        }
        for (std::size_t i = 0; i < node.predicates.size(); ++i) {
            fail(out, "predicate on structural node");
        }
    }

    void demographic(ReasonedNode& out) {
        out.status = Status::Resolved;
        predicates(out);
    }

    void entity(ReasonedNode& out) {
        const auto& node = out.source;
        out.status = Status::Resolved;
        if (const std::string* text = node.quoted_value()) {
            named(out, *text);
        } else {
            unnamed(out);
        }
        predicates(out);
        if (out.status == Status::Resolved && out.concepts.empty()) fail(out, "empty concept set");
    }

    void named(ReasonedNode& out, const std::string& text) {
        const auto& f = out.function();
        std::vector<norm::CandidateMatch> hits;
        if (f == "lab") {
            if (auto c = norm_.try_normalize_lab(text)) hits.push_back(*c);
        } else {
            hits = norm_.normalize(text, norm::allowed_semantic_types(f));
        }
        if (hits.empty()) {
            fail(out, "normalization failure: \"" + text + "\"");
            return;
        }
        for (const auto& h : hits) out.concepts.merge(kb_.descendants(h.cui));
    }

    void unnamed(ReasonedNode& out) {
        const auto& node = out.source;
        std::size_t relation_arg = node.args.size();
        for (std::size_t i = 0; i < node.args.size(); ++i) {
            if (node.args[i].is_call()) {
                relation_arg = i;
                break;
            }
        }
        if (relation_arg == node.args.size()) {
            // Must be given meaning by a reasoning predicate.
            bool has_reasoning = false;
            for (const auto& p : node.predicates) {
                has_reasoning |= p.name == "contraindication" || p.name == "caused_by";
            }
            if (!has_reasoning) fail(out, "unnamed entity without reasoning context");
            return;
        }
        out.children.push_back(run(node.args[relation_arg], child_path(out.path, false, relation_arg)));
        const ReasonedNode& inner = out.children.back();
        if (!inner.computable()) {
            fail(out, "non-computable argument");
            return;
        }
        const auto& f = out.function();
        const auto& g = inner.function();
        if (f == "drug" && g == "cond") {
            out.concepts = kb_.drugs_treating(inner.concepts);
        } else if (f == "cond" && g == "obs") {
            for (const auto& m : inner.concepts.members()) out.concepts.merge(kb_.conditions_affecting(m));
        } else if (f == "obs" && g == "cond") {
            out.concepts = kb_.symptoms_of(inner.concepts);
        } else {
            fail(out, "no knowledge-base relation from " + g + " to " + f);
            return;
        }
        if (out.concepts.empty()) fail(out, "knowledge-base query returned no concepts");
    }

    void predicates(ReasonedNode& out) {
        const bool unnamed_entity = is_entity_function(out.function()) && !out.text();
        for (std::size_t i = 0; i < out.source.predicates.size(); ++i) {
            const LfNode& p = out.source.predicates[i];
            const NodePath ppath = child_path(out.path, true, i);
            if (p.name == "num_filter") {
                numeric(out, p);
            } else if (p.name == "within" || p.name == "before" || p.name == "after") {
                temporal(out, p, ppath);
            } else if (p.name == "caused_by") {
                auto anchor = run(p.args.at(0), child_path(ppath, false, 0));
                if (!anchor.computable()) {
                    out.children.push_back(std::move(anchor));
                    fail(out, "non-computable cause");
                } else if (unnamed_entity && out.function() == "obs" && anchor.function() == "cond") {
                    out.concepts.merge(kb_.symptoms_of(anchor.concepts));
                    out.children.push_back(std::move(anchor));
                } else if (unnamed_entity) {
                    out.children.push_back(std::move(anchor));
                    fail(out, "caused_by has no knowledge-base relation here");
                } else {
                    // A named effect is read as "occurs after its cause".
                    out.children.push_back(std::move(anchor));
                    out.temporal.push_back({Direction::After, out.children.size() - 1, std::nullopt});
                }
            } else if (p.name == "contraindication") {
                auto drugs = run(p.args.at(0), child_path(ppath, false, 0));
                const bool ok = drugs.computable();
                kb::ConceptSet contra;
                if (ok) contra = kb_.contraindications_for_drugs(drugs.concepts);
                out.children.push_back(std::move(drugs));
                if (!ok) {
                    fail(out, "non-computable contraindication target");
                } else if (unnamed_entity) {
                    out.concepts.merge(contra);
                } else {
                    kb::ConceptSet kept;
                    for (const auto& prov : contra.provenance()) {
                        if (out.concepts.contains(prov.cui)) kept.add(prov.cui, prov.rule, prov.path);
                    }
                    out.concepts = std::move(kept);
                }
            } else if (p.name == "if_then") {
                auto then = run(p.args.at(0), child_path(ppath, false, 0));
                const bool ok = then.computable();
                out.children.push_back(std::move(then));
                if (!ok) fail(out, "non-computable consequent");
                out.conditional.push_back({out.children.size() - 1});
            } else {
                fail(out, "unsupported predicate '" + p.name + "'");
            }
        }
    }

    void numeric(ReasonedNode& out, const LfNode& p) {
        for (const auto& eq : p.args) {
            if (!eq.is_call("eq") || eq.args.size() != 2) {
                fail(out, "malformed num_filter");
                return;
            }
            const LfNode& opn = eq.args[0];
            const LfNode& valn = eq.args[1];
            std::optional<CompareOp> op;
            if (opn.is_call("op") && opn.args.size() == 1) op = compare_op_from_string(opn.args[0].name);
            const std::string* vtext = valn.is_call("val") ? valn.quoted_value() : nullptr;
            auto value = vtext ? parse_decimal(*vtext) : std::nullopt;
            if (!op || !value) {
                fail(out, "non-numeric comparison");
                return;
            }
            out.numeric.push_back({*op, *value, *vtext, std::nullopt});
        }
    }

    void temporal(ReasonedNode& out, const LfNode& p, const NodePath& ppath) {
        Direction d = p.name == "within" ? Direction::Within
                      : p.name == "before" ? Direction::Before
                                           : Direction::After;
        auto anchor = run(p.args.at(0), child_path(ppath, false, 0));
        const bool ok = anchor.computable();
        out.children.push_back(std::move(anchor));
        TemporalFilter tf{d, out.children.size() - 1, std::nullopt};
        if (!ok) fail(out, "non-computable temporal anchor");
        if (d == Direction::Within) {
            const std::string* v = p.args.size() > 1 ? p.args[1].quoted_value() : nullptr;
            const double value = (v ? parse_decimal(*v) : std::nullopt).value_or(-1);
            std::string unit;
            if (p.args.size() > 2) {
                const LfNode& u = p.args[2];
                if (u.args.size() == 1) unit = u.args[0].name;
            }
            if (value < 0 || !valid_window_unit(unit)) {
                fail(out, "unsupported temporal window");
                return;
            }
            tf.window = Window{value, unit};
        }
        out.temporal.push_back(tf);
    }
};

ReasonedNode* find_mut(ReasonedNode& n, const NodePath& path) {
    if (n.path == path) return &n;
    for (auto& c : n.children) {
        if (c.path.size() <= path.size() && std::equal(c.path.begin(), c.path.end(), path.begin())) {
            if (auto* r = find_mut(c, path)) return r;
        }
    }
    return nullptr;
}

nlohmann::json concept_json(const kb::KnowledgeBase& kb, const std::string& cui,
                            const kb::ConceptSet& set) {
    nlohmann::json j;
    j["cui"] = cui;
    const kb::Concept* c = kb.find(cui);
    j["name"] = c ? c->preferred_name : "";
    auto codes = nlohmann::json::array();
    if (c) {
        for (const auto& code : c->codes) codes.push_back(std::string(kb::to_string(code.system)) + ":" + code.code);
    }
    j["codes"] = codes;
    auto derivations = nlohmann::json::array();
    for (const auto& p : set.provenance()) {
        if (p.cui != cui) continue;
        auto path = nlohmann::json::array();
        for (const auto& t : p.path) path.push_back(kb::to_string(t));
        derivations.push_back({{"rule", p.rule}, {"path", path}});
    }
    j["derivations"] = derivations;
    return j;
}

}  // namespace

const char* to_string(Status s) {
    switch (s) {
        case Status::Resolved: return "Resolved";
        case Status::NonComputable: return "NonComputable";
        case Status::Structural: return "Structural";
    }
    return "?";
}

const char* to_string(CompareOp op) {
    switch (op) {
        case CompareOp::GT: return "GT";
        case CompareOp::GTEQ: return "GTEQ";
        case CompareOp::LT: return "LT";
        case CompareOp::LTEQ: return "LTEQ";
        case CompareOp::EQ: return "EQ";
        case CompareOp::NEQ: return "NEQ";
    }
    return "?";
}

std::optional<CompareOp> compare_op_from_string(std::string_view s) {
    for (auto op : {CompareOp::GT, CompareOp::GTEQ, CompareOp::LT, CompareOp::LTEQ, CompareOp::EQ,
                    CompareOp::NEQ}) {
        if (s == to_string(op)) return op;
    }
    return std::nullopt;
}

const char* sql_operator(CompareOp op) {
    switch (op) {
        case CompareOp::GT: return ">";
        case CompareOp::GTEQ: return ">=";
        case CompareOp::LT: return "<";
        case CompareOp::LTEQ: return "<=";
        case CompareOp::EQ: return "=";
        case CompareOp::NEQ: return "<>";
    }
    return "=";
}

bool compare(double lhs, CompareOp op, double rhs) {
    switch (op) {
        case CompareOp::GT: return lhs > rhs;
        case CompareOp::GTEQ: return lhs >= rhs;
        case CompareOp::LT: return lhs < rhs;
        case CompareOp::LTEQ: return lhs <= rhs;
        case CompareOp::EQ: return lhs == rhs;
        case CompareOp::NEQ: return lhs != rhs;
    }
    return false;
}

const char* to_string(Direction d) {
    switch (d) {
        case Direction::Before: return "before";
        case Direction::After: return "after";
        case Direction::Within: return "within";
    }
    return "?";
}

bool is_entity_function(std::string_view f) {
    return f == "cond" || f == "obs" || f == "proc" || f == "drug" || f == "lab" || f == "allergy";
}

bool is_structural_function(std::string_view f) { return f == "intersect" || f == "union" || f == "not"; }

bool is_demographic_function(std::string_view f) { return f == "age" || f == "female" || f == "male"; }

ReasonedNode reason(const llf::LfNode& root, const kb::KnowledgeBase& kb,
                    const norm::Normalizer& normalizer, const Observer& observer) {
    Reasoner r(kb, normalizer, observer);
    return r.run(root, {});
}

const ReasonedNode* find_reasoned(const ReasonedNode& root, const llf::NodePath& path) {
    return find_mut(const_cast<ReasonedNode&>(root), path);
}

namespace {

// Re-derives the status of structural ancestors of an overridden node.
// Entity ancestors keep theirs: their concepts were computed from the old
// child and are not re-derived.
void refresh_structural(ReasonedNode& node, const llf::NodePath& path) {
    if (node.path == path) return;
    for (auto& c : node.children) {
        if (c.path.size() <= path.size() && std::equal(c.path.begin(), c.path.end(), path.begin())) {
            refresh_structural(c, path);
        }
    }
    if (!is_structural_function(node.function()) || !node.source.predicates.empty()) return;
    std::size_t computable = 0;
    for (const auto& c : node.children) computable += c.computable() ? 1 : 0;
    const bool ok = node.function() == "union" ? computable > 0 : computable == node.children.size();
    if (ok) {
        node.status = Status::Structural;
        node.reason.clear();
    } else {
        node.status = Status::NonComputable;
        node.reason = node.function() == "union" ? "no computable branch" : "non-computable operand";
    }
}

}  // namespace

ReasonedNode apply_override(const ReasonedNode& root, const llf::NodePath& path,
                            const kb::ConceptSet& concepts, const kb::KnowledgeBase* expand_with) {
    ReasonedNode copy = root;
    ReasonedNode* target = find_mut(copy, path);
    if (!target || !is_entity_function(target->function())) throw InvalidPath(llf::to_string(path));
    kb::ConceptSet next;
    if (expand_with) {
        for (const auto& m : concepts.members()) next.merge(expand_with->descendants(m));
    } else {
        for (const auto& m : concepts.members()) next.add(m, "override");
    }
    target->concepts = std::move(next);
    if (target->concepts.empty()) {
        target->status = Status::NonComputable;
        target->reason = "empty concept override";
    } else {
        target->status = Status::Resolved;
        target->reason.clear();
    }
    refresh_structural(copy, path);
    return copy;
}

nlohmann::json explain(const ReasonedNode& node, const kb::KnowledgeBase& kb) {
    nlohmann::json j;
    j["path"] = llf::to_string(node.path);
    j["function"] = node.function();
    j["source"] = llf::serialize(node.source);
    if (const std::string* t = node.text()) j["text"] = *t;
    j["status"] = to_string(node.status);
    if (node.status == Status::NonComputable) {
        auto colon = node.reason.find(':');
        j["label"] = "skipped: " + node.reason.substr(0, colon);
        j["reason"] = node.reason;
    }
    auto concepts = nlohmann::json::array();
    for (const auto& cui : node.concepts.members()) concepts.push_back(concept_json(kb, cui, node.concepts));
    j["concepts"] = concepts;
    auto filters = nlohmann::json::array();
    for (const auto& f : node.numeric) {
        filters.push_back(std::string("value ") + sql_operator(f.op) + " " + f.value_text);
    }
    for (const auto& t : node.temporal) {
        std::string s = to_string(t.direction);
        if (t.window) {
            char buf[32];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, t.window->value);
            (void)ec;
            s += " " + std::string(buf, end) + " " + t.window->unit;
        }
        s += " of " + llf::to_string(node.children[t.anchor].path);
        filters.push_back(s);
    }
    for (const auto& c : node.conditional) {
        filters.push_back("if present then " + llf::to_string(node.children[c.consequent].path));
    }
    j["filters"] = filters;
    auto children = nlohmann::json::array();
    for (const auto& c : node.children) children.push_back(explain(c, kb));
    j["children"] = children;
    return j;
}

}  // namespace cohortc::reason
