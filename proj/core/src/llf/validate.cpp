#include <array>

#include "cohortc/llf.hpp"

namespace cohortc::llf {

bool is_operator_symbol(std::string_view s) {
    static constexpr std::array<std::string_view, 6> ops{"GT", "GTEQ", "LT", "LTEQ", "EQ", "NEQ"};
    for (auto op : ops) {
        if (s == op) return true;
    }
    return false;
}

namespace {

class Validator {
public:
    explicit Validator(const FunctionCatalog& catalog) : catalog_(catalog) {}

    std::vector<Diagnostic> run(const LfNode& root) {
        NodePath path;
        if (!root.is_call()) {
            report("ArgumentKindError", root.name, path, "expression must be a function call");
        } else {
            visit(root, path);
        }
        return std::move(out_);
    }

private:
    const FunctionCatalog& catalog_;
    std::vector<Diagnostic> out_;

    void report(const char* code, const std::string& fn, const NodePath& path, std::string message) {
        out_.push_back({code, fn, to_string(path), std::move(message)});
    }

    const FunctionSpec* spec_of(const LfNode& n) const {
        return n.is_call() ? catalog_.find(n.name) : nullptr;
    }

    bool is_expression(const LfNode& n) const {
        const FunctionSpec* s = spec_of(n);
        return s && (s->kind == FunctionKind::Entity || s->kind == FunctionKind::Demographic ||
                     s->kind == FunctionKind::Structural);
    }

    void check_expression_arg(const LfNode& node, std::size_t i, const NodePath& path) {
        if (!is_expression(node.args[i])) {
            report("ArgumentKindError", node.name, path,
                   node.name + " argument " + std::to_string(i) + " must be an expression");
        }
    }

    void check_args(const LfNode& node, const FunctionSpec& spec, const NodePath& path) {
        const auto& a = node.args;
        switch (spec.kind) {
            case FunctionKind::Entity: {
                for (const auto& arg : a) {
                    const FunctionSpec* s = spec_of(arg);
                    bool ok = arg.kind == NodeKind::Quoted || (s && s->kind == FunctionKind::Entity);
                    if (!ok) {
                        report("ArgumentKindError", node.name, path,
                               node.name + " takes a quoted span or an entity expression");
                    }
                }
                return;
            }
            case FunctionKind::Structural:
                for (std::size_t i = 0; i < a.size(); ++i) check_expression_arg(node, i, path);
                return;
            case FunctionKind::Demographic:
                return;
            default:
                break;
        }

        if (node.name == "val") {
            if (!a.empty() && a[0].kind != NodeKind::Quoted) {
                report("ArgumentKindError", node.name, path, "val takes a quoted value");
            }
        } else if (node.name == "op") {
            if (!a.empty() && (a[0].kind != NodeKind::Symbol || !is_operator_symbol(a[0].name))) {
                report("ArgumentKindError", node.name, path,
                       "op takes one of GT, GTEQ, LT, LTEQ, EQ, NEQ");
            }
        } else if (node.name == "unit") {
            if (!a.empty() && a[0].kind == NodeKind::Call) {
                report("ArgumentKindError", node.name, path, "unit takes a quoted value or symbol");
            }
        } else if (node.name == "eq") {
            if (a.size() == 2 && (!a[0].is_call("op") || !a[1].is_call("val"))) {
                report("ArgumentKindError", node.name, path, "eq takes op(...) then val(...)");
            }
        } else if (node.name == "num_filter") {
            for (const auto& arg : a) {
                if (!arg.is_call("eq")) {
                    report("ArgumentKindError", node.name, path, "num_filter takes eq(...) arguments");
                    break;
                }
            }
        } else if (node.name == "within") {
            if (a.size() == 3) {
                check_expression_arg(node, 0, path);
                if (!a[1].is_call("val") || !a[2].is_call("unit")) {
                    report("ArgumentKindError", node.name, path,
                           "within takes an expression, val(...) and unit(...)");
                }
            }
        } else if (node.name == "caused_by" || node.name == "before" || node.name == "after" ||
                   node.name == "if_then" || node.name == "contraindication") {
            if (!a.empty()) check_expression_arg(node, 0, path);
        }
    }

    void visit(const LfNode& node, NodePath& path) {
        const FunctionSpec* spec = catalog_.find(node.name);
        if (!spec) {
            report("UnknownFunction", node.name, path, "unknown function '" + node.name + "'");
        } else {
            if (!spec->accepts(node.args.size())) {
                report("ArityError", node.name, path,
                       node.name + " got " + std::to_string(node.args.size()) + " allowed " +
                           spec->arity_text());
            }
            check_args(node, *spec, path);
            if (!node.predicates.empty() && !spec->chainable) {
                report("ChainingError", node.name, path, node.name + " does not accept predicates");
            }
        }

        for (std::size_t i = 0; i < node.args.size(); ++i) {
            if (!node.args[i].is_call()) continue;
            path.push_back({false, i});
            visit(node.args[i], path);
            path.pop_back();
        }
        for (std::size_t i = 0; i < node.predicates.size(); ++i) {
            const LfNode& p = node.predicates[i];
            path.push_back({true, i});
            const FunctionSpec* ps = spec_of(p);
            if (!p.is_call() || (ps && ps->kind != FunctionKind::Predicate)) {
                report("ChainingError", p.name, path, "'" + p.name + "' is not a predicate");
            }
            if (p.is_call()) visit(p, path);
            path.pop_back();
        }
    }
};

}  // namespace

std::vector<Diagnostic> validate(const LfNode& node, const FunctionCatalog& catalog) {
    return Validator(catalog).run(node);
}

}  // namespace cohortc::llf
