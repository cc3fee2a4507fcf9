#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cohortc/llf.hpp"

namespace cohortc::llf {

namespace {

std::optional<std::size_t> parse_count(std::string_view s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

const char* to_string(FunctionKind kind) {
    switch (kind) {
        case FunctionKind::Entity: return "entity";
        case FunctionKind::Demographic: return "demographic";
        case FunctionKind::Structural: return "structural";
        case FunctionKind::Value: return "value";
        case FunctionKind::Comparison: return "comparison";
        case FunctionKind::Predicate: return "predicate";
    }
    return "?";
}

std::optional<FunctionKind> function_kind_from_string(std::string_view s) {
    for (auto k : {FunctionKind::Entity, FunctionKind::Demographic, FunctionKind::Structural,
                   FunctionKind::Value, FunctionKind::Comparison, FunctionKind::Predicate}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

std::string FunctionSpec::arity_text() const {
    if (max_arity && *max_arity == min_arity) return std::to_string(min_arity);
    return std::to_string(min_arity) + ".." + (max_arity ? std::to_string(*max_arity) : "*");
}

FunctionCatalog FunctionCatalog::builtin() {
    using K = FunctionKind;
    FunctionCatalog c;
    for (const char* name : {"cond", "obs", "proc", "drug", "lab", "allergy"}) {
        c.add({name, K::Entity, 0, 1, true});
    }
    c.add({"age", K::Demographic, 0, 0, true});
    c.add({"female", K::Demographic, 0, 0, false});
    c.add({"male", K::Demographic, 0, 0, false});
    c.add({"intersect", K::Structural, 2, std::nullopt, false});
    c.add({"union", K::Structural, 2, std::nullopt, false});
    c.add({"not", K::Structural, 1, 1, false});
    c.add({"val", K::Value, 1, 1, false});
    c.add({"op", K::Value, 1, 1, false});
    c.add({"unit", K::Value, 1, 1, false});
    c.add({"eq", K::Comparison, 2, 2, false});
    c.add({"num_filter", K::Predicate, 1, std::nullopt, false});
    c.add({"caused_by", K::Predicate, 1, 1, false});
    c.add({"before", K::Predicate, 1, 1, false});
    c.add({"after", K::Predicate, 1, 1, false});
    c.add({"within", K::Predicate, 3, 3, false});
    c.add({"if_then", K::Predicate, 1, 1, false});
    c.add({"contraindication", K::Predicate, 1, 1, false});
    return c;
}

void FunctionCatalog::add(FunctionSpec spec) {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const FunctionSpec& e) { return e.name == spec.name; });
    if (it != entries_.end()) {
        *it = std::move(spec);
    } else {
        entries_.push_back(std::move(spec));
    }
}

void FunctionCatalog::extend(const FunctionCatalog& other) {
    for (const auto& e : other.entries_) add(e);
}

const FunctionSpec* FunctionCatalog::find(std::string_view name) const {
    for (const auto& e : entries_) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

FunctionCatalog FunctionCatalog::parse(std::string_view text) {
    FunctionCatalog c;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        FunctionSpec spec;
        bool has_name = false, has_kind = false;
        std::istringstream fields(line);
        std::string field;
        while (fields >> field) {
            auto eq = field.find('=');
            if (eq == std::string::npos) {
                throw LineError("CatalogError", lineno, "expected key=value, found '" + field + "'");
            }
            std::string key = field.substr(0, eq);
            std::string value = field.substr(eq + 1);
            if (key == "name") {
                spec.name = value;
                has_name = !value.empty();
            } else if (key == "kind") {
                auto k = function_kind_from_string(value);
                if (!k) throw LineError("CatalogError", lineno, "unknown kind '" + value + "'");
                spec.kind = *k;
                has_kind = true;
            } else if (key == "min") {
                auto v = parse_count(value);
                if (!v) throw LineError("CatalogError", lineno, "bad min '" + value + "'");
                spec.min_arity = *v;
            } else if (key == "max") {
                if (value == "*") {
                    spec.max_arity.reset();
                } else {
                    auto v = parse_count(value);
                    if (!v) throw LineError("CatalogError", lineno, "bad max '" + value + "'");
                    spec.max_arity = *v;
                }
            } else if (key == "chainable") {
                if (value != "true" && value != "false") {
                    throw LineError("CatalogError", lineno, "chainable must be true or false");
                }
                spec.chainable = value == "true";
            } else {
                throw LineError("CatalogError", lineno, "unknown key '" + key + "'");
            }
        }
        if (!has_name || !has_kind) {
            throw LineError("CatalogError", lineno, "entry needs name= and kind=");
        }
        if (spec.max_arity && *spec.max_arity < spec.min_arity) {
            throw LineError("CatalogError", lineno, "max below min");
        }
        c.add(std::move(spec));
    }
    return c;
}

FunctionCatalog FunctionCatalog::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot open catalog file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string FunctionCatalog::to_text() const {
    std::ostringstream out;
    for (const auto& e : entries_) {
        out << "name=" << e.name << " kind=" << to_string(e.kind) << " min=" << e.min_arity
            << " max=" << (e.max_arity ? std::to_string(*e.max_arity) : "*")
            << " chainable=" << (e.chainable ? "true" : "false") << "\n";
    }
    return out.str();
}

}  // namespace cohortc::llf
