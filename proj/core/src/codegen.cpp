#include "cohortc/codegen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace cohortc::codegen {

namespace {

using reason::Direction;
using reason::ReasonedNode;
using reason::Status;

std::string quote(std::string_view s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out.push_back('\'');
        out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string describe(const ReasonedNode& n) {
    return "'" + llf::serialize(n.source) + "'";
}

/// A boolean condition that may have folded to a constant.
struct Cond {
    enum Kind { True, False, Sql } kind = True;
    std::string sql;
    static Cond yes() { return {True, {}}; }
    static Cond no() { return {False, {}}; }
    static Cond of(std::string s) { return {Sql, std::move(s)}; }
};

Cond any_of(const Cond& a, const Cond& b) {
    if (a.kind == Cond::True || b.kind == Cond::True) return Cond::yes();
    if (a.kind == Cond::False) return b;
    if (b.kind == Cond::False) return a;
    return Cond::of("(" + a.sql + " OR " + b.sql + ")");
}

class Compiler {
public:
    Compiler(const smm::SemanticMetadataMapping& smm, const kb::KnowledgeBase& kb, const CompileOptions& opts)
        : smm_(smm), kb_(kb), opts_(opts) {}

    std::string cohort(const ReasonedNode& n) {
        if (!n.computable()) throw Error("NonComputable", "cannot compile non-computable node " + describe(n));
        if (reason::is_structural_function(n.function())) return structural(n);
        if (reason::is_demographic_function(n.function())) return demographic(n);
        std::string base = entity_cohort(n);
        if (n.conditional.empty()) return base;
        std::vector<std::string> then{wrap(base)};
        for (const auto& c : n.conditional) then.push_back(wrap(cohort(n.children[c.consequent])));
        std::string absent = all_persons() + " EXCEPT " + wrap(base);
        return wrap(absent) + " UNION " + wrap(join(then, " INTERSECT "));
    }

    std::vector<std::string> concepts_used() const { return {used_.begin(), used_.end()}; }

private:
    const smm::SemanticMetadataMapping& smm_;
    const kb::KnowledgeBase& kb_;
    const CompileOptions& opts_;
    std::set<std::string> used_;
    int alias_ = 0;

    std::string next_alias(char prefix) { return std::string(1, prefix) + std::to_string(++alias_); }

    std::string wrap(const std::string& sql) { return "SELECT person_id FROM (" + sql + ") AS " + next_alias('q'); }

    const smm::PersonTable& person() {
        if (!smm_.person) throw NoMappingTarget("demographics (SMM has no person table)");
        return *smm_.person;
    }

    static std::string person_select(const std::string& column) {
        return column == "person_id" ? column : column + " AS person_id";
    }

    std::string all_persons() {
        const auto& p = person();
        return "SELECT " + person_select(p.person_id_column) + " FROM " + p.table_name;
    }

    std::string structural(const ReasonedNode& n) {
        std::vector<std::string> operands;
        for (const auto& c : n.children) {
            if (c.computable()) operands.push_back(wrap(cohort(c)));
        }
        if (n.function() == "not") return all_persons() + " EXCEPT " + operands.at(0);
        return join(operands, n.function() == "union" ? " UNION " : " INTERSECT ");
    }

    // --- demographics -------------------------------------------------------

    std::string date_literal(const date::Date& d) const {
        auto s = quote(date::format_date(d));
        return opts_.dialect == Dialect::Ansi ? "DATE " + s : s;
    }

    std::string timestamp_literal(const std::string& ts) const {
        return opts_.dialect == Dialect::Ansi ? "TIMESTAMP " + quote(ts) : quote(ts);
    }

    date::Date reference_date() const {
        if (opts_.pin_date) return *opts_.pin_date;
        if (opts_.today) return *opts_.today;
        return date::today();
    }

    // age >= k  <=>  birth_date <= reference minus k years.
    Cond age_at_least(long long k) {
        const auto ref = reference_date();
        const long long year = static_cast<int>(ref.year()) - k;
        if (year < 1) return Cond::no();
        if (year > 9999) return Cond::yes();
        return Cond::of(person().birth_date_column + " <= " +
                        date_literal(date::minus_years(ref, static_cast<int>(k))));
    }

    Cond age_below(long long k) {
        Cond c = age_at_least(k);
        if (c.kind == Cond::True) return Cond::no();
        if (c.kind == Cond::False) return Cond::yes();
        auto pos = c.sql.find(" <= ");
        return Cond::of(c.sql.substr(0, pos) + " > " + c.sql.substr(pos + 4));
    }

    std::vector<Cond> age_conditions(const reason::NumericFilter& f) {
        const double v = f.value;
        const bool integral = std::floor(v) == v;
        const auto fl = static_cast<long long>(std::floor(v));
        const auto ce = static_cast<long long>(std::ceil(v));
        switch (f.op) {
            case reason::CompareOp::GT: return {age_at_least(fl + 1)};
            case reason::CompareOp::GTEQ: return {age_at_least(ce)};
            case reason::CompareOp::LT: return {age_below(ce)};
            case reason::CompareOp::LTEQ: return {age_below(fl + 1)};
            case reason::CompareOp::EQ:
                if (!integral) return {Cond::no()};
                return {age_at_least(fl), age_below(fl + 1)};
            case reason::CompareOp::NEQ:
                if (!integral) return {Cond::yes()};
                return {any_of(age_below(fl), age_at_least(fl + 1))};
        }
        return {};
    }

    std::string demographic(const ReasonedNode& n) {
        const auto& p = person();
        std::vector<Cond> conds;
        if (n.function() == "female") conds.push_back(Cond::of(p.gender_column.name + " = " + quote(p.gender_column.female)));
        if (n.function() == "male") conds.push_back(Cond::of(p.gender_column.name + " = " + quote(p.gender_column.male)));
        if (n.function() == "age") {
            for (const auto& f : n.numeric) {
                for (auto& c : age_conditions(f)) conds.push_back(std::move(c));
            }
        } else if (!n.numeric.empty()) {
            throw UnsupportedFilter("numeric filter on " + n.function() + "()");
        }
        if (!n.temporal.empty() || !n.conditional.empty()) {
            throw UnsupportedFilter("temporal or conditional predicate on " + n.function() + "()");
        }
        std::vector<std::string> where;
        for (const auto& c : conds) {
            if (c.kind == Cond::False) {
                where = {"1 = 0"};
                break;
            }
            if (c.kind == Cond::Sql) where.push_back(c.sql);
        }
        std::string sql = "SELECT DISTINCT " + person_select(p.person_id_column) + " FROM " + p.table_name;
        if (!where.empty()) sql += " WHERE " + join(where, " AND ");
        return sql;
    }

    // --- entities -------------------------------------------------------------

    std::vector<MappingTarget> targets(const ReasonedNode& n) {
        auto t = map_criterion(n, smm_, kb_);
        if (t.empty()) throw NoMappingTarget(describe(n));
        for (const auto& target : t) used_.insert(target.concepts.begin(), target.concepts.end());
        return t;
    }

    std::string select_target(const MappingTarget& t, const ReasonedNode& n, bool with_time) {
        const auto& table = *t.table;
        std::string sel = person_select(table.person_id_column);
        if (with_time) {
            if (!table.date_column) throw UnsupportedFilter("temporal predicate over undated table " + table.table_name);
            sel += ", " + *table.date_column + " AS event_time";
        } else {
            sel = "DISTINCT " + sel;
        }
        std::vector<std::string> where;
        std::string value_column;
        if (table.strategy == smm::Strategy::Tall) {
            const auto& col = table.code_column->name;
            if (t.codes.size() == 1) {
                where.push_back(col + " = " + quote(t.codes[0]));
            } else {
                std::vector<std::string> q;
                for (const auto& c : t.codes) q.push_back(quote(c));
                where.push_back(col + " IN (" + join(q, ", ") + ")");
            }
            if (table.value_column) value_column = *table.value_column;
        } else if (t.column->role == smm::ColumnRole::Value) {
            where.push_back(t.column->name + " IS NOT NULL");
            value_column = t.column->name;
        } else {
            where.push_back(t.column->name + " = 1");
        }
        for (const auto& f : n.numeric) {
            if (value_column.empty()) {
                throw UnsupportedFilter("numeric filter on " + table.table_name + " without a value column");
            }
            where.push_back(value_column + " " + reason::sql_operator(f.op) + " " + f.value_text);
        }
        if (opts_.pin_date && table.date_column) {
            where.push_back(*table.date_column + " <= " + timestamp_literal(date::end_of_day(*opts_.pin_date)));
        }
        return "SELECT " + sel + " FROM " + table.table_name + " WHERE " + join(where, " AND ");
    }

    std::string entity_cohort(const ReasonedNode& n) {
        if (n.temporal.empty()) {
            std::vector<std::string> parts;
            for (const auto& t : targets(n)) parts.push_back(select_target(t, n, false));
            return join(parts, " UNION ");
        }
        std::string events = event_sql(n);
        return "SELECT DISTINCT person_id FROM (" + events + ") AS " + next_alias('q');
    }

    std::string window_end(const std::string& anchor_time, const reason::Window& w) {
        double factor = w.unit == "minutes" ? 1 : w.unit == "hours" ? 60 : w.unit == "days" ? 1440 : 10080;
        double minutes = w.value * factor;
        if (std::abs(minutes - std::round(minutes)) > 1e-9 || minutes > 1e9) {
            throw UnsupportedFilter("window is not a whole number of minutes");
        }
        auto m = std::to_string(static_cast<long long>(std::llround(minutes)));
        if (opts_.dialect == Dialect::Ansi) return anchor_time + " + INTERVAL '" + m + "' MINUTE";
        return "datetime(" + anchor_time + ", '+" + m + " minutes')";
    }

    /// (person_id, event_time) rows of the node's matching events.
    std::string event_sql(const ReasonedNode& n) {
        if (!reason::is_entity_function(n.function())) {
            throw UnsupportedFilter("temporal predicate over " + n.function() + "()");
        }
        if (!n.conditional.empty()) throw UnsupportedFilter("if_then inside a temporal predicate");
        std::vector<std::string> parts;
        for (const auto& t : targets(n)) parts.push_back(select_target(t, n, true));
        std::string raw = join(parts, " UNION ");
        if (n.temporal.empty()) return raw;
        const std::string x = next_alias('e');
        std::vector<std::string> exists;
        for (const auto& tf : n.temporal) {
            std::string anchor = event_sql(n.children[tf.anchor]);
            const std::string y = next_alias('e');
            std::string cmp;
            switch (tf.direction) {
                case Direction::Before: cmp = x + ".event_time < " + y + ".event_time"; break;
                case Direction::After: cmp = x + ".event_time > " + y + ".event_time"; break;
                case Direction::Within:
                    cmp = x + ".event_time >= " + y + ".event_time AND " + x + ".event_time <= " +
                          window_end(y + ".event_time", *tf.window);
                    break;
            }
            exists.push_back("EXISTS (SELECT 1 FROM (" + anchor + ") AS " + y + " WHERE " + y + ".person_id = " + x +
                             ".person_id AND " + cmp + ")");
        }
        return "SELECT " + x + ".person_id, " + x + ".event_time FROM (" + raw + ") AS " + x + " WHERE " +
               join(exists, " AND ");
    }
};

std::string root_cause(const ReasonedNode& n) {
    for (const auto& c : n.children) {
        if (!c.computable()) return root_cause(c);
    }
    return n.reason;
}

}  // namespace

const char* to_string(Dialect d) { return d == Dialect::Ansi ? "ansi" : "sqlite"; }

std::optional<Dialect> dialect_from_string(std::string_view s) {
    if (s == "ansi") return Dialect::Ansi;
    if (s == "sqlite") return Dialect::Sqlite;
    return std::nullopt;
}

const char* to_string(LineStatus s) { return s == LineStatus::Executed ? "Executed" : "Skipped"; }

std::vector<MappingTarget> map_criterion(const ReasonedNode& node, const smm::SemanticMetadataMapping& smm,
                                         const kb::KnowledgeBase& kb) {
    std::vector<MappingTarget> out;
    if (!reason::is_entity_function(node.function())) return out;
    const auto& members = node.concepts.members();
    for (const auto& table : smm.tables) {
        if (table.strategy == smm::Strategy::Tall) {
            MappingTarget t;
            t.table = &table;
            std::set<std::string> codes;
            for (const auto& m : members) {
                if (!kb.find(m)) continue;
                bool tagged = std::any_of(table.tag_concepts.begin(), table.tag_concepts.end(),
                                          [&](const std::string& tag) { return kb.find(tag) && kb.subsumes(tag, m); });
                if (!tagged) continue;
                auto c = kb.at(m).codes_in(table.code_column->system);
                if (c.empty()) continue;
                codes.insert(c.begin(), c.end());
                t.concepts.push_back(m);
            }
            if (codes.empty()) continue;
            t.codes.assign(codes.begin(), codes.end());
            out.push_back(std::move(t));
        } else {
            for (const auto& col : table.columns) {
                MappingTarget t;
                t.table = &table;
                t.column = &col;
                for (const auto& c : col.concepts) {
                    if (members.contains(c)) t.concepts.push_back(c);
                }
                if (!t.concepts.empty()) out.push_back(std::move(t));
            }
        }
    }
    return out;
}

CompiledLine compile(const ReasonedNode& node, const smm::SemanticMetadataMapping& smm, const kb::KnowledgeBase& kb,
                     const CompileOptions& options) {
    Compiler c(smm, kb, options);
    CompiledLine out;
    out.sql = c.cohort(node);
    out.concepts_used = c.concepts_used();
    return out;
}

std::string compile_line(const ReasonedNode& node, const smm::SemanticMetadataMapping& smm,
                         const kb::KnowledgeBase& kb, const CompileOptions& options) {
    return compile(node, smm, kb, options).sql;
}

QueryPlan compile_trial(std::span<const llf::Criterion> criteria,
                        std::span<const std::optional<ReasonedNode>> reasoned,
                        const smm::SemanticMetadataMapping& smm, const kb::KnowledgeBase& kb,
                        const CompileOptions& options) {
    if (criteria.size() != reasoned.size()) throw Error("InvalidArgument", "criteria and reasoned lists differ in length");
    QueryPlan plan;
    plan.smm_name = smm.name;
    plan.dialect = to_string(options.dialect);
    if (options.pin_date) plan.pin_date = date::format_date(*options.pin_date);
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        PlanLine line;
        line.line_number = criteria[i].line_number;
        line.polarity = criteria[i].polarity;
        const auto& r = reasoned[i];
        if (!r) {
            line.reason = "NotTranslatable";
            line.detail = "no logical form";
        } else if (!r->computable()) {
            line.reason = "NonComputable";
            line.detail = root_cause(*r);
        } else {
            try {
                auto compiled = compile(*r, smm, kb, options);
                line.status = LineStatus::Executed;
                line.sql = std::move(compiled.sql);
                line.concepts_used = std::move(compiled.concepts_used);
            } catch (const NoMappingTarget& e) {
                line.reason = e.code();
                line.detail = e.what();
            } catch (const UnsupportedFilter& e) {
                line.reason = e.code();
                line.detail = e.what();
            }
        }
        plan.lines.push_back(std::move(line));
    }
    return plan;
}

nlohmann::json to_json(const QueryPlan& plan) {
    nlohmann::json lines = nlohmann::json::array();
    for (const auto& l : plan.lines) {
        lines.push_back({
            {"line", l.line_number},
            {"polarity", llf::to_string(l.polarity)},
            {"status", to_string(l.status)},
            {"sql", l.sql ? nlohmann::json(*l.sql) : nlohmann::json(nullptr)},
            {"reason", l.reason},
            {"detail", l.detail},
            {"concepts_used", l.concepts_used},
        });
    }
    return {
        {"smm", plan.smm_name},
        {"dialect", plan.dialect},
        {"pin_date", plan.pin_date ? nlohmann::json(*plan.pin_date) : nlohmann::json(nullptr)},
        {"lines", lines},
    };
}

QueryPlan plan_from_json(const nlohmann::json& j) {
    try {
        QueryPlan plan;
        plan.smm_name = j.at("smm").get<std::string>();
        plan.dialect = j.value("dialect", std::string("ansi"));
        if (j.contains("pin_date") && !j.at("pin_date").is_null()) plan.pin_date = j.at("pin_date").get<std::string>();
        for (const auto& l : j.at("lines")) {
            PlanLine line;
            line.line_number = l.at("line").get<std::size_t>();
            auto pol = llf::polarity_from_string(l.at("polarity").get<std::string>());
            if (!pol) throw Error("InvalidPlan", "bad polarity");
            line.polarity = *pol;
            auto status = l.at("status").get<std::string>();
            if (status != "Executed" && status != "Skipped") throw Error("InvalidPlan", "bad status '" + status + "'");
            line.status = status == "Executed" ? LineStatus::Executed : LineStatus::Skipped;
            if (l.contains("sql") && !l.at("sql").is_null()) line.sql = l.at("sql").get<std::string>();
            if (line.status == LineStatus::Executed && !line.sql) throw Error("InvalidPlan", "executed line without sql");
            line.reason = l.value("reason", std::string());
            line.detail = l.value("detail", std::string());
            if (l.contains("concepts_used")) line.concepts_used = l.at("concepts_used").get<std::vector<std::string>>();
            plan.lines.push_back(std::move(line));
        }
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw Error("InvalidPlan", e.what());
    }
}

}  // namespace cohortc::codegen
