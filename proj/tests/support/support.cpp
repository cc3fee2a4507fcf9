#include "support.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "cohortc/date.hpp"
#include "cohortc/normalizer.hpp"

namespace cohortc::testing {

namespace fs = std::filesystem;
using llf::LfNode;

fs::path data_dir() { return COHORTC_TEST_DATA_DIR; }
fs::path golden_dir() { return COHORTC_TEST_GOLDEN_DIR; }

const engine::Engine& fixture_engine() {
    static const engine::Engine e = [] {
        engine::Config c;
        c.data_dir = data_dir();
        return engine::Engine::from_config(c);
    }();
    return e;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

// ---------------------------------------------------------------------------
// Logical forms

std::string random_span(std::mt19937_64& rng, bool safe) {
    static const std::string safe_chars = "abcdefghijklmnopqrstuvwxyz ABCXYZ0123456789";
    static const std::vector<std::string> risky{"\"", "\\", "(", ")", ",", ".", "-", "é", "'", "=", "<"};
    std::string s;
    const int len = uniform(rng, 1, 12);
    for (int i = 0; i < len; ++i) {
        if (!safe && chance(rng, 0.15)) {
            s += pick(rng, risky);
        } else {
            s += safe_chars[std::uniform_int_distribution<std::size_t>(0, safe_chars.size() - 1)(rng)];
        }
    }
    return s;
}

namespace {

class AstGen {
public:
    AstGen(std::mt19937_64& rng, const AstOptions& o) : rng_(rng), o_(o) {}

    LfNode expr(int depth) {
        const int r = uniform(rng_, 0, 9);
        if (depth <= 0 || r < 4) return entity(depth);
        if (r < 6) return demographic();
        if (r < 9) {
            static const std::vector<std::string> fns{"intersect", "union"};
            std::vector<LfNode> args;
            const int n = uniform(rng_, 2, 3);
            for (int i = 0; i < n; ++i) args.push_back(expr(depth - 1));
            return LfNode::call(pick(rng_, fns), std::move(args));
        }
        return LfNode::call("not", {expr(depth - 1)});
    }

private:
    std::mt19937_64& rng_;
    const AstOptions& o_;

    LfNode quoted() { return LfNode::quoted(random_span(rng_, o_.safe_spans)); }

    LfNode number() {
        std::string v = std::to_string(uniform(rng_, 0, 500));
        if (chance(rng_, 0.3)) v += "." + std::to_string(uniform(rng_, 0, 9));
        return LfNode::call("val", {LfNode::quoted(v)});
    }

    LfNode eq() {
        static const std::vector<std::string> ops{"GT", "GTEQ", "LT", "LTEQ", "EQ", "NEQ"};
        return LfNode::call("eq", {LfNode::call("op", {LfNode::symbol(pick(rng_, ops))}), number()});
    }

    LfNode num_filter() {
        std::vector<LfNode> eqs;
        const int n = uniform(rng_, 1, 2);
        for (int i = 0; i < n; ++i) eqs.push_back(eq());
        return LfNode::call("num_filter", std::move(eqs));
    }

    LfNode demographic() {
        const int r = uniform(rng_, 0, 2);
        if (r == 0) return LfNode::call("female");
        if (r == 1) return LfNode::call("male");
        LfNode a = LfNode::call("age");
        if (chance(rng_, 0.8)) a.predicates.push_back(num_filter());
        return a;
    }

    LfNode entity(int depth) {
        static const std::vector<std::string> fns{"cond", "obs", "proc", "drug", "lab", "allergy"};
        LfNode n = LfNode::call(pick(rng_, fns));
        const int r = uniform(rng_, 0, 9);
        if (r < 7) {
            n.args.push_back(quoted());
        } else if (r < 9 && depth > 0) {
            n.args.push_back(entity(depth - 1));
        }
        const int preds = depth > 0 ? uniform(rng_, 0, 2) : uniform(rng_, 0, 1);
        for (int i = 0; i < preds; ++i) n.predicates.push_back(predicate(depth));
        return n;
    }

    LfNode predicate(int depth) {
        const int r = depth > 0 ? uniform(rng_, 0, 6) : 0;
        static const std::vector<std::string> units{"minutes", "hours", "days", "weeks"};
        switch (r) {
            case 0: return num_filter();
            case 1: return LfNode::call("caused_by", {expr(depth - 1)});
            case 2: return LfNode::call("before", {expr(depth - 1)});
            case 3: return LfNode::call("after", {expr(depth - 1)});
            case 4:
                return LfNode::call("within", {expr(depth - 1), number(),
                                               LfNode::call("unit", {LfNode::quoted(pick(rng_, units))})});
            case 5: return LfNode::call("if_then", {expr(depth - 1)});
            default: return LfNode::call("contraindication", {expr(depth - 1)});
        }
    }
};

}  // namespace

LfNode random_ast(std::mt19937_64& rng, const AstOptions& options) {
    AstGen g(rng, options);
    LfNode root = g.expr(options.max_depth);
    llf::assign_span_indices(root);
    return root;
}

// ---------------------------------------------------------------------------
// Isa DAGs

Dag random_dag(std::mt19937_64& rng, std::size_t n) {
    Dag d;
    d.n = n;
    // Edges always point from a higher index to a lower one, so no cycles.
    const double p = std::min(1.0, 2.5 / static_cast<double>(std::max<std::size_t>(n, 2)));
    for (std::size_t child = 1; child < n; ++child) {
        for (std::size_t parent = 0; parent < child; ++parent) {
            if (chance(rng, p)) d.child_parent.emplace_back(child, parent);
        }
    }
    std::shuffle(d.child_parent.begin(), d.child_parent.end(), rng);
    return d;
}

std::string dag_cui(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "D%06zu", i);
    return buf;
}

kb::KnowledgeBase kb_from_dag(const Dag& dag) {
    std::vector<kb::Concept> concepts;
    for (std::size_t i = 0; i < dag.n; ++i) concepts.push_back({dag_cui(i), "node " + std::to_string(i), {"dsyn"}, {}});
    std::vector<kb::Triple> triples;
    for (auto [c, p] : dag.child_parent) triples.push_back({dag_cui(c), kb::Predicate::Isa, dag_cui(p), std::nullopt});
    return kb::KnowledgeBase(std::move(concepts), std::move(triples));
}

std::set<std::size_t> bfs_descendants(const Dag& dag, std::size_t root) {
    std::vector<std::vector<std::size_t>> children(dag.n);
    for (auto [c, p] : dag.child_parent) children[p].push_back(c);
    std::set<std::size_t> seen{root};
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (auto c : children[v]) {
            if (seen.insert(c).second) queue.push_back(c);
        }
    }
    return seen;
}

// ---------------------------------------------------------------------------
// Randomized criteria

CriterionGenerator::CriterionGenerator(const engine::Engine& engine, const harness::Schema& schema) {
    const auto& kb = engine.knowledge_base();
    std::set<std::string> seen;
    for (const auto& e : engine.normalizer().lexicon().entries()) {
        auto it = schema.event_concepts.find(e.cui);
        if (it == schema.event_concepts.end() || !seen.insert(e.phrase).second) continue;
        if (e.phrase.find('"') != std::string::npos) continue;
        const auto& c = kb.at(e.cui);
        switch (it->second) {
            case harness::Category::Condition:
                if (c.has_semantic_type("dsyn") || c.has_semantic_type("neop") || c.has_semantic_type("mobd")) {
                    conditions_.push_back(e.phrase);
                }
                break;
            case harness::Category::Procedure: procedures_.push_back(e.phrase); break;
            case harness::Category::Drug: drugs_.push_back(e.phrase); break;
            case harness::Category::Measurement: labs_.push_back(e.phrase); break;
        }
    }
}

std::string CriterionGenerator::entity(std::mt19937_64& rng, int depth) {
    const int r = uniform(rng, 0, 9);
    auto named = [](const char* fn, const std::string& phrase) { return std::string(fn) + "(\"" + phrase + "\")"; };
    if (r < 4) return named("cond", pick(rng, conditions_));
    if (r < 5) return named("proc", pick(rng, procedures_));
    if (r < 6) return named("drug", pick(rng, drugs_));
    if (r < 9 || depth <= 0) {
        std::string s = named("lab", pick(rng, labs_));
        if (chance(rng, 0.7)) {
            static const std::vector<std::string> ops{"GT", "GTEQ", "LT", "LTEQ", "EQ", "NEQ"};
            std::string eqs;
            const int n = uniform(rng, 1, 2);
            for (int i = 0; i < n; ++i) {
                if (i) eqs += ", ";
                std::string v = std::to_string(uniform(rng, 1, 300));
                if (chance(rng, 0.5)) v += "." + std::to_string(uniform(rng, 0, 9));
                eqs += "eq(op(" + pick(rng, ops) + "), val(\"" + v + "\"))";
            }
            s += ".num_filter(" + eqs + ")";
        }
        return s;
    }
    return "drug(" + named("cond", pick(rng, conditions_)) + ")";
}

std::string CriterionGenerator::expr(std::mt19937_64& rng, int depth) {
    const int r = uniform(rng, 0, 19);
    if (depth <= 0 || r < 7) return entity(rng, depth);
    if (r < 9) {
        const int d = uniform(rng, 0, 2);
        if (d == 0) return "female()";
        if (d == 1) return "male()";
        static const std::vector<std::string> ops{"GT", "GTEQ", "LT", "LTEQ", "EQ", "NEQ"};
        const std::string v = std::to_string(uniform(rng, 10, 90)) + (chance(rng, 0.2) ? ".5" : "");
        return "age().num_filter(eq(op(" + pick(rng, ops) + "), val(\"" + v + "\")))";
    }
    if (r < 14) {
        const std::string fn = r < 12 ? "intersect" : "union";
        std::string s = fn + "(";
        const int n = uniform(rng, 2, 3);
        for (int i = 0; i < n; ++i) s += (i ? ", " : "") + expr(rng, depth - 1);
        return s + ")";
    }
    if (r < 15) return "not(" + expr(rng, depth - 1) + ")";
    if (r < 19) {
        static const std::vector<std::string> units{"minutes", "hours", "days", "weeks"};
        const std::string left = entity(rng, 0);
        const std::string right = entity(rng, 0);
        const int t = uniform(rng, 0, 2);
        if (t == 0) {
            const std::string unit = pick(rng, units);
            const int n = unit == "minutes" ? uniform(rng, 30, 600) : uniform(rng, 1, 10);
            return left + ".within(" + right + ", val(\"" + std::to_string(n) + "\"), unit(\"" + unit + "\"))";
        }
        return left + (t == 1 ? ".before(" : ".after(") + right + ")";
    }
    return entity(rng, 0) + ".if_then(" + entity(rng, 0) + ")";
}

std::string CriterionGenerator::next(std::mt19937_64& rng) { return expr(rng, 2); }

// ---------------------------------------------------------------------------
// Compiled SQL against the oracle

namespace {

harness::GeneratedDb generate_with_feasible_plants(const engine::Engine& e, const harness::Schema& schema,
                                                   harness::GenerateOptions gopts,
                                                   const std::vector<reason::ReasonedNode>& candidates,
                                                   std::size_t wanted, std::size_t count) {
    std::vector<harness::Plant> accepted;
    for (const auto& node : candidates) {
        if (accepted.size() == wanted) break;
        if (!node.computable()) continue;
        accepted.push_back({node, count});
        try {
            harness::GenerateOptions probe = gopts;
            probe.n_patients = std::max<std::size_t>(count * accepted.size(), 50);
            (void)harness::generate_db(probe, accepted, e.knowledge_base(), schema);
        } catch (const harness::InfeasiblePlant&) {
            accepted.pop_back();
        }
    }
    return harness::generate_db(gopts, accepted, e.knowledge_base(), schema);
}

std::string show(const harness::Cohort& c) {
    std::string out = "{";
    std::size_t shown = 0;
    for (auto id : c) {
        if (shown++ == 8) {
            out += " ...";
            break;
        }
        out += (shown > 1 ? " " : "") + std::to_string(id);
    }
    return out + "} n=" + std::to_string(c.size());
}

}  // namespace

EquivalenceReport run_equivalence(const EquivalenceOptions& options) {
    const auto& e = fixture_engine();
    const auto& kb = e.knowledge_base();
    const auto schema = harness::Schema::build(kb);
    const auto tall_smm = harness::make_smm(schema, harness::Variant::Tall);
    const auto pivoted_smm = harness::make_smm(schema, harness::Variant::Pivoted);
    CriterionGenerator gen(e, schema);
    const auto today = *date::parse_date(kToday);
    const auto pin = *date::parse_date("2019-06-30");

    EquivalenceReport report;
    std::mt19937_64 rng(options.seed);
    for (std::size_t d = 0; d < options.databases; ++d) {
        std::vector<reason::ReasonedNode> nodes;
        std::vector<std::string> texts;
        for (std::size_t i = 0; i < options.criteria_per_database; ++i) {
            texts.push_back(gen.next(rng));
            nodes.push_back(reason::reason(llf::parse(texts.back(), e.catalog()), kb, e.normalizer()));
        }
        harness::GenerateOptions gopts;
        gopts.seed = rng();
        gopts.n_patients = options.patients;
        gopts.reference = today;
        const auto generated = generate_with_feasible_plants(e, schema, gopts, nodes, options.plants_per_database,
                                                             options.plant_count);
        sql::Database tall_db, pivoted_db;
        harness::load(tall_db, harness::materialize(generated.db, schema, harness::Variant::Tall));
        harness::load(pivoted_db, harness::materialize(generated.db, schema, harness::Variant::Pivoted));

        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& node = nodes[i];
            if (!node.computable()) {
                ++report.skipped;
                continue;
            }
            codegen::CompileOptions copts;
            copts.dialect = codegen::Dialect::Sqlite;
            copts.today = today;
            harness::OracleOptions oopts;
            oopts.today = today;
            if (i % 2 == 1) {
                copts.pin_date = pin;
                oopts.pin_date = pin;
            }
            std::optional<std::string> tall_sql, pivoted_sql;
            try {
                tall_sql = codegen::compile_line(node, tall_smm, kb, copts);
            } catch (const Error&) {
            }
            try {
                pivoted_sql = codegen::compile_line(node, pivoted_smm, kb, copts);
            } catch (const Error&) {
            }
            if (!tall_sql && !pivoted_sql) {
                ++report.skipped;
                continue;
            }
            ++report.pairs;
            const std::string label = "db " + std::to_string(d) + (copts.pin_date ? " pinned " : " ") + texts[i];
            if (!tall_sql || !pivoted_sql) {
                ++report.mismatches;
                report.failures.push_back(label + ": compiles on one variant only");
                continue;
            }
            const auto expected = harness::oracle_eval(node, generated.db, kb, oopts);
            const auto tall = tall_db.person_ids(*tall_sql);
            const auto pivoted = pivoted_db.person_ids(*pivoted_sql);
            if (!expected.empty()) ++report.nonempty;
            if (tall != expected || pivoted != expected) {
                ++report.mismatches;
                report.failures.push_back(label + ": oracle " + show(expected) + " tall " + show(tall) + " pivoted " +
                                          show(pivoted));
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Two-table UNION and pin-date soundness

namespace {

smm::SemanticMetadataMapping without_table(smm::SemanticMetadataMapping s, const std::string& table) {
    std::erase_if(s.tables, [&](const smm::TableMapping& t) { return t.table_name == table; });
    s.name += "_without_" + table;
    return s;
}

std::vector<std::string> random_criteria(std::mt19937_64& rng, const engine::Engine& e, const harness::Schema& schema,
                                         std::size_t n) {
    CriterionGenerator gen(e, schema);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(gen.next(rng));
    return out;
}

}  // namespace

UnionReport run_union_check(std::uint64_t seed, std::size_t patients) {
    const auto& e = fixture_engine();
    const auto& kb = e.knowledge_base();
    const auto schema = harness::Schema::build(kb);
    const auto full = harness::make_smm(schema, harness::Variant::Tall);
    const auto only_problem_list = without_table(full, "condition_occurrence");
    const auto only_conditions = without_table(full, "problem_list");

    std::mt19937_64 rng(seed);
    harness::GenerateOptions gopts;
    gopts.seed = rng();
    gopts.n_patients = patients;
    const auto generated = harness::generate_db(gopts, {}, kb, schema);
    sql::Database db;
    harness::load(db, harness::materialize(generated.db, schema, harness::Variant::Tall));

    std::vector<std::string> texts{R"(cond("type 2 diabetes"))", R"(cond("asthma"))", R"(cond("coma"))",
                                   R"(cond("multiple sclerosis"))", R"(cond("sleep disorder"))"};
    for (const auto& t : random_criteria(rng, e, schema, 120)) texts.push_back(t);

    codegen::CompileOptions copts;
    copts.dialect = codegen::Dialect::Sqlite;
    copts.today = *date::parse_date(kToday);
    UnionReport report;
    for (const auto& text : texts) {
        const auto node = reason::reason(llf::parse(text, e.catalog()), kb, e.normalizer());
        // Single entity nodes only: the check is about one criterion split across two tables.
        if (!node.computable() || !reason::is_entity_function(node.function()) || !node.source.predicates.empty()) continue;
        std::string sql, a_sql, b_sql;
        try {
            sql = codegen::compile_line(node, full, kb, copts);
            a_sql = codegen::compile_line(node, only_conditions, kb, copts);
            b_sql = codegen::compile_line(node, only_problem_list, kb, copts);
        } catch (const Error&) {
            continue;
        }
        if (sql.find(" UNION ") == std::string::npos) continue;
        ++report.criteria;
        const auto both = db.person_ids(sql);
        const auto a = db.person_ids(a_sql);
        const auto b = db.person_ids(b_sql);
        harness::Cohort expected = a;
        expected.insert(b.begin(), b.end());
        if (both != expected) {
            ++report.mismatches;
            report.failures.push_back(text + ": union " + show(both) + " expected " + show(expected));
        }
        if (both.size() > a.size() && both.size() > b.size()) ++report.strictly_larger;
    }
    return report;
}

PinReport run_pin_check(std::uint64_t seed, std::size_t inject, std::size_t patients) {
    const auto& e = fixture_engine();
    const auto& kb = e.knowledge_base();
    const auto schema = harness::Schema::build(kb);
    const auto pin = *date::parse_date("2019-06-30");
    const auto pin_end = *date::parse_timestamp_minutes(date::end_of_day(pin));
    const auto last = *date::parse_timestamp_minutes("2020-12-31 23:59:00");

    std::mt19937_64 rng(seed);
    harness::GenerateOptions gopts;
    gopts.seed = rng();
    gopts.n_patients = patients;
    auto before = harness::generate_db(gopts, {}, kb, schema).db;
    auto after = before;
    for (std::size_t i = 0; i < inject; ++i) {
        // A copy of an existing record keeps code and category consistent.
        harness::Event ev = before.events[rng() % before.events.size()];
        ev.person_id = before.persons[rng() % before.persons.size()].id;
        ev.minute = pin_end + 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(last - pin_end));
        after.events.push_back(ev);
    }

    std::vector<std::string> texts = random_criteria(rng, e, schema, 80);
    for (const char* t : {R"(not(cond("asthma")))", R"(cond("type 2 diabetes"))",
                          R"(cond("coma").within(cond("cardiac arrest"), val("240"), unit("minutes")))"}) {
        texts.push_back(t);
    }

    PinReport report;
    report.injected = inject;
    for (auto variant : {harness::Variant::Tall, harness::Variant::Pivoted}) {
        const auto smm = harness::make_smm(schema, variant);
        sql::Database db_before, db_after;
        harness::load(db_before, harness::materialize(before, schema, variant));
        harness::load(db_after, harness::materialize(after, schema, variant));
        for (const auto& text : texts) {
            const auto node = reason::reason(llf::parse(text, e.catalog()), kb, e.normalizer());
            if (!node.computable()) continue;
            codegen::CompileOptions pinned;
            pinned.dialect = codegen::Dialect::Sqlite;
            pinned.pin_date = pin;
            codegen::CompileOptions unpinned = pinned;
            unpinned.pin_date.reset();
            unpinned.today = *date::parse_date(kToday);
            std::string p_sql, u_sql;
            try {
                p_sql = codegen::compile_line(node, smm, kb, pinned);
                u_sql = codegen::compile_line(node, smm, kb, unpinned);
            } catch (const Error&) {
                continue;
            }
            ++report.criteria;
            if (db_before.person_ids(p_sql) != db_after.person_ids(p_sql)) {
                ++report.changed_pinned;
                report.failures.push_back(std::string(harness::to_string(variant)) + " " + text);
            }
            if (db_before.person_ids(u_sql) != db_after.person_ids(u_sql)) ++report.changed_unpinned;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Six-line trial

namespace {

std::int64_t minute_of(const char* day, int hour) {
    return static_cast<std::int64_t>(std::chrono::sys_days{*date::parse_date(day)}.time_since_epoch().count()) * 1440 +
           hour * 60;
}

harness::Event event(const kb::KnowledgeBase& kb, const harness::Schema& schema, harness::PersonId pid,
                     const std::string& cui, std::int64_t minute, std::optional<double> value = std::nullopt) {
    const auto& c = kb.at(cui);
    const auto cat = schema.event_concepts.at(cui);
    kb::CodeSystem system = kb::CodeSystem::SNOMED;
    switch (cat) {
        // Alternate the two condition tables by person.
        case harness::Category::Condition:
            system = pid % 2 ? kb::CodeSystem::ICD10 : kb::CodeSystem::SNOMED;
            break;
        case harness::Category::Procedure: system = kb::CodeSystem::SNOMED; break;
        case harness::Category::Drug: system = kb::CodeSystem::RXNORM; break;
        case harness::Category::Measurement: system = kb::CodeSystem::LOINC; break;
    }
    harness::Event e{pid, cui, cat, system, c.codes_in(system).at(0), minute, value, ""};
    if (cat == harness::Category::Measurement) e.unit = schema.labs.at(cui).unit;
    return e;
}

constexpr const char* kT2dm = "C0011860";
constexpr const char* kA1c = "CX0000180";
constexpr const char* kAsthma = "C0004096";
constexpr const char* kMethylpred = "C0025815";

}  // namespace

RecallFixture build_recall_fixture(const kb::KnowledgeBase& kb, const harness::Schema& schema) {
    RecallFixture f;
    f.pin_date = "2020-12-31";
    f.inclusion = {"Type 2 diabetes mellitus", "HbA1c > 6.5", "History of resuscitation", "Age 18 years or older"};
    f.exclusion = {"Asthma", "Treated with methylprednisolone"};
    // gold 1..20: all diabetic; 17-20 have HbA1c 6.1; 15-16 are minors at
    // the pin date; 1-4 have asthma; 5 has asthma only after the pin date;
    // 6-7 took methylprednisolone.
    f.expected_recall = {1.0, 0.8, 0.8, 0.7, 0.5, 0.4};
    std::mt19937_64 rng(20240611);
    for (harness::PersonId id = 1; id <= 60; ++id) {
        std::string birth = "1960-03-15";
        if (id == 15 || id == 16) birth = "2005-06-01";
        if (id > 20) birth = chance(rng, 0.2) ? "2008-01-20" : "1971-09-09";
        f.db.persons.push_back({id, birth, id % 3 ? "F" : "M"});
    }
    auto& ev = f.db.events;
    for (harness::PersonId id = 1; id <= 20; ++id) {
        f.gold.insert(id);
        ev.push_back(event(kb, schema, id, kT2dm, minute_of("2018-04-02", 9)));
        ev.push_back(event(kb, schema, id, kA1c, minute_of("2018-04-02", 10), id >= 17 ? 6.1 : 7.4));
        if (id <= 4) ev.push_back(event(kb, schema, id, kAsthma, minute_of("2019-01-10", 8)));
        if (id == 5) ev.push_back(event(kb, schema, id, kAsthma, minute_of("2021-02-01", 8)));
        if (id == 6 || id == 7) ev.push_back(event(kb, schema, id, kMethylpred, minute_of("2019-05-05", 12)));
    }
    for (harness::PersonId id = 21; id <= 60; ++id) {
        if (chance(rng, 0.6)) ev.push_back(event(kb, schema, id, kT2dm, minute_of("2017-08-08", 9)));
        if (chance(rng, 0.6)) {
            ev.push_back(event(kb, schema, id, kA1c, minute_of("2017-08-08", 11), uniform(rng, 50, 95) / 10.0));
        }
        if (chance(rng, 0.3)) ev.push_back(event(kb, schema, id, kAsthma, minute_of("2016-02-02", 7)));
        if (chance(rng, 0.2)) ev.push_back(event(kb, schema, id, kMethylpred, minute_of("2016-02-03", 7)));
    }
    return f;
}

void write_recall_fixture(const RecallFixture& f, const harness::Schema& schema, const fs::path& dir) {
    fs::create_directories(dir);
    auto write = [](const fs::path& p, const std::string& s) {
        fs::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << s;
    };
    std::string criteria;
    for (const auto& c : f.inclusion) criteria += "INC\t" + c + "\n";
    for (const auto& c : f.exclusion) criteria += "EXC\t" + c + "\n";
    write(dir / "criteria.tsv", criteria);
    std::string gold;
    for (auto id : f.gold) gold += std::to_string(id) + "\n";
    write(dir / "gold.txt", gold);
    std::string curve = "line\trecall\n";
    for (std::size_t i = 0; i < f.expected_recall.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", f.expected_recall[i]);
        curve += std::to_string(i + 1) + "\t" + buf + "\n";
    }
    write(dir / "expected_recall.tsv", curve);
    for (auto v : {harness::Variant::Tall, harness::Variant::Pivoted}) {
        write(dir / harness::to_string(v) / "database.sql",
              harness::to_sql_script(harness::materialize(f.db, schema, v)));
    }
}

}  // namespace cohortc::testing
