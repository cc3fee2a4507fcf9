#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "cohortc/codegen.hpp"
#include "cohortc/engine.hpp"
#include "cohortc/harness.hpp"
#include "support.hpp"

namespace {

namespace ct = cohortc::testing;

using namespace cohortc;
using namespace cohortc::codegen;

const engine::Engine& eng() { return ct::fixture_engine(); }
const kb::KnowledgeBase& kb() { return eng().knowledge_base(); }

const smm::SemanticMetadataMapping& figure_tall() {
    static const auto s = smm::load_smm_file(ct::golden_dir() / "figure_tall.json", &kb());
    return s;
}

const smm::SemanticMetadataMapping& figure_pivoted() {
    static const auto s = smm::load_smm_file(ct::golden_dir() / "figure_pivoted.json", &kb());
    return s;
}

reason::ReasonedNode reasoned(const std::string& lf) {
    return reason::reason(llf::parse(lf, eng().catalog()), kb(), eng().normalizer());
}

// Set COHORTC_UPDATE_GOLDEN=1 to rewrite the files instead of comparing.
void expect_golden(const std::string& name, const std::string& sql) {
    const auto path = ct::golden_dir() / "sql" / (name + ".sql");
    if (std::getenv("COHORTC_UPDATE_GOLDEN")) {
        std::ofstream(path, std::ios::binary) << sql << "\n";
        return;
    }
    EXPECT_EQ(ct::read_file(path), sql + "\n") << name;
}

CompileOptions pinned(Dialect d = Dialect::Ansi) {
    CompileOptions o;
    o.pin_date = date::parse_date("2020-12-31");
    o.dialect = d;
    return o;
}

CompileOptions unpinned() {
    CompileOptions o;
    o.today = date::parse_date(ct::kToday);
    return o;
}

TEST(Smm, LoadsBothStrategies) {
    const auto* labs = figure_tall().find_table("labs");
    ASSERT_NE(labs, nullptr);
    EXPECT_EQ(labs->strategy, smm::Strategy::Tall);
    EXPECT_EQ(labs->code_column->system, kb::CodeSystem::LOINC);
    const auto* cbc = figure_pivoted().find_table("complete_blood_counts");
    ASSERT_NE(cbc, nullptr);
    EXPECT_EQ(cbc->strategy, smm::Strategy::Pivoted);
    EXPECT_TRUE(cbc->columns[0].concepts.contains("C0362994"));
    EXPECT_TRUE(figure_tall().diagnostics.empty());
    EXPECT_EQ(smm::load_smm(smm::to_json(figure_tall())), figure_tall());
}

TEST(Smm, SchemaErrors) {
    auto doc = nlohmann::json::parse(ct::read_file(ct::golden_dir() / "figure_tall.json"));
    auto broken = doc;
    broken["databases"][0]["tables"][0].erase("person_id_column");
    try {
        smm::load_smm(broken);
        FAIL();
    } catch (const smm::SchemaError& e) {
        EXPECT_EQ(e.path(), "$.databases[0].tables[0]");
        EXPECT_NE(std::string(e.what()).find("person_id_column"), std::string::npos) << e.what();
    }
    auto dup = doc;
    dup["databases"][0]["tables"].push_back(dup["databases"][0]["tables"][0]);
    EXPECT_THROW(smm::load_smm(dup), smm::DuplicateTable);
    auto no_code = doc;
    no_code["databases"][0]["tables"][0].erase("code_column");
    EXPECT_THROW(smm::load_smm(no_code), smm::SchemaError);
    auto unknown = doc;
    unknown["databases"][0]["tables"][0]["concepts"].push_back("C9999999");
    EXPECT_EQ(smm::load_smm(unknown, &kb()).diagnostics.size(), 1u);
    EXPECT_THROW(smm::load_smm(std::string_view("{not json")), Error);
}

TEST(Codegen, MapPlatelet) {
    auto n = reasoned(R"(lab("platelet count"))");
    auto tall = map_criterion(n, figure_tall(), kb());
    ASSERT_EQ(tall.size(), 1u);
    EXPECT_EQ(tall[0].table->table_name, "labs");
    EXPECT_EQ(tall[0].codes, (std::vector<std::string>{"777-3"}));
    auto piv = map_criterion(n, figure_pivoted(), kb());
    ASSERT_EQ(piv.size(), 1u);
    EXPECT_EQ(piv[0].table->table_name, "complete_blood_counts");
    ASSERT_NE(piv[0].column, nullptr);
    EXPECT_EQ(piv[0].column->name, "platelet_count");
    EXPECT_TRUE(piv[0].codes.empty());
}

TEST(Codegen, MapTwoTables) {
    auto targets = map_criterion(reasoned(R"(cond("type 2 diabetes"))"), figure_tall(), kb());
    ASSERT_EQ(targets.size(), 2u);
    EXPECT_EQ(targets[0].table->table_name, "diagnoses");
    EXPECT_EQ(targets[1].table->table_name, "problem_list");
    EXPECT_TRUE(std::find(targets[1].codes.begin(), targets[1].codes.end(), "E11.2") != targets[1].codes.end());
}

TEST(Codegen, PlateletTallIsCanonical) {
    EXPECT_EQ(compile_line(reasoned(R"(lab("platelet count"))"), figure_tall(), kb()),
              "SELECT DISTINCT person_id FROM labs WHERE loinc_code = '777-3'");
}

TEST(Codegen, Goldens) {
    struct Case {
        const char* name;
        const char* lf;
        const smm::SemanticMetadataMapping& smm;
        CompileOptions options;
    };
    const std::vector<Case> cases{
        {"platelet_tall", R"(lab("platelet count"))", figure_tall(), {}},
        {"platelet_pivoted", R"(lab("platelet count"))", figure_pivoted(), {}},
        {"platelet_filter_tall", R"(lab("platelet count").num_filter(eq(op(GTEQ), val("100"))))", figure_tall(), {}},
        {"platelet_filter_pivoted", R"(lab("platelet count").num_filter(eq(op(GTEQ), val("100")), eq(op(LT), val("450"))))",
         figure_pivoted(), {}},
        {"platelet_pinned_tall", R"(lab("platelet count"))", figure_tall(), pinned()},
        {"type2_union", R"(cond("type 2 diabetes"))", figure_tall(), {}},
        {"type2_union_pinned", R"(cond("type 2 diabetes"))", figure_tall(), pinned()},
        {"age_pinned", R"(age().num_filter(eq(op(GT), val("65"))))", figure_tall(), pinned()},
        {"age_unpinned", R"(age().num_filter(eq(op(GT), val("65"))))", figure_tall(), unpinned()},
        {"diabetic_women_men", R"(intersect(cond("Diabetic"), union(female(), male()), age().num_filter(eq(op(GT), val("65")))))",
         figure_tall(), pinned()},
        {"not_asthma", R"(not(cond("asthma")))", figure_tall(), {}},
        {"coma_within_arrest", R"(cond("coma").within(cond("cardiac arrest"), val("240"), unit("minutes")))", figure_tall(),
         {}},
        {"coma_within_arrest_sqlite", R"(cond("coma").within(cond("cardiac arrest"), val("240"), unit("minutes")))",
         figure_tall(), pinned(Dialect::Sqlite)},
        {"coma_after_arrest", R"(cond("coma").after(cond("cardiac arrest")))", figure_tall(), {}},
        {"asthma_if_then", R"(cond("asthma").if_then(lab("platelet count").num_filter(eq(op(GT), val("150")))))",
         figure_tall(), {}},
    };
    for (const auto& c : cases) {
        expect_golden(c.name, compile_line(reasoned(c.lf), c.smm, kb(), c.options));
    }
}

TEST(Codegen, PinnedSqlHasNoNowReference) {
    // Age is folded into a birth date cutoff: over 65 on the pin means born on or before 1954-12-31.
    const std::vector<std::pair<const char*, const char*>> cases{
        {R"(age().num_filter(eq(op(GT), val("65"))))", "1954-12-31"}, {R"(cond("type 2 diabetes"))", "2020-12-31"}};
    for (const auto& [lf, date] : cases) {
        for (auto d : {Dialect::Ansi, Dialect::Sqlite}) {
            const std::string sql = compile_line(reasoned(lf), figure_tall(), kb(), pinned(d));
            EXPECT_EQ(sql.find("CURRENT_"), std::string::npos);
            EXPECT_EQ(sql.find("GETDATE"), std::string::npos);
            EXPECT_EQ(sql.find("now"), std::string::npos);
            EXPECT_NE(sql.find(date), std::string::npos) << sql;
        }
    }
}

TEST(Codegen, Errors) {
    EXPECT_THROW(compile_line(reasoned(R"(drug("methylprednisolone"))"), figure_tall(), kb()), NoMappingTarget);
    EXPECT_THROW(compile_line(reasoned(R"(proc("resuscitation"))"), figure_tall(), kb()), Error);
}

llf::Criterion criterion(llf::Polarity p, std::size_t line) {
    llf::Criterion c;
    c.polarity = p;
    c.line_number = line;
    return c;
}

TEST(Codegen, TrialStatuses) {
    std::vector<llf::Criterion> criteria{criterion(llf::Polarity::Inclusion, 1), criterion(llf::Polarity::Inclusion, 2),
                                         criterion(llf::Polarity::Exclusion, 3), criterion(llf::Polarity::Inclusion, 4),
                                         criterion(llf::Polarity::Inclusion, 5)};
    std::vector<std::optional<reason::ReasonedNode>> r{reasoned(R"(cond("type 2 diabetes"))"),
                                                       reasoned(R"(proc("resuscitation"))"),
                                                       reasoned(R"(cond("asthma"))"),
                                                       reasoned(R"(drug("methylprednisolone"))"), std::nullopt};
    auto plan = compile_trial(criteria, r, figure_tall(), kb(), pinned());
    ASSERT_EQ(plan.lines.size(), 5u);
    EXPECT_EQ(plan.lines[0].status, LineStatus::Executed);
    EXPECT_EQ(plan.lines[1].reason, "NonComputable");
    EXPECT_EQ(plan.lines[2].polarity, llf::Polarity::Exclusion);
    EXPECT_EQ(plan.lines[3].reason, "NoMappingTarget");
    EXPECT_EQ(plan.lines[4].reason, "NotTranslatable");
    for (const auto& l : plan.lines) EXPECT_EQ(l.sql.has_value(), l.status == LineStatus::Executed);
    EXPECT_EQ(plan_from_json(to_json(plan)), plan);
    EXPECT_EQ(plan.pin_date, "2020-12-31");
}

TEST(Codegen, AllSkipped) {
    std::vector<llf::Criterion> criteria{criterion(llf::Polarity::Inclusion, 1)};
    std::vector<std::optional<reason::ReasonedNode>> r{reasoned(R"(proc("resuscitation"))")};
    auto plan = compile_trial(criteria, r, figure_tall(), kb());
    ASSERT_EQ(plan.lines.size(), 1u);
    EXPECT_EQ(plan.lines[0].status, LineStatus::Skipped);
    sql::Database db;
    auto result = engine::execute(plan, db, nullptr);
    EXPECT_TRUE(result.cohort.empty());
}

// Two inclusion lines and one exclusion line against a hand-made database,
// with the expected cohort computed by set algebra on the rows.
TEST(Codegen, ToyTrialSetAlgebra) {
    sql::Database db;
    db.exec(
        "CREATE TABLE person (person_id INTEGER, birth_date TEXT, gender TEXT);"
        "CREATE TABLE labs (person_id INTEGER, loinc_code TEXT, value_num REAL, result_datetime TEXT);"
        "CREATE TABLE diagnoses (person_id INTEGER, snomed_code TEXT, diagnosed_at TEXT);"
        "CREATE TABLE problem_list (person_id INTEGER, icd10_code TEXT, noted_at TEXT);");
    // 1: T2DM + platelets 200. 2: T2DM (problem list) + platelets 90.
    // 3: T2DM + platelets 300 + asthma. 4: platelets 250 only. 5: T2DM only.
    db.exec(
        "INSERT INTO person VALUES (1,'1950-01-01','F'),(2,'1960-01-01','M'),(3,'1970-01-01','F'),"
        "(4,'1980-01-01','M'),(5,'1990-01-01','F');"
        "INSERT INTO diagnoses VALUES (1,'44054006','2019-01-01 10:00:00'),(3,'44054006','2019-01-01 10:00:00'),"
        "(5,'44054006','2019-01-01 10:00:00'),(3,'195967001','2019-02-01 10:00:00');"
        "INSERT INTO problem_list VALUES (2,'E11.2','2019-01-01 10:00:00');"
        "INSERT INTO labs VALUES (1,'777-3',200,'2019-03-01 08:00:00'),(2,'777-3',90,'2019-03-01 08:00:00'),"
        "(3,'777-3',300,'2019-03-01 08:00:00'),(4,'777-3',250,'2019-03-01 08:00:00');");
    std::vector<llf::Criterion> criteria{criterion(llf::Polarity::Inclusion, 1), criterion(llf::Polarity::Inclusion, 2),
                                         criterion(llf::Polarity::Exclusion, 3)};
    std::vector<std::optional<reason::ReasonedNode>> r{
        reasoned(R"(cond("type 2 diabetes"))"),
        reasoned(R"(lab("platelet count").num_filter(eq(op(GT), val("100"))))"), reasoned(R"(cond("asthma"))")};
    auto plan = compile_trial(criteria, r, figure_tall(), kb(), pinned(Dialect::Sqlite));
    auto result = engine::execute(plan, db, &figure_tall());
    ASSERT_EQ(result.lines.size(), 3u);
    EXPECT_EQ(result.lines[0].cohort, (std::set<std::int64_t>{1, 2, 3, 5}));
    EXPECT_EQ(result.lines[1].cohort, (std::set<std::int64_t>{1, 3, 4}));
    EXPECT_EQ(result.lines[2].cohort, (std::set<std::int64_t>{3}));
    EXPECT_EQ(result.cohort, (std::set<std::int64_t>{1}));
    EXPECT_EQ(result.universe, (std::set<std::int64_t>{1, 2, 3, 4, 5}));
    EXPECT_EQ(result.lines[0].cumulative_size, 4u);
    EXPECT_EQ(result.lines[1].cumulative_size, 2u);
}

TEST(Codegen, AgeRelativeToPin) {
    sql::Database db;
    db.exec("CREATE TABLE person (person_id INTEGER, birth_date TEXT, gender TEXT);"
            "INSERT INTO person VALUES (1,'1950-06-01','F'),(2,'1960-06-01','M'),(3,'1955-12-31','F'),"
            "(4,'1955-12-30','M');");
    const auto n = reasoned(R"(age().num_filter(eq(op(GTEQ), val("65"))))");
    // On 2020-12-31: 70, 60, exactly 65 that day, and 65 since the day before.
    EXPECT_EQ(db.person_ids(compile_line(n, figure_tall(), kb(), pinned(Dialect::Sqlite))),
              (std::set<std::int64_t>{1, 3, 4}));
    CompileOptions earlier = pinned(Dialect::Sqlite);
    earlier.pin_date = date::parse_date("2020-12-30");
    EXPECT_EQ(db.person_ids(compile_line(n, figure_tall(), kb(), earlier)), (std::set<std::int64_t>{1, 4}));
}

}  // namespace

namespace {

TEST(CodegenSemantics, UnionEqualsSingleTableUnion) {
    auto r = cohortc::testing::run_union_check(5, 400);
    for (const auto& f : r.failures) ADD_FAILURE() << f;
    EXPECT_GE(r.criteria, 5u);
    EXPECT_GE(r.strictly_larger, 1u);
}

TEST(CodegenSemantics, PinIgnoresLaterRecords) {
    auto r = cohortc::testing::run_pin_check(6, 100, 300);
    for (const auto& f : r.failures) ADD_FAILURE() << f;
    EXPECT_EQ(r.changed_pinned, 0u);
    EXPECT_GE(r.changed_unpinned, 1u);
    EXPECT_GE(r.criteria, 40u);
}

}  // namespace
