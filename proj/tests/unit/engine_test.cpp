#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "cohortc/engine.hpp"
#include "support.hpp"

namespace {

namespace ct = cohortc::testing;
namespace fs = std::filesystem;

using namespace cohortc;
using namespace cohortc::engine;

const Engine& eng() { return ct::fixture_engine(); }

fs::path demo() { return ct::data_dir() / "trials" / "recall_demo"; }

QueryRequest demo_request(const std::string& smm) {
    auto r = request_from_criteria_tsv(ct::read_file(demo() / "criteria.tsv"));
    r.smm_name = smm;
    r.pin_date = "2020-12-31";
    return r;
}

TEST(Engine, CriteriaTsv) {
    auto r = request_from_criteria_tsv("# header\nINC\tAsthma\n\nEXC\tComa\nINC\tAge over 65\n");
    EXPECT_EQ(r.inclusion, (std::vector<std::string>{"Asthma", "Age over 65"}));
    EXPECT_EQ(r.exclusion, (std::vector<std::string>{"Coma"}));
    EXPECT_THROW(request_from_criteria_tsv("MAYBE\tAsthma\n"), Error);
}

TEST(Engine, RequestJson) {
    auto r = demo_request("omop_tall");
    r.overrides.push_back({2, "a0", {"C0026769"}, true});
    r.dialect = codegen::Dialect::Ansi;
    auto back = request_from_json(to_json(r));
    EXPECT_EQ(to_json(back), to_json(r));
    EXPECT_THROW(request_from_json(nlohmann::json::parse(R"({"inclusion": []})")), InvalidRequest);
    EXPECT_THROW(request_from_json(nlohmann::json::parse(R"({"smm": "x", "inclusion": [1]})")), InvalidRequest);
    EXPECT_THROW(request_from_json(nlohmann::json::parse(R"({"smm": "x", "input_mode": "psychic"})")), InvalidRequest);
    EXPECT_THROW(request_from_json(nlohmann::json::parse(R"({"smm": "x", "overrides": [{"line": -1}]})")),
                 InvalidRequest);
}

TEST(Engine, DemoTrialLines) {
    auto resp = eng().generate(demo_request("omop_tall"));
    ASSERT_EQ(resp.lines.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(resp.lines[i].line_number, i + 1);
        EXPECT_TRUE(resp.lines[i].augmented_text.has_value());
        // The lexicon has no entry for resuscitation, so the tagger finds nothing to translate.
        EXPECT_EQ(resp.lines[i].logical_form.has_value(), i != 2) << resp.lines[i].raw_text;
    }
    EXPECT_EQ(resp.lines[4].polarity, llf::Polarity::Exclusion);
    EXPECT_EQ(resp.lines[2].status, codegen::LineStatus::Skipped);
    EXPECT_EQ(resp.lines[2].reason, "NotTranslatable");
    EXPECT_FALSE(resp.lines[2].detail.empty());
    for (std::size_t i : {0u, 1u, 3u, 4u, 5u}) EXPECT_EQ(resp.lines[i].status, codegen::LineStatus::Executed) << i;
    EXPECT_EQ(resp.plan.pin_date, "2020-12-31");
    EXPECT_EQ(resp.plan.dialect, "sqlite");
    EXPECT_EQ(resp.plan_id, plan_id(resp.plan));
    EXPECT_EQ(resp.plan_id.size(), 16u);
    EXPECT_FALSE(resp.timing_ms.has_value());
}

TEST(Engine, ResponsesRepeat) {
    const auto a = to_json(eng().generate(demo_request("omop_pivoted"))).dump();
    const auto b = to_json(eng().generate(demo_request("omop_pivoted"))).dump();
    EXPECT_EQ(a, b);
    auto timed = demo_request("omop_pivoted");
    timed.timing = true;
    auto t = eng().generate(timed);
    ASSERT_TRUE(t.timing_ms.has_value());
    EXPECT_EQ(t.timing_ms->size(), 3u);
    EXPECT_TRUE(t.timing_ms->contains("compile"));
}

TEST(Engine, ExecuteDemoCurveBothVariants) {
    const auto gold = harness::read_cohort_file(demo() / "gold.txt");
    for (const char* v : {"tall", "pivoted"}) {
        auto resp = eng().generate(demo_request(std::string("omop_") + v));
        auto db = open_database(demo() / v);
        auto result = eng().execute(resp.plan, db);
        std::vector<harness::LineCohort> lines;
        for (const auto& l : result.lines) {
            lines.push_back({l.line_number, l.polarity, l.status == codegen::LineStatus::Executed, l.cohort});
        }
        auto curve = harness::recall_curve(lines, gold, result.universe);
        EXPECT_EQ(harness::to_tsv(curve), ct::read_file(demo() / "expected_recall.tsv")) << v;
    }
}

TEST(Engine, LogicalFormInput) {
    QueryRequest r;
    r.input_mode = InputMode::LogicalForm;
    r.smm_name = "omop_tall";
    r.inclusion = {R"(cond("asthma"))"};
    r.exclusion = {R"(lab("platelet count").num_filter(eq(op(LT), val("100"))))"};
    auto resp = eng().generate(r);
    ASSERT_EQ(resp.lines.size(), 2u);
    EXPECT_FALSE(resp.lines[0].augmented_text.has_value());
    EXPECT_EQ(resp.lines[1].status, codegen::LineStatus::Executed);

    r.exclusion = {R"(cond("asthma"), )"};
    try {
        eng().generate(r);
        FAIL();
    } catch (const MalformedLogicalForm& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.position(), 14u);
    }
}

TEST(Engine, AugmentedInput) {
    QueryRequest r;
    r.input_mode = InputMode::Augmented;
    r.smm_name = "omop_tall";
    r.inclusion = {R"(cond("Diabetic") female() and male() over age() eq(op(GT), val("65")))"};
    auto resp = eng().generate(r);
    ASSERT_EQ(resp.lines.size(), 1u);
    EXPECT_EQ(*resp.lines[0].logical_form,
              R"(intersect(cond("Diabetic"), union(female(), male()), age().num_filter(eq(op(GT), val("65")))))");
    EXPECT_EQ(resp.lines[0].status, codegen::LineStatus::Executed);
}

TEST(Engine, NormalizationFailureSkipsLine) {
    QueryRequest r;
    r.input_mode = InputMode::LogicalForm;
    r.smm_name = "omop_tall";
    r.inclusion = {R"(cond("asthma"))", R"(proc("resuscitation"))"};
    auto resp = eng().generate(r);
    EXPECT_EQ(resp.lines[1].status, codegen::LineStatus::Skipped);
    EXPECT_EQ(resp.lines[1].reason, "NonComputable");
    EXPECT_EQ(resp.lines[1].explanation["label"], "skipped: normalization failure");
    EXPECT_FALSE(resp.plan.lines[1].sql.has_value());
}

TEST(Engine, NotTranslatableLine) {
    QueryRequest r;
    r.smm_name = "omop_tall";
    r.inclusion = {"Willing to give informed consent"};
    auto resp = eng().generate(r);
    EXPECT_EQ(resp.lines[0].reason, "NotTranslatable");
    EXPECT_TRUE(resp.lines[0].explanation.is_null());
}

TEST(Engine, Overrides) {
    QueryRequest r;
    r.input_mode = InputMode::LogicalForm;
    r.smm_name = "omop_tall";
    r.inclusion = {R"(intersect(cond("multiple sclerosis"), female()))", R"(proc("resuscitation"))"};
    auto before = eng().generate(r);
    EXPECT_EQ(before.lines[1].reason, "NonComputable");
    r.overrides = {{1, "a0", {"C0026769"}, false}, {2, "", {"CX0000123"}, false}};
    auto after = eng().generate(r);
    EXPECT_NE(after.plan_id, before.plan_id);
    EXPECT_LT(after.lines[0].sql->size(), before.lines[0].sql->size());
    EXPECT_EQ(after.lines[1].status, codegen::LineStatus::Executed) << after.lines[1].detail;
    r.overrides = {{1, "a7", {"C0026769"}, false}};
    EXPECT_THROW(eng().generate(r), Error);
    r.overrides = {{9, "", {"C0026769"}, false}};
    EXPECT_THROW(eng().generate(r), InvalidRequest);
}

TEST(Engine, UnknownSmm) {
    QueryRequest r;
    r.smm_name = "nope";
    r.inclusion = {"Asthma"};
    EXPECT_THROW(eng().generate(r), UnknownSmm);
}

TEST(Engine, SkipZero) {
    QueryRequest r;
    r.input_mode = InputMode::LogicalForm;
    r.smm_name = "omop_tall";
    r.pin_date = "2020-12-31";
    // Nobody in the demo is both under 18 and over 65.
    r.inclusion = {R"(age().num_filter(eq(op(LT), val("18"))))", R"(age().num_filter(eq(op(GT), val("65"))))"};
    auto resp = eng().generate(r);
    auto db = open_database(demo() / "tall");
    auto plain = eng().execute(resp.plan, db);
    EXPECT_TRUE(plain.cohort.empty());
    ExecuteOptions o;
    o.skip_zero = true;
    auto skipped = eng().execute(resp.plan, db, o);
    ASSERT_EQ(skipped.lines.size(), 2u);
    EXPECT_EQ(skipped.lines[1].status, codegen::LineStatus::Skipped);
    EXPECT_EQ(skipped.lines[1].reason, "ZeroResult");
    EXPECT_EQ(skipped.cohort, skipped.lines[0].cohort);
    EXPECT_FALSE(skipped.cohort.empty());
}

TEST(Engine, ExecutionErrors) {
    codegen::QueryPlan plan;
    plan.smm_name = "omop_tall";
    codegen::PlanLine line;
    line.status = codegen::LineStatus::Executed;
    line.sql = "SELECT person_id FROM no_such_table";
    plan.lines.push_back(line);
    sql::Database db;
    EXPECT_THROW(eng().execute(plan, db), ExecutionError);
}

TEST(Engine, Config) {
    const auto tmp = fs::temp_directory_path() / "cohortc_config_test";
    fs::create_directories(tmp);
    std::ofstream(tmp / "c.json") << R"({"data_dir": "d", "port": 9000, "databases": {"x": "x.sql"}})";
    auto c = load_config(tmp / "c.json");
    EXPECT_EQ(c.data_dir, tmp / "d");
    EXPECT_EQ(c.resolve("x.sql"), tmp / "d" / "x.sql");
    EXPECT_EQ(c.resolve("/abs/y"), fs::path("/abs/y"));
    ::setenv("COHORTC_PORT", "9123", 1);
    EXPECT_EQ(load_config(tmp / "c.json").port, 9123);
    ::unsetenv("COHORTC_PORT");
    EXPECT_EQ(load_config(tmp / "c.json").port, 9000);
    std::ofstream(tmp / "bad.json") << R"({"port": "high"})";
    EXPECT_THROW(load_config(tmp / "bad.json"), Error);
    fs::remove_all(tmp);

    auto shipped = load_config(ct::data_dir() / "config.json");
    EXPECT_EQ(shipped.databases.size(), 2u);
    EXPECT_TRUE(fs::exists(shipped.resolve(shipped.databases.at("recall_demo_tall")) / "database.sql"));
}

TEST(Engine, OpenDatabaseForms) {
    auto dir = open_database(demo() / "tall");
    auto script = open_database(demo() / "tall" / "database.sql");
    const char* q = "SELECT person_id FROM person";
    EXPECT_EQ(dir.person_ids(q), script.person_ids(q));
    EXPECT_EQ(dir.person_ids(q).size(), 60u);
    EXPECT_THROW(open_database(demo() / "missing"), Error);
}

}  // namespace
