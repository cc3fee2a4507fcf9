#include <gtest/gtest.h>

#include "cohortc/reasoner.hpp"
#include "support.hpp"

namespace {

namespace ct = cohortc::testing;

using namespace cohortc;
using namespace cohortc::reason;

ReasonedNode run(const std::string& text, const Observer& obs = {}) {
    const auto& e = ct::fixture_engine();
    return reason::reason(llf::parse(text, e.catalog()), e.knowledge_base(), e.normalizer(), obs);
}

constexpr const char* kRespiratory = R"(cond().contraindication(drug(cond(obs("respiratory function")))))";

TEST(Reasoner, NamedConditionExpands) {
    auto n = run(R"(cond("type 2 diabetes"))");
    EXPECT_EQ(n.status, Status::Resolved);
    EXPECT_TRUE(n.concepts.contains("C0011860"));
    EXPECT_TRUE(n.concepts.contains("C2874072"));
    EXPECT_FALSE(n.concepts.contains("CX0000188"));  // the test strip homonym
}

TEST(Reasoner, ExpansionContainsDirectHits) {
    const auto& e = ct::fixture_engine();
    for (const char* text : {"diabetes", "asthma", "sleep disorder", "multiple sclerosis", "covid-19 infection"}) {
        auto n = run(std::string("cond(\"") + text + "\")");
        for (const auto& hit : e.normalizer().normalize(text, norm::allowed_semantic_types("cond"))) {
            EXPECT_TRUE(n.concepts.contains(hit.cui)) << text;
        }
    }
}

TEST(Reasoner, RespiratoryChain) {
    auto n = run(kRespiratory);
    ASSERT_EQ(n.status, Status::Resolved) << n.reason;
    ASSERT_TRUE(n.concepts.contains("C0026946"));
    auto path = n.concepts.path_to("C0026946");
    ASSERT_EQ(path.size(), 3u);
    EXPECT_EQ(path[0].subject, "C0004096");
    EXPECT_EQ(path[1].subject, "C0025815");
    EXPECT_EQ(path[2].subject, "C0026946");
    const std::string explanation = explain(n, ct::fixture_engine().knowledge_base()).dump();
    EXPECT_NE(explanation.find("C0004096 affects CX0000002"), std::string::npos) << explanation;
    EXPECT_NE(explanation.find("C0025815 treats C0004096"), std::string::npos);
    EXPECT_NE(explanation.find("C0026946 contraindicated_with C0025815"), std::string::npos);
}

TEST(Reasoner, ResuscitationNonComputable) {
    auto n = run(R"(proc("resuscitation"))");
    EXPECT_EQ(n.status, Status::NonComputable);
    auto j = explain(n, ct::fixture_engine().knowledge_base());
    EXPECT_EQ(j["label"], "skipped: normalization failure");
    EXPECT_TRUE(j["concepts"].empty());
}

TEST(Reasoner, LabFilters) {
    auto n = run(R"(lab("platelet count").num_filter(eq(op(GTEQ), val("100")), eq(op(LT), val("450.5"))))");
    ASSERT_EQ(n.status, Status::Resolved);
    EXPECT_TRUE(n.concepts.contains("C0362994"));
    ASSERT_EQ(n.numeric.size(), 2u);
    EXPECT_EQ(n.numeric[0], (NumericFilter{CompareOp::GTEQ, 100, "100", std::nullopt}));
    EXPECT_EQ(n.numeric[1].value, 450.5);
    EXPECT_EQ(run(R"(lab("platelet count").num_filter(eq(op(GT), val("lots"))))").status, Status::NonComputable);
}

TEST(Reasoner, TemporalWindow) {
    auto n = run(R"(cond("coma").within(cond("cardiac arrest"), val("240"), unit("minutes")))");
    ASSERT_EQ(n.status, Status::Resolved);
    ASSERT_EQ(n.temporal.size(), 1u);
    EXPECT_EQ(n.temporal[0].direction, Direction::Within);
    EXPECT_EQ(n.temporal[0].window, (Window{240, "minutes"}));
    ASSERT_EQ(n.children.size(), 1u);
    EXPECT_TRUE(n.children[0].concepts.contains("C0018790"));
    EXPECT_EQ(run(R"(cond("coma").within(cond("cardiac arrest"), val("2"), unit("fortnights")))").status,
              Status::NonComputable);
}

TEST(Reasoner, StatusAlgebra) {
    EXPECT_EQ(run(R"(union(proc("resuscitation"), cond("asthma")))").status, Status::Structural);
    EXPECT_EQ(run(R"(intersect(proc("resuscitation"), cond("asthma")))").status, Status::NonComputable);
    EXPECT_EQ(run(R"(not(proc("resuscitation")))").status, Status::NonComputable);
    EXPECT_EQ(run(R"(intersect(cond("asthma"), female()))").status, Status::Structural);
    auto n = run(R"(intersect(cond("asthma"), female()))");
    EXPECT_TRUE(n.concepts.empty());
}

TEST(Reasoner, InsideToOutsideOrder) {
    std::vector<std::string> order;
    auto root = run(R"(intersect(cond("asthma"), union(female(), male()), drug(cond("asthma"))))",
                    [&](const ReasonedNode& n) { order.push_back(llf::to_string(n.path)); });
    // Each node is observed after every node below it.
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            const bool j_below_i = order[j].size() > order[i].size() && order[j].rfind(order[i], 0) == 0 &&
                                   (order[i].empty() || order[j][order[i].size()] == '.');
            EXPECT_FALSE(j_below_i || (order[i].empty() && !order[j].empty())) << order[i] << " before " << order[j];
        }
    }
    EXPECT_EQ(order.back(), "");
    EXPECT_EQ(order.size(), 7u);
}

TEST(Reasoner, Override) {
    auto n = run(R"(intersect(cond("multiple sclerosis"), female()))");
    ASSERT_EQ(n.children[0].concepts.size(), 11u);
    kb::ConceptSet one;
    one.add("C0026769", "user");
    auto o = apply_override(n, *llf::parse_path("a0"), one);
    EXPECT_EQ(o.children[0].concepts.members(), (std::set<std::string>{"C0026769"}));
    EXPECT_EQ(o.children[1], n.children[1]);
    EXPECT_EQ(n.children[0].concepts.size(), 11u);  // original untouched

    auto emptied = apply_override(n, *llf::parse_path("a0"), {});
    EXPECT_EQ(emptied.children[0].status, Status::NonComputable);
    EXPECT_EQ(emptied.status, Status::NonComputable);

    auto expanded = apply_override(n, *llf::parse_path("a0"), one, &ct::fixture_engine().knowledge_base());
    EXPECT_EQ(expanded.children[0].concepts.size(), 11u);

    EXPECT_THROW(apply_override(n, *llf::parse_path("a1"), one), InvalidPath);
    EXPECT_THROW(apply_override(n, *llf::parse_path("a5"), one), InvalidPath);
}

TEST(Reasoner, OverrideRestoresSkippedLine) {
    auto n = run(R"(intersect(proc("resuscitation"), female()))");
    ASSERT_EQ(n.status, Status::NonComputable);
    kb::ConceptSet cpr;
    cpr.add("CX0000123", "user");
    auto o = apply_override(n, *llf::parse_path("a0"), cpr);
    EXPECT_EQ(o.children[0].status, Status::Resolved);
    EXPECT_EQ(o.status, Status::Structural);
}

TEST(Reasoner, ExplainListsCodes) {
    auto n = run(R"(cond("type 2 diabetes"))");
    auto j = explain(n, ct::fixture_engine().knowledge_base());
    EXPECT_EQ(j["status"], "Resolved");
    EXPECT_EQ(j["concepts"].size(), n.concepts.size());
    bool found = false;
    for (const auto& c : j["concepts"]) {
        if (c["cui"] == "C2874072") {
            found = true;
            EXPECT_NE(c["codes"].dump().find("ICD10:E11.2"), std::string::npos);
        }
    }
    EXPECT_TRUE(found);
}

}  // namespace
