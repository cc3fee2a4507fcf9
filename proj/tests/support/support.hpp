#pragma once

// Shared test fixtures and independent generators.

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cohortc/engine.hpp"
#include "cohortc/harness.hpp"
#include "cohortc/kb.hpp"
#include "cohortc/llf.hpp"

namespace cohortc::llf {

/// Readable assertion output.
inline void PrintTo(const LfNode& n, std::ostream* os) { *os << serialize(n); }

}  // namespace cohortc::llf

namespace cohortc::testing {

std::filesystem::path data_dir();
std::filesystem::path golden_dir();

/// Engine over the shipped fixture KB, lexicon and SMMs; built once.
const engine::Engine& fixture_engine();

/// Fixed age reference so that age cutoffs never depend on the wall clock.
inline const char* kToday = "2021-01-01";

// ---------------------------------------------------------------------------
// Logical forms

struct AstOptions {
    int max_depth = 4;
    bool safe_spans = false;  // letters, digits and spaces only
};

std::string random_span(std::mt19937_64& rng, bool safe);

/// Catalog-conformant random tree with span indices assigned.
llf::LfNode random_ast(std::mt19937_64& rng, const AstOptions& options = {});

// ---------------------------------------------------------------------------
// Isa DAGs

struct Dag {
    std::size_t n = 0;
    std::vector<std::pair<std::size_t, std::size_t>> child_parent;
};

Dag random_dag(std::mt19937_64& rng, std::size_t n);
std::string dag_cui(std::size_t i);
kb::KnowledgeBase kb_from_dag(const Dag& dag);
/// Reflexive closure over reversed edges by plain breadth-first search.
std::set<std::size_t> bfs_descendants(const Dag& dag, std::size_t root);

// ---------------------------------------------------------------------------
// Randomized criteria over the fixture vocabulary

/// Random logical form over phrases whose concepts events can carry.
class CriterionGenerator {
public:
    CriterionGenerator(const engine::Engine& engine, const harness::Schema& schema);
    std::string next(std::mt19937_64& rng);

private:
    std::string entity(std::mt19937_64& rng, int depth);
    std::string expr(std::mt19937_64& rng, int depth);

    std::vector<std::string> conditions_, procedures_, drugs_, labs_;
};

// ---------------------------------------------------------------------------
// Compiled SQL against the oracle

struct EquivalenceOptions {
    std::uint64_t seed = 7;
    std::size_t databases = 3;
    std::size_t criteria_per_database = 90;
    std::size_t patients = 1000;
    /// Criteria planted into each database so that cohorts are not trivially empty.
    std::size_t plants_per_database = 12;
    std::size_t plant_count = 40;
};

struct EquivalenceReport {
    /// Criteria compiled and executed on both variants.
    std::size_t pairs = 0;
    std::size_t nonempty = 0;
    /// Non-computable or unmappable on both variants.
    std::size_t skipped = 0;
    std::size_t mismatches = 0;
    std::vector<std::string> failures;
};

/// Every other criterion is compiled with a pin date. A criterion counts as
/// a mismatch when tall SQL, pivoted SQL and the oracle disagree, or when
/// only one variant can compile it.
EquivalenceReport run_equivalence(const EquivalenceOptions& options);

// ---------------------------------------------------------------------------
// Two-table UNION and pin-date soundness

struct UnionReport {
    /// Criteria whose tall SQL is a UNION over both condition tables.
    std::size_t criteria = 0;
    std::size_t mismatches = 0;
    /// Criteria where the union is strictly larger than either table alone.
    std::size_t strictly_larger = 0;
    std::vector<std::string> failures;
};

/// Compiles condition criteria against the tall SMM and against two copies
/// holding one condition table each, and compares the cohorts.
UnionReport run_union_check(std::uint64_t seed, std::size_t patients = 1000);

struct PinReport {
    std::size_t criteria = 0;
    std::size_t injected = 0;
    /// Pinned cohorts that moved after the injection; must stay 0.
    std::size_t changed_pinned = 0;
    /// Unpinned cohorts that moved; shows the injected records matter.
    std::size_t changed_unpinned = 0;
    std::vector<std::string> failures;
};

/// Runs criteria on both variants before and after adding `inject` records
/// dated after the pin.
PinReport run_pin_check(std::uint64_t seed, std::size_t inject = 100, std::size_t patients = 1000);

// ---------------------------------------------------------------------------
// Six-line longitudinal trial

struct RecallFixture {
    harness::SyntheticDb db;
    harness::Cohort gold;
    std::vector<std::string> inclusion;
    std::vector<std::string> exclusion;
    std::string pin_date;
    /// Recall after each line, fixed by construction.
    std::vector<double> expected_recall;
};

RecallFixture build_recall_fixture(const kb::KnowledgeBase& kb, const harness::Schema& schema);

/// Writes criteria.tsv, gold.txt, expected_recall.tsv and one
/// `<variant>/database.sql` per SMM variant.
void write_recall_fixture(const RecallFixture& f, const harness::Schema& schema, const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& p);

}  // namespace cohortc::testing
