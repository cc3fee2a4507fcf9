#pragma once

// Synthetic OMOP-lite databases with plantable cohorts, a SQL-free oracle
// evaluator and the per-line recall analysis.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cohortc/date.hpp"
#include "cohortc/kb.hpp"
#include "cohortc/llf.hpp"
#include "cohortc/normalizer.hpp"
#include "cohortc/reasoner.hpp"
#include "cohortc/smm.hpp"
#include "cohortc/sqlite.hpp"

namespace cohortc::harness {

using PersonId = std::int64_t;
using Cohort = std::set<PersonId>;

enum class Category { Condition, Procedure, Drug, Measurement };

struct Person {
    PersonId id = 0;
    std::string birth_date;  // YYYY-MM-DD
    std::string gender;      // "F" or "M"
    bool operator==(const Person&) const = default;
};

/// One coded clinical record; the tall source of truth.
struct Event {
    PersonId person_id = 0;
    std::string cui;
    Category category = Category::Condition;
    kb::CodeSystem system = kb::CodeSystem::SNOMED;
    std::string code;
    std::int64_t minute = 0;  // minutes since the epoch
    std::optional<double> value;
    std::string unit;
    bool operator==(const Event&) const = default;
};

struct SyntheticDb {
    std::vector<Person> persons;
    std::vector<Event> events;
    bool operator==(const SyntheticDb&) const = default;
};

struct LabInfo {
    std::string column;
    std::string table;
    int lo_tenths = 0;
    int hi_tenths = 1000;
    std::string unit;
};

/// Table layout shared by both database variants, derived from the KB.
struct Schema {
    std::string disease_root = "C0012634";
    std::string finding_root = "C0243095";
    std::string procedure_root = "C0087111";
    std::string drug_root = "C0013227";
    std::string lab_root = "C0022885";

    /// Coded concepts events may be drawn from, with their category.
    std::map<std::string, Category> event_concepts;
    /// Pivoted condition_flags column per condition concept.
    std::map<std::string, std::string> flag_columns;
    /// Pivoted value column per lab concept.
    std::map<std::string, LabInfo> labs;

    static Schema build(const kb::KnowledgeBase& kb);
};

enum class Variant { Tall, Pivoted };

const char* to_string(Variant v);

smm::SemanticMetadataMapping make_smm(const Schema& schema, Variant variant);

struct ColumnDef {
    std::string name;
    std::string type;  // INTEGER, REAL or TEXT
};

struct TableData {
    std::string name;
    std::vector<ColumnDef> columns;
    std::vector<std::vector<sql::Value>> rows;
    std::vector<std::string> indexed;
};

/// Rows of every table of one variant; pivoted rows are derived from the
/// tall events one-to-one.
std::vector<TableData> materialize(const SyntheticDb& db, const Schema& schema, Variant variant);

/// Portable DDL + INSERT script.
std::string to_sql_script(const std::vector<TableData>& tables);
/// One `<table>.tsv` per table, with a header row.
void write_tsv(const std::vector<TableData>& tables, const std::filesystem::path& dir);
void load(sql::Database& target, const std::vector<TableData>& tables);

class InfeasiblePlant : public Error {
public:
    explicit InfeasiblePlant(const std::string& what) : Error("InfeasiblePlant", what) {}
};

struct Plant {
    reason::ReasonedNode node;
    std::size_t count = 0;
};

/// `count<TAB>logical form` rows; `#` comments and blank lines skipped.
/// Each form is parsed, validated and reasoned.
std::vector<Plant> parse_plants(std::string_view text, const llf::FunctionCatalog& catalog,
                                const kb::KnowledgeBase& kb, const norm::Normalizer& normalizer);

struct GenerateOptions {
    std::uint64_t seed = 1;
    std::size_t n_patients = 1000;
    /// Age reference used when planting age constraints.
    date::Date reference = date::Date{std::chrono::year{2020}, std::chrono::month{12}, std::chrono::day{31}};
    /// Background and planted events fall in [first_day, last_day].
    date::Date first_day = date::Date{std::chrono::year{2015}, std::chrono::month{1}, std::chrono::day{1}};
    date::Date last_day = date::Date{std::chrono::year{2020}, std::chrono::month{6}, std::chrono::day{30}};
    std::size_t mean_events = 12;
};

struct GeneratedDb {
    SyntheticDb db;
    /// Person ids chosen for each plant, in plant order.
    std::vector<Cohort> planted;
};

GeneratedDb generate_db(const GenerateOptions& options, std::span<const Plant> plants, const kb::KnowledgeBase& kb,
                        const Schema& schema);

struct OracleOptions {
    std::optional<date::Date> pin_date;
    /// Age reference when unpinned.
    date::Date today = date::today();
};

/// Direct set evaluation over tall events: entity nodes match events whose
/// code belongs to any of the node's concepts.
Cohort oracle_eval(const reason::ReasonedNode& node, const SyntheticDb& db, const kb::KnowledgeBase& kb,
                   const OracleOptions& options);

// ---------------------------------------------------------------------------
// Longitudinal recall

struct LineCohort {
    std::size_t line_number = 0;
    llf::Polarity polarity = llf::Polarity::Inclusion;
    bool executed = false;
    Cohort cohort;
};

struct CurvePoint {
    std::size_t line_number = 0;
    bool executed = false;
    std::size_t cohort_size = 0;
    double recall = 0;
    bool operator==(const CurvePoint&) const = default;
};

struct RecallCurve {
    std::vector<CurvePoint> points;
    Cohort gold;
};

class EmptyGold : public Error {
public:
    EmptyGold() : Error("EmptyGold", "gold set is empty") {}
};

/// Cumulative cohort after each line. Until an inclusion line executes the
/// running cohort is `universe`; skipped lines carry the previous cohort.
std::vector<Cohort> cumulative_cohorts(std::span<const LineCohort> lines, const Cohort& universe);

RecallCurve recall_curve(std::span<const LineCohort> lines, const Cohort& gold, const Cohort& universe);

/// `line<TAB>recall` rows with a header.
std::string to_tsv(const RecallCurve& curve);

Cohort read_cohort_file(const std::filesystem::path& path);

}  // namespace cohortc::harness
