#pragma once

// Maps reasoned criteria onto an SMM and emits one SQL statement per
// criteria line.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohortc/date.hpp"
#include "cohortc/kb.hpp"
#include "cohortc/llf.hpp"
#include "cohortc/reasoner.hpp"
#include "cohortc/smm.hpp"

namespace cohortc::codegen {

/// Ansi is the canonical rendering (DATE / TIMESTAMP literals, INTERVAL
/// arithmetic). Sqlite swaps those two constructs for forms the embedded
/// engine executes; everything else is byte-identical.
enum class Dialect { Ansi, Sqlite };

const char* to_string(Dialect d);
std::optional<Dialect> dialect_from_string(std::string_view s);

struct MappingTarget {
    const smm::TableMapping* table = nullptr;
    /// Pivoted targets: the matched column.
    const smm::TaggedColumn* column = nullptr;
    /// Tall targets: sorted codes in the table's code system.
    std::vector<std::string> codes;
    /// Node concepts this target covers.
    std::vector<std::string> concepts;
};

/// Tall tables match through tag subsumption; pivoted columns match when
/// their tags intersect the node's concepts. A tall table whose matched
/// concepts carry no codes in its system is not a target.
std::vector<MappingTarget> map_criterion(const reason::ReasonedNode& node, const smm::SemanticMetadataMapping& smm,
                                         const kb::KnowledgeBase& kb);

struct CompileOptions {
    std::optional<date::Date> pin_date;
    /// Age reference when unpinned; defaults to the current date.
    std::optional<date::Date> today;
    Dialect dialect = Dialect::Ansi;
};

class NoMappingTarget : public Error {
public:
    explicit NoMappingTarget(const std::string& what) : Error("NoMappingTarget", "no mapping target for " + what) {}
};

class UnsupportedFilter : public Error {
public:
    explicit UnsupportedFilter(const std::string& what) : Error("UnsupportedFilter", what) {}
};

struct CompiledLine {
    std::string sql;
    std::vector<std::string> concepts_used;
};

/// SELECT of distinct person ids for one resolved criterion.
CompiledLine compile(const reason::ReasonedNode& node, const smm::SemanticMetadataMapping& smm,
                     const kb::KnowledgeBase& kb, const CompileOptions& options = {});

std::string compile_line(const reason::ReasonedNode& node, const smm::SemanticMetadataMapping& smm,
                         const kb::KnowledgeBase& kb, const CompileOptions& options = {});

enum class LineStatus { Executed, Skipped };

const char* to_string(LineStatus s);

struct PlanLine {
    std::size_t line_number = 1;
    llf::Polarity polarity = llf::Polarity::Inclusion;
    LineStatus status = LineStatus::Skipped;
    std::optional<std::string> sql;
    /// Skipped lines: NonComputable, NoMappingTarget, UnsupportedFilter,
    /// NotTranslatable, MalformedLogicalForm or ZeroResult.
    std::string reason;
    std::string detail;
    std::vector<std::string> concepts_used;
    bool operator==(const PlanLine&) const = default;
};

/// Cohort after line k: intersection of executed inclusion lines up to k
/// minus the union of executed exclusion lines up to k.
struct QueryPlan {
    std::string smm_name;
    std::string dialect = "ansi";
    std::optional<std::string> pin_date;
    std::vector<PlanLine> lines;
    bool operator==(const QueryPlan&) const = default;
};

/// `reasoned[i]` belongs to `criteria[i]`; nullopt marks a line with no
/// logical form.
QueryPlan compile_trial(std::span<const llf::Criterion> criteria,
                        std::span<const std::optional<reason::ReasonedNode>> reasoned,
                        const smm::SemanticMetadataMapping& smm, const kb::KnowledgeBase& kb,
                        const CompileOptions& options = {});

nlohmann::json to_json(const QueryPlan& plan);
QueryPlan plan_from_json(const nlohmann::json& j);

}  // namespace cohortc::codegen
