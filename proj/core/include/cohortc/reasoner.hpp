#pragma once

// Inside-to-outside resolution of a logical form into concept sets, filters
// and computability statuses.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohortc/kb.hpp"
#include "cohortc/llf.hpp"
#include "cohortc/normalizer.hpp"

namespace cohortc::reason {

enum class Status { Resolved, NonComputable, Structural };

const char* to_string(Status s);

enum class CompareOp { GT, GTEQ, LT, LTEQ, EQ, NEQ };

const char* to_string(CompareOp op);
std::optional<CompareOp> compare_op_from_string(std::string_view s);
const char* sql_operator(CompareOp op);
bool compare(double lhs, CompareOp op, double rhs);

struct NumericFilter {
    CompareOp op = CompareOp::EQ;
    double value = 0;
    std::string value_text;  // decimal literal as written
    std::optional<std::string> unit;
    bool operator==(const NumericFilter&) const = default;
};

enum class Direction { Before, After, Within };

const char* to_string(Direction d);

struct Window {
    double value = 0;
    std::string unit;  // minutes, hours, days or weeks
    bool operator==(const Window&) const = default;
};

/// The owning node's events relative to the events of `children[anchor]`.
struct TemporalFilter {
    Direction direction = Direction::After;
    std::size_t anchor = 0;
    std::optional<Window> window;
    bool operator==(const TemporalFilter&) const = default;
};

/// if_then: a patient matching the owning node must also match
/// `children[consequent]`; patients not matching the owner pass.
struct ConditionalFilter {
    std::size_t consequent = 0;
    bool operator==(const ConditionalFilter&) const = default;
};

struct ReasonedNode {
    llf::LfNode source;
    /// Address of `source` within the criterion's logical form.
    llf::NodePath path;
    kb::ConceptSet concepts;
    Status status = Status::Resolved;
    /// Why the node is NonComputable; empty otherwise.
    std::string reason;
    std::vector<ReasonedNode> children;
    std::vector<NumericFilter> numeric;
    std::vector<TemporalFilter> temporal;
    std::vector<ConditionalFilter> conditional;

    const std::string& function() const { return source.name; }
    const std::string* text() const { return source.quoted_value(); }
    bool computable() const { return status != Status::NonComputable; }

    bool operator==(const ReasonedNode&) const = default;
};

bool is_entity_function(std::string_view f);
bool is_structural_function(std::string_view f);
bool is_demographic_function(std::string_view f);

/// Called once per node, after all nodes it depends on have been resolved.
using Observer = std::function<void(const ReasonedNode&)>;

ReasonedNode reason(const llf::LfNode& root, const kb::KnowledgeBase& kb,
                    const norm::Normalizer& normalizer, const Observer& observer = {});

/// Copy of `root` in which the node at `path` carries `concepts`. With
/// `expand`, each override concept is replaced by its descendants.
ReasonedNode apply_override(const ReasonedNode& root, const llf::NodePath& path,
                            const kb::ConceptSet& concepts, const kb::KnowledgeBase* expand_with = nullptr);

class InvalidPath : public Error {
public:
    explicit InvalidPath(const std::string& path)
        : Error("InvalidPath", "no entity node at path '" + path + "'") {}
};

const ReasonedNode* find_reasoned(const ReasonedNode& root, const llf::NodePath& path);

/// Structured explanation: one object per reasoned node with its source
/// text, status, concepts (names, codes, derivations) and filters. The
/// schema is documented in docs/formats.md.
nlohmann::json explain(const ReasonedNode& node, const kb::KnowledgeBase& kb);

}  // namespace cohortc::reason
