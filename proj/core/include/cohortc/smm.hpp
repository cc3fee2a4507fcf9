#pragma once

// Semantic metadata mapping: a concept-tagged description of a target
// database schema.

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohortc/error.hpp"
#include "cohortc/kb.hpp"

namespace cohortc::smm {

enum class Strategy { Tall, Pivoted };
enum class ColumnRole { Value, Flag };

const char* to_string(Strategy s);
const char* to_string(ColumnRole r);

struct CodeColumn {
    std::string name;
    kb::CodeSystem system = kb::CodeSystem::SNOMED;
    bool operator==(const CodeColumn&) const = default;
};

struct TaggedColumn {
    std::string name;
    std::set<std::string> concepts;
    ColumnRole role = ColumnRole::Value;
    bool operator==(const TaggedColumn&) const = default;
};

struct TableMapping {
    std::string table_name;
    std::string person_id_column;
    std::optional<std::string> date_column;
    Strategy strategy = Strategy::Tall;
    std::set<std::string> tag_concepts;
    // Tall only.
    std::optional<CodeColumn> code_column;
    std::optional<std::string> value_column;
    // Pivoted only.
    std::vector<TaggedColumn> columns;
    bool operator==(const TableMapping&) const = default;
};

struct GenderColumn {
    std::string name;
    std::string female;
    std::string male;
    bool operator==(const GenderColumn&) const = default;
};

/// The table age() / female() / male() and not(...) are computed from.
struct PersonTable {
    std::string table_name;
    std::string person_id_column;
    std::string birth_date_column;
    GenderColumn gender_column;
    bool operator==(const PersonTable&) const = default;
};

struct SemanticMetadataMapping {
    std::string name;
    std::string database;
    std::optional<PersonTable> person;
    std::vector<TableMapping> tables;
    /// Unresolvable concept tags; not fatal.
    std::vector<std::string> diagnostics;

    const TableMapping* find_table(std::string_view name) const;
    bool operator==(const SemanticMetadataMapping&) const = default;
};

class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what)
        : Error("SchemaError", path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class DuplicateTable : public Error {
public:
    explicit DuplicateTable(const std::string& name)
        : Error("DuplicateTable", "duplicate table '" + name + "'") {}
};

/// Validates the JSON document (schema in docs/formats.md). With a KB, tags
/// that name unknown concepts are reported in `diagnostics`.
SemanticMetadataMapping load_smm(const nlohmann::json& document, const kb::KnowledgeBase* kb = nullptr);
SemanticMetadataMapping load_smm(std::string_view text, const kb::KnowledgeBase* kb = nullptr);
SemanticMetadataMapping load_smm_file(const std::filesystem::path& path, const kb::KnowledgeBase* kb = nullptr);

nlohmann::json to_json(const SemanticMetadataMapping& smm);

}  // namespace cohortc::smm
