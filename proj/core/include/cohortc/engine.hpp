#pragma once

// End-to-end orchestration: criteria text in, per-line explanations, SQL
// and a query plan out; plus plan execution against an embedded database.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohortc/codegen.hpp"
#include "cohortc/kb.hpp"
#include "cohortc/llf.hpp"
#include "cohortc/normalizer.hpp"
#include "cohortc/smm.hpp"
#include "cohortc/sqlite.hpp"

namespace cohortc::engine {

enum class InputMode { RawText, Augmented, LogicalForm };

const char* to_string(InputMode m);  // "raw", "augmented", "logical_form"
std::optional<InputMode> input_mode_from_string(std::string_view s);

struct Override {
    std::size_t line = 1;
    std::string path;  // NodePath rendering, "" for the root
    std::vector<std::string> concepts;
    /// Replace each concept by its descendants instead of using it verbatim.
    bool expand = false;
};

struct QueryRequest {
    std::vector<std::string> inclusion;
    std::vector<std::string> exclusion;
    InputMode input_mode = InputMode::RawText;
    std::string smm_name;
    std::optional<std::string> pin_date;
    std::vector<Override> overrides;
    /// SQL flavour of the returned plan; sqlite runs on the bundled engine.
    codegen::Dialect dialect = codegen::Dialect::Sqlite;
    /// Age reference when unpinned; defaults to the current date.
    std::optional<std::string> today;
    /// Adds per-stage timings, which makes responses non-repeatable.
    bool timing = false;
};

class InvalidRequest : public Error {
public:
    explicit InvalidRequest(const std::string& what) : Error("InvalidRequest", what) {}
};

class UnknownSmm : public Error {
public:
    explicit UnknownSmm(const std::string& name) : Error("UnknownSmm", "no SMM named '" + name + "'") {}
};

class MalformedLogicalForm : public Error {
public:
    MalformedLogicalForm(std::size_t line, std::size_t position, const std::string& what)
        : Error("MalformedLogicalForm", "line " + std::to_string(line) + ": " + what), line_(line), position_(position) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t line_;
    std::size_t position_;
};

/// Reads the request document; throws InvalidRequest on schema violations.
QueryRequest request_from_json(const nlohmann::json& j);
nlohmann::json to_json(const QueryRequest& r);

/// `INC<TAB>text` / `EXC<TAB>text` rows; `#` comments and blank lines are
/// skipped. Only the criteria fields are filled in.
QueryRequest request_from_criteria_tsv(std::string_view text);

struct ResponseLine {
    std::size_t line_number = 1;
    llf::Polarity polarity = llf::Polarity::Inclusion;
    std::string raw_text;
    std::optional<std::string> augmented_text;
    std::optional<std::string> logical_form;
    codegen::LineStatus status = codegen::LineStatus::Skipped;
    std::string reason;
    std::string detail;
    nlohmann::json explanation;  // null when there is no logical form
    std::optional<std::string> sql;
};

struct QueryResponse {
    std::vector<ResponseLine> lines;
    codegen::QueryPlan plan;
    std::string plan_id;
    std::optional<std::map<std::string, double>> timing_ms;
};

nlohmann::json to_json(const QueryResponse& r);

/// Stable identifier of a plan: FNV-1a 64 over its compact JSON, in hex.
std::string plan_id(const codegen::QueryPlan& plan);

struct LineCohortResult {
    std::size_t line_number = 1;
    llf::Polarity polarity = llf::Polarity::Inclusion;
    codegen::LineStatus status = codegen::LineStatus::Skipped;
    std::string reason;
    std::set<std::int64_t> cohort;
    /// Cumulative cohort after this line.
    std::size_t cumulative_size = 0;
};

struct ExecutionResult {
    std::vector<LineCohortResult> lines;
    std::set<std::int64_t> cohort;
    std::set<std::int64_t> universe;
};

nlohmann::json to_json(const ExecutionResult& r);

struct ExecuteOptions {
    /// Demote an executed line to Skipped (reason ZeroResult) when applying
    /// it would leave the cumulative cohort empty.
    bool skip_zero = false;
};

class ExecutionError : public Error {
public:
    ExecutionError(std::size_t line, const std::string& what)
        : Error("ExecutionError", "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Runs every Executed line. The universe is the SMM's person table when
/// it has one, otherwise the union of executed line cohorts.
ExecutionResult execute(const codegen::QueryPlan& plan, sql::Database& db, const smm::SemanticMetadataMapping* smm,
                        const ExecuteOptions& options = {});

/// Loads a database: a directory holding database.sql, a .sql script, or
/// an SQLite file.
sql::Database open_database(const std::filesystem::path& path);

struct Config {
    std::filesystem::path data_dir = "data";
    std::filesystem::path concepts_file = "kb/concepts.tsv";
    std::filesystem::path triples_file = "kb/triples.tsv";
    std::filesystem::path lexicon_file = "lexicon.tsv";
    std::filesystem::path smm_dir = "smm";
    std::optional<std::filesystem::path> catalog_file;
    std::string host = "127.0.0.1";
    int port = 8080;
    /// Database name -> path, relative paths resolved against data_dir.
    std::map<std::string, std::filesystem::path> databases;
    std::string log_level = "info";

    std::filesystem::path resolve(const std::filesystem::path& p) const;
};

/// Reads the JSON configuration. Relative data_dir is resolved against the
/// file's directory; COHORTC_DATA_DIR and COHORTC_PORT override the file.
Config load_config(const std::filesystem::path& path);
Config config_from_json(const nlohmann::json& j, const std::filesystem::path& base);
void apply_environment(Config& c);

/// Shared read-only pipeline state. Safe to call concurrently.
class Engine {
public:
    Engine(kb::KnowledgeBase kb, norm::Lexicon lexicon, std::vector<smm::SemanticMetadataMapping> smms,
           llf::FunctionCatalog catalog = llf::FunctionCatalog::builtin());

    /// Loads KB, lexicon, catalog and every *.json in the SMM directory.
    static Engine from_config(const Config& config);

    QueryResponse generate(const QueryRequest& request) const;

    ExecutionResult execute(const codegen::QueryPlan& plan, sql::Database& db, const ExecuteOptions& options = {}) const;

    const smm::SemanticMetadataMapping* find_smm(std::string_view name) const;
    const std::vector<smm::SemanticMetadataMapping>& smms() const { return *smms_; }
    const kb::KnowledgeBase& knowledge_base() const { return *kb_; }
    const norm::Normalizer& normalizer() const { return *normalizer_; }
    const llf::FunctionCatalog& catalog() const { return catalog_; }

private:
    std::unique_ptr<kb::KnowledgeBase> kb_;
    std::unique_ptr<norm::Normalizer> normalizer_;
    std::unique_ptr<std::vector<smm::SemanticMetadataMapping>> smms_;
    llf::FunctionCatalog catalog_;
};

}  // namespace cohortc::engine
