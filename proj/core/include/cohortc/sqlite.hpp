#pragma once

// Minimal RAII wrapper over the embedded SQLite engine.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cohortc/error.hpp"

struct sqlite3;
struct sqlite3_stmt;

namespace cohortc::sql {

class SqliteError : public Error {
public:
    explicit SqliteError(const std::string& message) : Error("SqliteError", message) {}
};

using Value = std::variant<std::nullptr_t, std::int64_t, double, std::string>;

class Statement {
public:
    Statement(sqlite3* db, std::string_view sql);
    ~Statement();
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;
    Statement(Statement&& other) noexcept;
    Statement& operator=(Statement&&) = delete;

    /// 1-based parameter index.
    void bind(int index, const Value& v);
    /// True while a row is available.
    bool step();
    void reset();

    std::int64_t column_int(int i) const;
    std::optional<double> column_double(int i) const;
    std::string column_text(int i) const;
    int column_count() const;

private:
    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

class Database {
public:
    /// ":memory:" opens a private in-memory database.
    explicit Database(const std::string& path = ":memory:");
    ~Database();
    Database(const Database&) = delete;
    Database& operator=(const Database&) = delete;
    Database(Database&& other) noexcept;
    Database& operator=(Database&& other) noexcept;

    /// Runs one or more `;`-separated statements.
    void exec(std::string_view sql);
    Statement prepare(std::string_view sql);

    /// Distinct values of the first column, read as integers.
    std::set<std::int64_t> person_ids(std::string_view sql);

    sqlite3* handle() const { return db_; }

private:
    sqlite3* db_ = nullptr;
};

}  // namespace cohortc::sql
