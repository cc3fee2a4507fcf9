#pragma once

// Logical-form DSL: tokens, AST, function catalog, parser, serializer,
// syntax-style conversion and catalog validation.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cohortc/error.hpp"

namespace cohortc::llf {

// ---------------------------------------------------------------------------
// Tokens

enum class TokenKind {
    Identifier,
    OpenParen,
    CloseParen,
    Comma,
    Dot,
    QuotedString,
    OpenBracket,
    CloseBracket,
    Whitespace,
};

const char* to_string(TokenKind kind);

/// `raw` is the exact source slice, so concatenating every token's raw text
/// reproduces the input. `text` is the token's value: for quoted strings the
/// unescaped content without the surrounding quotes, otherwise equal to raw.
struct Token {
    TokenKind kind;
    std::string text;
    std::string raw;
    std::size_t position = 0;
};

class UnterminatedString : public PositionedError {
public:
    explicit UnterminatedString(std::size_t position)
        : PositionedError("UnterminatedString", position, "unterminated quoted string") {}
};

class IllegalCharacter : public PositionedError {
public:
    IllegalCharacter(std::size_t position, char c)
        : PositionedError("IllegalCharacter", position,
                          std::string("illegal character '") + c + "'"),
          character_(c) {}
    char character() const noexcept { return character_; }

private:
    char character_;
};

std::vector<Token> tokenize(std::string_view text);

// ---------------------------------------------------------------------------
// Function catalog

enum class FunctionKind { Entity, Demographic, Structural, Value, Comparison, Predicate };

const char* to_string(FunctionKind kind);
std::optional<FunctionKind> function_kind_from_string(std::string_view s);

struct FunctionSpec {
    std::string name;
    FunctionKind kind = FunctionKind::Entity;
    std::size_t min_arity = 0;
    std::optional<std::size_t> max_arity;  // nullopt: unbounded
    bool chainable = false;

    bool accepts(std::size_t arity) const {
        return arity >= min_arity && (!max_arity || arity <= *max_arity);
    }
    std::string arity_text() const;
};

class FunctionCatalog {
public:
    /// The shipped catalog: every function and predicate the engine reasons about.
    static FunctionCatalog builtin();

    /// Reads the key-value catalog format (see docs/formats.md). Entries
    /// override built-in ones of the same name when merged with `extend`.
    static FunctionCatalog parse(std::string_view text);
    static FunctionCatalog load(const std::filesystem::path& path);

    void add(FunctionSpec spec);
    void extend(const FunctionCatalog& other);

    const FunctionSpec* find(std::string_view name) const;
    const std::vector<FunctionSpec>& entries() const { return entries_; }

    std::string to_text() const;

private:
    std::vector<FunctionSpec> entries_;
};

// ---------------------------------------------------------------------------
// AST

enum class NodeKind { Call, Quoted, Symbol };

/// One logical-form node. Calls carry a function name, arguments and chained
/// predicates; Quoted and Symbol nodes are leaf arguments (`"65"`, `GT`) whose
/// payload lives in `name`.
struct LfNode {
    NodeKind kind = NodeKind::Call;
    std::string name;
    std::vector<LfNode> args;
    std::vector<LfNode> predicates;
    /// For a call owning a quoted argument: the index of that span among all
    /// quoted spans of the criterion, in textual order.
    std::optional<std::size_t> span_index;

    static LfNode call(std::string function, std::vector<LfNode> args = {},
                       std::vector<LfNode> predicates = {});
    static LfNode quoted(std::string text);
    static LfNode symbol(std::string name);

    bool is_call() const { return kind == NodeKind::Call; }
    bool is_call(std::string_view function) const { return is_call() && name == function; }

    /// First quoted argument, if any.
    const std::string* quoted_value() const;

    bool operator==(const LfNode&) const = default;
};

/// Numbers quoted spans depth-first (arguments before predicates), which is
/// the textual order of the serialized form.
void assign_span_indices(LfNode& root);

/// Collects quoted span texts in textual order.
std::vector<std::string> quoted_spans(const LfNode& root);

/// Address of a node inside a tree: a sequence of argument / predicate steps.
struct PathStep {
    bool predicate = false;
    std::size_t index = 0;
    bool operator==(const PathStep&) const = default;
};
using NodePath = std::vector<PathStep>;

/// "a2.p0.a0" style rendering; the root is the empty string.
std::string to_string(const NodePath& path);
std::optional<NodePath> parse_path(std::string_view text);

const LfNode* find_node(const LfNode& root, const NodePath& path);

// ---------------------------------------------------------------------------
// Parsing and serialization

class SyntaxError : public PositionedError {
public:
    SyntaxError(std::size_t position, std::string expected, std::string found)
        : PositionedError("SyntaxError", position,
                          "expected " + expected + ", found " + found),
          expected_(std::move(expected)),
          found_(std::move(found)) {}
    const std::string& expected() const noexcept { return expected_; }
    const std::string& found() const noexcept { return found_; }

private:
    std::string expected_;
    std::string found_;
};

class UnknownFunction : public PositionedError {
public:
    UnknownFunction(std::string name, std::size_t position)
        : PositionedError("UnknownFunction", position, "unknown function '" + name + "'"),
          name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class ArityError : public Error {
public:
    ArityError(std::string name, std::size_t got, std::string allowed)
        : Error("ArityError", name + " got " + std::to_string(got) + " allowed " + allowed),
          name_(std::move(name)),
          got_(got),
          allowed_(std::move(allowed)) {}
    const std::string& name() const noexcept { return name_; }
    std::size_t got() const noexcept { return got_; }
    const std::string& allowed() const noexcept { return allowed_; }

private:
    std::string name_;
    std::size_t got_;
    std::string allowed_;
};

/// Parses one Standard-style expression. Function names are checked against
/// the catalog and argument counts against its arity bounds; deeper rules
/// are left to `validate`.
LfNode parse(std::string_view text, const FunctionCatalog& catalog);

/// Compact form has no whitespace except one space after each comma. Pretty
/// form keeps a call on one line when it fits in 80 columns and otherwise
/// puts one argument per line, indented by four spaces.
std::string serialize(const LfNode& node, bool pretty = false);

// ---------------------------------------------------------------------------
// Syntax styles

enum class Style { Standard, ShiftReduce, SpanIndex };

const char* to_string(Style style);
std::optional<Style> style_from_string(std::string_view s);

class MalformedStyle : public PositionedError {
public:
    MalformedStyle(std::size_t position, const std::string& what)
        : PositionedError("MalformedStyle", position, what) {}
};

class MissingSpanTable : public Error {
public:
    MissingSpanTable() : Error("MissingSpanTable", "SpanIndex input requires a span table") {}
};

class SpanIndexOutOfRange : public Error {
public:
    explicit SpanIndexOutOfRange(std::size_t index)
        : Error("SpanIndexOutOfRange", "span index @" + std::to_string(index) + " out of range"),
          index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Converts a logical-form string between syntax styles. Converting out of
/// SpanIndex requires the ordered table of original quoted spans.
std::string convert_style(std::string_view text, Style from, Style to,
                          const FunctionCatalog& catalog,
                          std::optional<std::span<const std::string>> span_table = std::nullopt);

/// `[name arg arg name]` rendering; chained predicates keep their dot.
std::string serialize_shift_reduce(const LfNode& node);
LfNode parse_shift_reduce(std::string_view text, const FunctionCatalog& catalog);

/// Replaces each quoted span by `@k`. Works on Standard and ShiftReduce text.
std::string to_span_index(std::string_view text, std::vector<std::string>* spans_out = nullptr);
std::string from_span_index(std::string_view text, std::span<const std::string> spans);

// ---------------------------------------------------------------------------
// Validation

struct Diagnostic {
    std::string code;      // ArityError, ArgumentKindError, ChainingError, UnknownFunction
    std::string function;  // offending function name
    std::string path;      // NodePath rendering
    std::string message;
};

std::vector<Diagnostic> validate(const LfNode& node, const FunctionCatalog& catalog);

/// Comparison operator vocabulary of `op(...)`.
bool is_operator_symbol(std::string_view s);

// ---------------------------------------------------------------------------
// Criteria and annotation files

enum class Polarity { Inclusion, Exclusion };

const char* to_string(Polarity p);  // "INC" / "EXC"
std::optional<Polarity> polarity_from_string(std::string_view s);

struct Criterion {
    Polarity polarity = Polarity::Inclusion;
    std::string raw_text;
    std::optional<std::string> augmented_text;
    std::optional<LfNode> logical_form;
    std::size_t line_number = 1;
};

/// Reads the annotation layout: polarity on line 1, raw text on line 3,
/// augmented text on line 5 and the logical form from line 7 on (it may
/// span several lines in pretty form). A blank line 7
/// leaves the logical form unset.
Criterion read_annotation(std::string_view content, const FunctionCatalog& catalog);
Criterion read_annotation_file(const std::filesystem::path& path, const FunctionCatalog& catalog);

}  // namespace cohortc::llf
