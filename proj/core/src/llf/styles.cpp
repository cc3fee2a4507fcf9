#include <cctype>

#include "cohortc/llf.hpp"

namespace cohortc::llf {

const char* to_string(Style style) {
    switch (style) {
        case Style::Standard: return "standard";
        case Style::ShiftReduce: return "shift-reduce";
        case Style::SpanIndex: return "span-index";
    }
    return "?";
}

std::optional<Style> style_from_string(std::string_view s) {
    if (s == "standard") return Style::Standard;
    if (s == "shift-reduce" || s == "shiftreduce") return Style::ShiftReduce;
    if (s == "span-index" || s == "spanindex" || s == "pointer") return Style::SpanIndex;
    return std::nullopt;
}

namespace {

void append_quoted(std::string& out, const std::string& text) {
    out += '"';
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
}

void append_shift_reduce(std::string& out, const LfNode& node) {
    switch (node.kind) {
        case NodeKind::Quoted: append_quoted(out, node.name); return;
        case NodeKind::Symbol: out += node.name; return;
        case NodeKind::Call: break;
    }
    out += '[';
    out += node.name;
    for (const auto& a : node.args) {
        out += ' ';
        append_shift_reduce(out, a);
    }
    out += ' ';
    out += node.name;
    out += ']';
    for (const auto& p : node.predicates) {
        out += '.';
        append_shift_reduce(out, p);
    }
}

class ShiftReduceParser {
public:
    ShiftReduceParser(std::string_view text, const FunctionCatalog& catalog)
        : catalog_(catalog), end_(text.size()) {
        for (auto& t : tokenize(text)) {
            if (t.kind == TokenKind::OpenParen || t.kind == TokenKind::CloseParen ||
                t.kind == TokenKind::Comma) {
                throw MalformedStyle(t.position, "parentheses and commas are not shift-reduce syntax");
            }
            if (t.kind != TokenKind::Whitespace) tokens_.push_back(std::move(t));
        }
    }

    LfNode parse_root() {
        LfNode root = parse_expression();
        if (pos_ < tokens_.size()) {
            throw MalformedStyle(tokens_[pos_].position, "trailing input after expression");
        }
        assign_span_indices(root);
        return root;
    }

private:
    const FunctionCatalog& catalog_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::size_t end_;

    std::size_t position() const { return pos_ < tokens_.size() ? tokens_[pos_].position : end_; }
    bool at(TokenKind k) const { return pos_ < tokens_.size() && tokens_[pos_].kind == k; }

    LfNode parse_expression() {
        LfNode head = parse_bracket();
        while (at(TokenKind::Dot)) {
            ++pos_;
            head.predicates.push_back(parse_bracket());
        }
        return head;
    }

    LfNode parse_bracket() {
        if (!at(TokenKind::OpenBracket)) throw MalformedStyle(position(), "expected '['");
        ++pos_;
        if (!at(TokenKind::Identifier)) throw MalformedStyle(position(), "expected function name");
        const Token& name = tokens_[pos_++];
        const FunctionSpec* spec = catalog_.find(name.text);
        if (!spec) throw UnknownFunction(name.text, name.position);

        std::vector<LfNode> items;
        for (;;) {
            if (at(TokenKind::CloseBracket)) break;
            if (at(TokenKind::OpenBracket)) {
                items.push_back(parse_expression());
            } else if (at(TokenKind::QuotedString)) {
                items.push_back(LfNode::quoted(tokens_[pos_++].text));
            } else if (at(TokenKind::Identifier)) {
                items.push_back(LfNode::symbol(tokens_[pos_++].text));
            } else {
                throw MalformedStyle(position(), "expected argument or ']'");
            }
        }
        const std::size_t close = position();
        ++pos_;
        if (items.empty() || items.back().kind != NodeKind::Symbol || items.back().name != name.text) {
            throw MalformedStyle(close, "missing trailing repeat of '" + name.text + "'");
        }
        items.pop_back();
        if (!spec->accepts(items.size())) {
            throw ArityError(name.text, items.size(), spec->arity_text());
        }
        return LfNode::call(name.text, std::move(items));
    }
};

}  // namespace

std::string serialize_shift_reduce(const LfNode& node) {
    std::string out;
    append_shift_reduce(out, node);
    return out;
}

LfNode parse_shift_reduce(std::string_view text, const FunctionCatalog& catalog) {
    return ShiftReduceParser(text, catalog).parse_root();
}

std::string to_span_index(std::string_view text, std::vector<std::string>* spans_out) {
    std::string out;
    std::size_t counter = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '"') {
            out += text[i++];
            continue;
        }
        const std::size_t start = i;
        std::string value;
        ++i;
        bool closed = false;
        while (i < text.size()) {
            if (text[i] == '\\' && i + 1 < text.size() && (text[i + 1] == '"' || text[i + 1] == '\\')) {
                value += text[i + 1];
                i += 2;
            } else if (text[i] == '"') {
                closed = true;
                ++i;
                break;
            } else {
                value += text[i++];
            }
        }
        if (!closed) throw MalformedStyle(start, "unterminated quoted string");
        out += '@';
        out += std::to_string(counter++);
        if (spans_out) spans_out->push_back(std::move(value));
    }
    return out;
}

std::string from_span_index(std::string_view text, std::span<const std::string> spans) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '"') {
            const std::size_t start = i;
            out += text[i++];
            bool closed = false;
            while (i < text.size()) {
                if (text[i] == '\\' && i + 1 < text.size()) {
                    out += text[i];
                    out += text[i + 1];
                    i += 2;
                } else if (text[i] == '"') {
                    out += text[i++];
                    closed = true;
                    break;
                } else {
                    out += text[i++];
                }
            }
            if (!closed) throw MalformedStyle(start, "unterminated quoted string");
        } else if (c == '@') {
            const std::size_t at = i++;
            std::size_t k = 0;
            std::size_t digits = 0;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
                k = k * 10 + static_cast<std::size_t>(text[i] - '0');
                ++i;
                ++digits;
            }
            if (digits == 0) throw MalformedStyle(at, "'@' must be followed by a span index");
            if (k >= spans.size()) throw SpanIndexOutOfRange(k);
            append_quoted(out, spans[k]);
        } else {
            out += text[i++];
        }
    }
    return out;
}

std::string convert_style(std::string_view text, Style from, Style to, const FunctionCatalog& catalog,
                          std::optional<std::span<const std::string>> span_table) {
    if (from == to) return std::string(text);

    std::string standard;
    switch (from) {
        case Style::Standard: standard = std::string(text); break;
        case Style::ShiftReduce: standard = serialize(parse_shift_reduce(text, catalog)); break;
        case Style::SpanIndex:
            if (!span_table) throw MissingSpanTable();
            standard = from_span_index(text, *span_table);
            break;
    }

    switch (to) {
        case Style::Standard:
            (void)parse(standard, catalog);
            return standard;
        case Style::ShiftReduce: return serialize_shift_reduce(parse(standard, catalog));
        case Style::SpanIndex:
            (void)parse(standard, catalog);
            return to_span_index(standard);
    }
    return standard;
}

}  // namespace cohortc::llf
