#include "cohortc/llf.hpp"

namespace cohortc::llf {

namespace {

class Parser {
public:
    Parser(std::string_view text, const FunctionCatalog& catalog)
        : catalog_(catalog), end_(text.size()) {
        for (auto& t : tokenize(text)) {
            if (t.kind != TokenKind::Whitespace) tokens_.push_back(std::move(t));
        }
    }

    LfNode parse_root() {
        LfNode root = parse_expression();
        if (!at_end()) throw SyntaxError(position(), "end of input", describe_current());
        assign_span_indices(root);
        return root;
    }

private:
    const FunctionCatalog& catalog_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::size_t end_;

    bool at_end() const { return pos_ >= tokens_.size(); }
    const Token* peek(std::size_t ahead = 0) const {
        return pos_ + ahead < tokens_.size() ? &tokens_[pos_ + ahead] : nullptr;
    }
    std::size_t position() const { return at_end() ? end_ : tokens_[pos_].position; }

    std::string describe_current() const {
        if (at_end()) return "end of input";
        const Token& t = tokens_[pos_];
        if (t.kind == TokenKind::Identifier) return "identifier '" + t.text + "'";
        if (t.kind == TokenKind::QuotedString) return "quoted string";
        return to_string(t.kind);
    }

    const Token& expect(TokenKind kind, const char* what) {
        if (at_end() || tokens_[pos_].kind != kind) {
            throw SyntaxError(position(), what, describe_current());
        }
        return tokens_[pos_++];
    }

    bool accept(TokenKind kind) {
        if (!at_end() && tokens_[pos_].kind == kind) {
            ++pos_;
            return true;
        }
        return false;
    }

    LfNode parse_expression() {
        LfNode head = parse_call();
        while (accept(TokenKind::Dot)) head.predicates.push_back(parse_call());
        return head;
    }

    LfNode parse_call() {
        const Token& name = expect(TokenKind::Identifier, "function name");
        const FunctionSpec* spec = catalog_.find(name.text);
        if (!spec) throw UnknownFunction(name.text, name.position);
        LfNode node = LfNode::call(name.text);
        expect(TokenKind::OpenParen, "'('");
        if (!accept(TokenKind::CloseParen)) {
            for (;;) {
                node.args.push_back(parse_argument());
                if (accept(TokenKind::Comma)) continue;
                expect(TokenKind::CloseParen, "',' or ')'");
                break;
            }
        }
        if (!spec->accepts(node.args.size())) {
            throw ArityError(node.name, node.args.size(), spec->arity_text());
        }
        return node;
    }

    LfNode parse_argument() {
        const Token* t = peek();
        if (t && t->kind == TokenKind::QuotedString) {
            ++pos_;
            return LfNode::quoted(t->text);
        }
        if (t && t->kind == TokenKind::Identifier) {
            const Token* next = peek(1);
            if (next && next->kind == TokenKind::OpenParen) return parse_expression();
            ++pos_;
            return LfNode::symbol(t->text);
        }
        throw SyntaxError(position(), "argument", describe_current());
    }
};

}  // namespace

LfNode parse(std::string_view text, const FunctionCatalog& catalog) {
    return Parser(text, catalog).parse_root();
}

}  // namespace cohortc::llf
