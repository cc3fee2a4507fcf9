#include "cohortc/llf.hpp"

namespace cohortc::llf {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

}  // namespace

const char* to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::Identifier: return "identifier";
        case TokenKind::OpenParen: return "'('";
        case TokenKind::CloseParen: return "')'";
        case TokenKind::Comma: return "','";
        case TokenKind::Dot: return "'.'";
        case TokenKind::QuotedString: return "quoted string";
        case TokenKind::OpenBracket: return "'['";
        case TokenKind::CloseBracket: return "']'";
        case TokenKind::Whitespace: return "whitespace";
    }
    return "?";
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto punct = [&](TokenKind kind) {
        out.push_back({kind, std::string(1, text[i]), std::string(1, text[i]), i});
        ++i;
    };
    while (i < n) {
        const char c = text[i];
        if (is_space(c)) {
            std::size_t j = i;
            while (j < n && is_space(text[j])) ++j;
            std::string ws(text.substr(i, j - i));
            out.push_back({TokenKind::Whitespace, ws, ws, i});
            i = j;
        } else if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < n && is_ident_char(text[j])) ++j;
            std::string id(text.substr(i, j - i));
            out.push_back({TokenKind::Identifier, id, id, i});
            i = j;
        } else if (c == '"') {
            std::string value;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < n) {
                if (text[j] == '\\' && j + 1 < n && (text[j + 1] == '"' || text[j + 1] == '\\')) {
                    value.push_back(text[j + 1]);
                    j += 2;
                } else if (text[j] == '"') {
                    closed = true;
                    ++j;
                    break;
                } else {
                    value.push_back(text[j]);
                    ++j;
                }
            }
            if (!closed) throw UnterminatedString(i);
            out.push_back({TokenKind::QuotedString, std::move(value),
                           std::string(text.substr(i, j - i)), i});
            i = j;
        } else {
            switch (c) {
                case '(': punct(TokenKind::OpenParen); break;
                case ')': punct(TokenKind::CloseParen); break;
                case ',': punct(TokenKind::Comma); break;
                case '.': punct(TokenKind::Dot); break;
                case '[': punct(TokenKind::OpenBracket); break;
                case ']': punct(TokenKind::CloseBracket); break;
                default: throw IllegalCharacter(i, c);
            }
        }
    }
    return out;
}

}  // namespace cohortc::llf
