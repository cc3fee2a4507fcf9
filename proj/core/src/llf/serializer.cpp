#include "cohortc/llf.hpp"

namespace cohortc::llf {

namespace {

constexpr std::size_t kWidth = 80;
constexpr std::size_t kIndent = 4;

void append_quoted(std::string& out, const std::string& text) {
    out += '"';
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
}

void append_compact(std::string& out, const LfNode& node) {
    switch (node.kind) {
        case NodeKind::Quoted: append_quoted(out, node.name); return;
        case NodeKind::Symbol: out += node.name; return;
        case NodeKind::Call: break;
    }
    out += node.name;
    out += '(';
    for (std::size_t i = 0; i < node.args.size(); ++i) {
        if (i) out += ", ";
        append_compact(out, node.args[i]);
    }
    out += ')';
    for (const auto& p : node.predicates) {
        out += '.';
        append_compact(out, p);
    }
}

std::size_t last_line_column(const std::string& out, std::size_t start_column) {
    auto nl = out.rfind('\n');
    return nl == std::string::npos ? start_column + out.size() : out.size() - nl - 1;
}

std::string pretty(const LfNode& node, std::size_t column) {
    std::string compact;
    append_compact(compact, node);
    if (!node.is_call() || column + compact.size() <= kWidth) return compact;

    std::string out = node.name;
    if (node.args.empty()) {
        out += "()";
    } else {
        out += "(\n";
        const std::string pad(column + kIndent, ' ');
        for (std::size_t i = 0; i < node.args.size(); ++i) {
            out += pad;
            out += pretty(node.args[i], column + kIndent);
            if (i + 1 < node.args.size()) out += ',';
            out += '\n';
        }
        out += std::string(column, ' ');
        out += ')';
    }
    for (const auto& p : node.predicates) {
        out += '.';
        out += pretty(p, last_line_column(out, column));
    }
    return out;
}

}  // namespace

std::string serialize(const LfNode& node, bool pretty_mode) {
    if (pretty_mode) return pretty(node, 0);
    std::string out;
    append_compact(out, node);
    return out;
}

}  // namespace cohortc::llf
