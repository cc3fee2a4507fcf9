#include <charconv>

#include "cohortc/llf.hpp"

namespace cohortc::llf {

LfNode LfNode::call(std::string function, std::vector<LfNode> args, std::vector<LfNode> predicates) {
    LfNode n;
    n.kind = NodeKind::Call;
    n.name = std::move(function);
    n.args = std::move(args);
    n.predicates = std::move(predicates);
    return n;
}

LfNode LfNode::quoted(std::string text) {
    LfNode n;
    n.kind = NodeKind::Quoted;
    n.name = std::move(text);
    return n;
}

LfNode LfNode::symbol(std::string name) {
    LfNode n;
    n.kind = NodeKind::Symbol;
    n.name = std::move(name);
    return n;
}

const std::string* LfNode::quoted_value() const {
    for (const auto& a : args) {
        if (a.kind == NodeKind::Quoted) return &a.name;
    }
    return nullptr;
}

namespace {

void number_spans(LfNode& node, std::size_t& counter) {
    if (!node.is_call()) return;
    node.span_index.reset();
    for (auto& a : node.args) {
        if (a.kind == NodeKind::Quoted) {
            if (!node.span_index) node.span_index = counter;
            ++counter;
        } else {
            number_spans(a, counter);
        }
    }
    for (auto& p : node.predicates) number_spans(p, counter);
}

void collect_spans(const LfNode& node, std::vector<std::string>& out) {
    if (node.kind == NodeKind::Quoted) {
        out.push_back(node.name);
        return;
    }
    for (const auto& a : node.args) collect_spans(a, out);
    for (const auto& p : node.predicates) collect_spans(p, out);
}

}  // namespace

void assign_span_indices(LfNode& root) {
    std::size_t counter = 0;
    number_spans(root, counter);
}

std::vector<std::string> quoted_spans(const LfNode& root) {
    std::vector<std::string> out;
    collect_spans(root, out);
    return out;
}

std::string to_string(const NodePath& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += '.';
        out += path[i].predicate ? 'p' : 'a';
        out += std::to_string(path[i].index);
    }
    return out;
}

std::optional<NodePath> parse_path(std::string_view text) {
    NodePath path;
    if (text.empty()) return path;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto dot = text.find('.', start);
        auto part = text.substr(start, dot == std::string_view::npos ? std::string_view::npos
                                                                      : dot - start);
        if (part.size() < 2 || (part[0] != 'a' && part[0] != 'p')) return std::nullopt;
        std::size_t idx = 0;
        auto [ptr, ec] = std::from_chars(part.data() + 1, part.data() + part.size(), idx);
        if (ec != std::errc{} || ptr != part.data() + part.size()) return std::nullopt;
        path.push_back({part[0] == 'p', idx});
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return path;
}

const LfNode* find_node(const LfNode& root, const NodePath& path) {
    const LfNode* cur = &root;
    for (const auto& step : path) {
        const auto& list = step.predicate ? cur->predicates : cur->args;
        if (step.index >= list.size()) return nullptr;
        cur = &list[step.index];
    }
    return cur;
}

}  // namespace cohortc::llf
