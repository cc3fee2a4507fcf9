#include "cohortc/text.hpp"

#include "cohortc/reasoner.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <set>

namespace cohortc::text {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }
bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_'; }
bool is_ident_byte(unsigned char c) { return std::isalnum(c) || c == '_'; }

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

const llf::FunctionCatalog& builtin_catalog() {
    static const llf::FunctionCatalog c = llf::FunctionCatalog::builtin();
    return c;
}

// UTF-8 curly quotes are accepted wherever a straight quote is.
bool curly_quote_at(std::string_view s, std::size_t i) {
    return i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
           static_cast<unsigned char>(s[i + 1]) == 0x80 &&
           (static_cast<unsigned char>(s[i + 2]) == 0x9C || static_cast<unsigned char>(s[i + 2]) == 0x9D);
}

/// End (exclusive) of a catalog call starting at `i`, including chained
/// predicates; nullopt when `i` does not start one.
std::optional<std::size_t> call_extent(std::string_view s, std::size_t i, const llf::FunctionCatalog& catalog) {
    auto ident_end = [&](std::size_t k) {
        while (k < s.size() && is_ident_byte(static_cast<unsigned char>(s[k]))) ++k;
        return k;
    };
    if (i >= s.size() || !is_ident_start(static_cast<unsigned char>(s[i]))) return std::nullopt;
    if (i > 0 && (is_ident_byte(static_cast<unsigned char>(s[i - 1])) || s[i - 1] == '.')) return std::nullopt;
    std::size_t k = i;
    bool first = true;
    while (true) {
        std::size_t e = ident_end(k);
        if (!catalog.find(s.substr(k, e - k))) return first ? std::nullopt : std::optional<std::size_t>(k - 1);
        std::size_t p = e;
        while (p < s.size() && s[p] == ' ') ++p;
        if (p >= s.size() || s[p] != '(') return first ? std::nullopt : std::optional<std::size_t>(k - 1);
        int depth = 0;
        bool quoted = false;
        for (; p < s.size(); ++p) {
            if (s[p] == '"' || curly_quote_at(s, p)) {
                quoted = !quoted;
                if (s[p] != '"') p += 2;
                continue;
            }
            if (quoted) {
                if (s[p] == '\\') ++p;
                continue;
            }
            if (s[p] == '(') ++depth;
            if (s[p] == ')' && --depth == 0) break;
        }
        if (p >= s.size()) return std::nullopt;
        first = false;
        k = p + 1;
        if (k + 1 < s.size() && s[k] == '.' && is_ident_start(static_cast<unsigned char>(s[k + 1]))) {
            ++k;
            continue;
        }
        return k;
    }
}

struct OffsetToken {
    std::size_t start, end;
    std::string key;
    bool is_protected = false;
};

std::vector<OffsetToken> offset_tokens(std::string_view text) {
    const auto& catalog = builtin_catalog();
    std::vector<OffsetToken> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (auto end = call_extent(text, i, catalog)) {
            out.push_back({i, *end, "", true});
            i = *end;
            continue;
        }
        std::size_t j = i + 1;
        if (is_word_byte(c)) {
            while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
        }
        out.push_back({i, j, lower(text.substr(i, j - i)), false});
        i = j;
    }
    return out;
}

/// Priority when one phrase carries several tagged semantic types.
std::optional<std::string> pick_function(const std::vector<const norm::LexiconEntry*>& entries) {
    static const std::array<const char*, 5> order{"cond", "lab", "proc", "drug", "obs"};
    std::set<std::string> fns;
    for (const auto* e : entries) {
        for (const auto& t : e->semantic_types) {
            if (auto f = norm::function_for_semantic_type(t)) fns.insert(*f);
        }
    }
    for (const char* f : order) {
        if (fns.contains(f)) return std::string(f);
    }
    return std::nullopt;
}

}  // namespace

std::string render_span(std::string_view function, std::string_view text) {
    std::string out(function);
    out += "(\"";
    for (char c : text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out + "\")";
}

AugmentedCriterion augment(std::string_view text, const norm::Lexicon& lexicon) {
    AugmentedCriterion out;
    out.original = std::string(text);
    auto toks = offset_tokens(text);
    std::vector<std::string> keys;
    for (const auto& t : toks) keys.push_back(t.key);
    std::size_t b = 0;
    while (b < toks.size()) {
        if (toks[b].is_protected) {
            ++b;
            continue;
        }
        std::size_t limit = b;
        while (limit < toks.size() && !toks[limit].is_protected && limit - b < lexicon.max_phrase_tokens()) ++limit;
        bool matched = false;
        for (std::size_t e = limit; e > b; --e) {
            auto fn = pick_function(lexicon.lookup(keys, b, e));
            if (!fn) continue;
            out.spans.push_back({toks[b].start, toks[e - 1].end, *fn});
            b = e;
            matched = true;
            break;
        }
        if (!matched) ++b;
    }
    std::size_t at = 0;
    for (const auto& s : out.spans) {
        out.augmented.append(text.substr(at, s.start - at));
        out.augmented += render_span(s.function, text.substr(s.start, s.end - s.start));
        at = s.end;
    }
    out.augmented.append(text.substr(at));
    return out;
}

// ---------------------------------------------------------------------------
// Translation

namespace {

using llf::LfNode;
using llf::Polarity;

enum class Tok { Call, Word, Number, Compare, Punct };

struct LexToken {
    Tok kind;
    std::string text;
    std::optional<LfNode> call;
};

struct Untranslatable {
    std::string reason;
};

std::string straighten_quotes(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (curly_quote_at(s, i)) {
            out.push_back('"');
            i += 2;
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

bool compare_byte(std::string_view s, std::size_t i, std::size_t* len) {
    const char c = s[i];
    if (c == '<' || c == '>' || c == '=') {
        *len = 1;
        return true;
    }
    // UTF-8 >= and <= signs.
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 && static_cast<unsigned char>(s[i + 1]) == 0x89 &&
        (static_cast<unsigned char>(s[i + 2]) == 0xA4 || static_cast<unsigned char>(s[i + 2]) == 0xA5)) {
        *len = 3;
        return true;
    }
    return false;
}

std::vector<LexToken> lex(std::string_view s, const llf::FunctionCatalog& catalog) {
    std::vector<LexToken> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        if (std::isspace(c)) {
            ++i;
        } else if (auto end = call_extent(s, i, catalog)) {
            const std::string src = straighten_quotes(s.substr(i, *end - i));
            try {
                out.push_back({Tok::Call, src, llf::parse(src, catalog)});
            } catch (const Error& e) {
                throw Untranslatable{"malformed embedded logical form: " + std::string(e.what())};
            }
            i = *end;
        } else if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j + 1 < s.size() && s[j] == '.' && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
                ++j;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            }
            out.push_back({Tok::Number, std::string(s.substr(i, j - i)), std::nullopt});
            i = j;
        } else if (compare_byte(s, i, &len)) {
            std::string sym;
            while (i < s.size() && compare_byte(s, i, &len)) {
                sym += len == 3 ? (static_cast<unsigned char>(s[i + 2]) == 0xA5 ? ">=" : "<=") : std::string(1, s[i]);
                i += len;
            }
            out.push_back({Tok::Compare, sym, std::nullopt});
        } else if (is_word_byte(c)) {
            std::size_t j = i;
            while (j < s.size() && is_word_byte(static_cast<unsigned char>(s[j])) &&
                   !std::isdigit(static_cast<unsigned char>(s[j])))
                ++j;
            if (j == i) ++j;
            out.push_back({Tok::Word, lower(s.substr(i, j - i)), std::nullopt});
            i = j;
        } else {
            out.push_back({Tok::Punct, std::string(1, s[i]), std::nullopt});
            ++i;
        }
    }
    return out;
}

// Phrase tables. Each entry is a token sequence; comparison symbols appear as
// their own tokens.
struct CompareWord {
    std::vector<std::string> words;
    reason::CompareOp op;
};

const std::vector<CompareWord>& prefix_comparators() {
    using O = reason::CompareOp;
    static const std::vector<CompareWord> table{
        {{"greater", "than", "or", "equal", "to"}, O::GTEQ},
        {{"more", "than", "or", "equal", "to"}, O::GTEQ},
        {{"less", "than", "or", "equal", "to"}, O::LTEQ},
        {{"no", "less", "than"}, O::GTEQ},
        {{"no", "more", "than"}, O::LTEQ},
        {{"at", "least"}, O::GTEQ},
        {{"at", "most"}, O::LTEQ},
        {{"greater", "than"}, O::GT},
        {{"more", "than"}, O::GT},
        {{"higher", "than"}, O::GT},
        {{"older", "than"}, O::GT},
        {{"less", "than"}, O::LT},
        {{"lower", "than"}, O::LT},
        {{"fewer", "than"}, O::LT},
        {{"younger", "than"}, O::LT},
        {{"equal", "to"}, O::EQ},
        {{"over"}, O::GT},
        {{"above"}, O::GT},
        {{"exceeding"}, O::GT},
        {{"under"}, O::LT},
        {{"below"}, O::LT},
        {{">="}, O::GTEQ},
        {{"=>"}, O::GTEQ},
        {{"<="}, O::LTEQ},
        {{"=<"}, O::LTEQ},
        {{">"}, O::GT},
        {{"<"}, O::LT},
        {{"="}, O::EQ},
        {{"=="}, O::EQ},
        {{"!="}, O::NEQ},
        {{"<>"}, O::NEQ},
    };
    return table;
}

const std::set<std::string>& upward_words() {
    static const std::set<std::string> s{"older", "more", "greater", "higher", "above", "over"};
    return s;
}
const std::set<std::string>& downward_words() {
    static const std::set<std::string> s{"younger", "less", "lower", "fewer", "below", "under"};
    return s;
}
const std::set<std::string>& unit_words() {
    static const std::set<std::string> s{"years", "year", "yrs", "yr", "y", "yo", "old", "of", "age",
                                         "mg", "dl", "g", "l", "ml", "min", "mmol", "kg", "m", "u",
                                         "units", "%", "/", "percent", "x", "uln"};
    return s;
}

const std::vector<std::vector<std::string>>& negation_phrases() {
    static const std::vector<std::vector<std::string>> table{
        {"no", "prior", "history", "of"}, {"no", "previous", "history", "of"}, {"no", "history", "of"},
        {"no", "known"}, {"no", "prior"}, {"no", "previous"}, {"absence", "of"}, {"free", "of"},
        {"negative", "for"}, {"never", "had"}, {"without"}, {"no"}, {"not"},
    };
    return table;
}

const std::vector<std::string>& blacklist() {
    static const std::vector<std::string> table{"opinion", "investigator", "willing", "consent",
                                                "comply", "understand", "able to"};
    return table;
}

std::optional<std::string> window_unit(std::string_view w) {
    if (w == "minute" || w == "minutes" || w == "min" || w == "mins") return "minutes";
    if (w == "hour" || w == "hours" || w == "hr" || w == "hrs" || w == "h") return "hours";
    if (w == "day" || w == "days" || w == "d") return "days";
    if (w == "week" || w == "weeks" || w == "wk" || w == "wks") return "weeks";
    return std::nullopt;
}

// Elements after phrase recognition.
enum class El { Node, Compare, And, Or, Not, Temporal };

struct Element {
    El kind;
    std::optional<LfNode> node;
    std::vector<LfNode> comparisons;  // eq(...) calls for Compare
    std::string temporal;             // within, before, after, caused_by
    std::string window_value, window_unit;
};

LfNode eq_node(reason::CompareOp op, const std::string& value) {
    return LfNode::call("eq", {LfNode::call("op", {LfNode::symbol(reason::to_string(op))}),
                               LfNode::call("val", {LfNode::quoted(value)})});
}

class Phrases {
public:
    explicit Phrases(std::vector<LexToken> toks) : t_(std::move(toks)) {}

    std::vector<Element> run() {
        while (i_ < t_.size()) step();
        return out_;
    }

private:
    std::vector<LexToken> t_;
    std::size_t i_ = 0;
    std::vector<Element> out_;

    bool word_at(std::size_t k, std::string_view w) const {
        return k < t_.size() && (t_[k].kind == Tok::Word || t_[k].kind == Tok::Compare || t_[k].kind == Tok::Punct) &&
               t_[k].text == w;
    }
    bool seq_at(std::size_t k, const std::vector<std::string>& words) const {
        for (std::size_t j = 0; j < words.size(); ++j) {
            if (!word_at(k + j, words[j])) return false;
        }
        return true;
    }
    bool number_at(std::size_t k) const { return k < t_.size() && t_[k].kind == Tok::Number; }
    bool age_word_at(std::size_t k) const {
        if (k < t_.size() && t_[k].kind == Tok::Call) return t_[k].call->is_call("age") && t_[k].call->predicates.empty();
        return word_at(k, "age") || word_at(k, "aged") || word_at(k, "ages");
    }

    void push_node(LfNode n) { out_.push_back({El::Node, std::move(n), {}, "", "", ""}); }
    void push(El k) { out_.push_back({k, std::nullopt, {}, "", "", ""}); }
    void push_compare(std::vector<LfNode> eqs) { out_.push_back({El::Compare, std::nullopt, std::move(eqs), "", "", ""}); }

    /// NUMBER [unit words] ("or"|"and") upward/downward word. Returns the
    /// index past the phrase and whether an age word was skipped.
    std::optional<std::pair<std::size_t, reason::CompareOp>> postfix(std::size_t k, bool* saw_age) const {
        std::size_t j = k + 1;
        while (j < t_.size() && t_[j].kind != Tok::Number && unit_words().contains(t_[j].text)) {
            if (t_[j].text == "age") *saw_age = true;
            ++j;
        }
        if ((word_at(j, "or") || word_at(j, "and")) && j + 1 < t_.size()) {
            if (upward_words().contains(t_[j + 1].text)) return std::pair{j + 2, reason::CompareOp::GTEQ};
            if (downward_words().contains(t_[j + 1].text)) return std::pair{j + 2, reason::CompareOp::LTEQ};
        }
        return std::nullopt;
    }

    std::size_t skip_units(std::size_t j, bool* saw_age) const {
        while (j < t_.size() && t_[j].kind != Tok::Number && unit_words().contains(t_[j].text) &&
               !(t_[j].text == "of" && !(word_at(j + 1, "age")))) {
            if (t_[j].text == "age") *saw_age = true;
            ++j;
        }
        return j;
    }

    void step() {
        const LexToken& tok = t_[i_];
        if (tok.kind == Tok::Call) {
            const LfNode& n = *tok.call;
            if (n.is_call("eq")) {
                push_compare({n});
            } else if (n.is_call("num_filter")) {
                push_compare(n.args);
            } else {
                push_node(n);
            }
            ++i_;
            return;
        }
        // "between N and M"
        if (word_at(i_, "between") && number_at(i_ + 1) && word_at(i_ + 2, "and") && number_at(i_ + 3)) {
            push_compare({eq_node(reason::CompareOp::GTEQ, t_[i_ + 1].text), eq_node(reason::CompareOp::LTEQ, t_[i_ + 3].text)});
            bool saw_age = false;
            i_ = skip_units(i_ + 4, &saw_age);
            if (saw_age) insert_age_before_last();
            return;
        }
        // Prefix comparators, optionally separated from their number by the age word.
        for (const auto& cw : prefix_comparators()) {
            if (!seq_at(i_, cw.words)) continue;
            std::size_t j = i_ + cw.words.size();
            bool age_between = false;
            if (age_word_at(j) || word_at(j, "of")) {
                if (word_at(j, "of")) ++j;
                if (age_word_at(j)) {
                    age_between = true;
                    ++j;
                }
            }
            if (!number_at(j)) continue;
            if (age_between) push_node(LfNode::call("age"));
            push_compare({eq_node(cw.op, t_[j].text)});
            bool saw_age = false;
            i_ = skip_units(j + 1, &saw_age);
            if (saw_age && !age_between) insert_age_before_last();
            return;
        }
        if (tok.kind == Tok::Number) {
            bool saw_age = false;
            if (auto pf = postfix(i_, &saw_age)) {
                push_compare({eq_node(pf->second, tok.text)});
                if (saw_age) insert_age_before_last();
                i_ = pf->first;
                return;
            }
            // "within N units (of|after) Y" handled under the word rules; a
            // bare number is otherwise noise.
            ++i_;
            return;
        }
        if (tok.kind == Tok::Word) {
            const std::string& w = tok.text;
            if (w == "within" && number_at(i_ + 1) && i_ + 2 < t_.size()) {
                if (auto unit = window_unit(t_[i_ + 2].text)) {
                    Element e{El::Temporal, std::nullopt, {}, "within", t_[i_ + 1].text, *unit};
                    out_.push_back(std::move(e));
                    i_ += 3;
                    if (word_at(i_, "of") || word_at(i_, "after") || word_at(i_, "following")) ++i_;
                    return;
                }
            }
            if (w == "after" || w == "following" || (w == "subsequent" && word_at(i_ + 1, "to"))) {
                out_.push_back({El::Temporal, std::nullopt, {}, "after", "", ""});
                i_ += w == "subsequent" ? 2 : 1;
                return;
            }
            if (w == "before" || (w == "prior" && word_at(i_ + 1, "to"))) {
                out_.push_back({El::Temporal, std::nullopt, {}, "before", "", ""});
                i_ += w == "prior" ? 2 : 1;
                return;
            }
            if ((w == "due" || w == "secondary") && word_at(i_ + 1, "to")) {
                out_.push_back({El::Temporal, std::nullopt, {}, "caused_by", "", ""});
                i_ += 2;
                return;
            }
            if (w == "caused" && word_at(i_ + 1, "by")) {
                out_.push_back({El::Temporal, std::nullopt, {}, "caused_by", "", ""});
                i_ += 2;
                return;
            }
            for (const auto& neg : negation_phrases()) {
                if (seq_at(i_, neg)) {
                    push(El::Not);
                    i_ += neg.size();
                    return;
                }
            }
            if (w == "women" || w == "woman" || w == "female" || w == "females" || w == "girls") {
                push_node(LfNode::call("female"));
            } else if (w == "men" || w == "man" || w == "male" || w == "males" || w == "boys") {
                push_node(LfNode::call("male"));
            } else if (w == "age" || w == "aged" || w == "ages") {
                push_node(LfNode::call("age"));
            } else if (w == "and" || w == "with" || w == "who" || w == "having" || w == "plus") {
                if (w == "and" && word_at(i_ + 1, "/") && word_at(i_ + 2, "or")) {
                    push(El::Or);
                    i_ += 3;
                    return;
                }
                push(El::And);
            } else if (w == "or") {
                push(El::Or);
            }
            ++i_;
            return;
        }
        if (tok.text == "," || tok.text == ";" || tok.text == "&") push(El::And);
        ++i_;
    }

    void insert_age_before_last() {
        out_.insert(out_.end() - 1, Element{El::Node, LfNode::call("age"), {}, "", "", ""});
    }
};

bool numeric_target(const LfNode& n) {
    return n.is_call("age") || n.is_call("lab") || n.is_call("obs");
}

bool temporal_target(const LfNode& n) {
    return n.is_call("cond") || n.is_call("obs") || n.is_call("proc") || n.is_call("drug") || n.is_call("lab");
}

void add_comparisons(LfNode& n, std::vector<LfNode> eqs) {
    for (auto& p : n.predicates) {
        if (p.is_call("num_filter")) {
            for (auto& e : eqs) p.args.push_back(std::move(e));
            return;
        }
    }
    n.predicates.push_back(LfNode::call("num_filter", std::move(eqs)));
}

std::size_t prev_node(const std::vector<Element>& els, std::size_t i) {
    return i > 0 && els[i - 1].kind == El::Node ? i - 1 : els.size();
}
std::size_t next_node(const std::vector<Element>& els, std::size_t i) {
    return i + 1 < els.size() && els[i + 1].kind == El::Node ? i + 1 : els.size();
}

LfNode combine(std::vector<Element> els) {
    // Repeated age mentions ("age ... years of age") collapse into one.
    for (std::size_t i = 0; i + 1 < els.size();) {
        if (els[i].kind == El::Node && els[i].node->is_call("age") && els[i].node->predicates.empty()) {
            std::size_t j = i + 1;
            while (j < els.size() && els[j].kind == El::Compare) ++j;
            if (j < els.size() && els[j].kind == El::Node && els[j].node->is_call("age") &&
                (j > i + 1 || els[j].node->predicates.empty())) {
                els.erase(els.begin() + static_cast<std::ptrdiff_t>(j));
                continue;
            }
        }
        ++i;
    }
    // Comparisons bind to the adjacent numeric node, left first.
    for (std::size_t i = 0; i < els.size();) {
        if (els[i].kind != El::Compare) {
            ++i;
            continue;
        }
        std::size_t target = prev_node(els, i);
        if (target == els.size() || !numeric_target(*els[target].node)) target = next_node(els, i);
        if (target == els.size() || !numeric_target(*els[target].node)) {
            throw Untranslatable{"comparison without an age, lab or observation to apply to"};
        }
        add_comparisons(*els[target].node, std::move(els[i].comparisons));
        els.erase(els.begin() + static_cast<std::ptrdiff_t>(i));
    }
    // Temporal markers chain the following node onto the preceding one.
    for (std::size_t i = 0; i < els.size();) {
        if (els[i].kind != El::Temporal) {
            ++i;
            continue;
        }
        std::size_t left = prev_node(els, i), right = next_node(els, i);
        if (left == els.size() || right == els.size() || !temporal_target(*els[left].node)) {
            throw Untranslatable{"temporal phrase '" + els[i].temporal + "' without two events"};
        }
        std::vector<LfNode> args{std::move(*els[right].node)};
        if (els[i].temporal == "within") {
            args.push_back(LfNode::call("val", {LfNode::quoted(els[i].window_value)}));
            args.push_back(LfNode::call("unit", {LfNode::quoted(els[i].window_unit)}));
        }
        els[left].node->predicates.push_back(LfNode::call(els[i].temporal, std::move(args)));
        els.erase(els.begin() + static_cast<std::ptrdiff_t>(right));
        els.erase(els.begin() + static_cast<std::ptrdiff_t>(i));
    }
    // Negation applies to the next node.
    for (std::size_t i = 0; i < els.size();) {
        if (els[i].kind != El::Not) {
            ++i;
            continue;
        }
        std::size_t target = next_node(els, i);
        if (target == els.size()) throw Untranslatable{"negation without a following entity"};
        els[target].node = LfNode::call("not", {std::move(*els[target].node)});
        els.erase(els.begin() + static_cast<std::ptrdiff_t>(i));
    }
    // A gender pair joined by a connective means either gender.
    auto gender = [](const Element& e) {
        return e.kind == El::Node && (e.node->is_call("female") || e.node->is_call("male"));
    };
    for (std::size_t i = 0; i + 2 < els.size(); ++i) {
        if (gender(els[i]) && (els[i + 1].kind == El::And || els[i + 1].kind == El::Or) && gender(els[i + 2]) &&
            els[i].node->name != els[i + 2].node->name) {
            els[i].node = LfNode::call("union", {std::move(*els[i].node), std::move(*els[i + 2].node)});
            els.erase(els.begin() + static_cast<std::ptrdiff_t>(i + 1), els.begin() + static_cast<std::ptrdiff_t>(i + 3));
        }
    }
    // "or" groups bind tighter than "and"; adjacency means "and".
    std::vector<std::vector<LfNode>> groups;
    bool or_pending = false;
    for (auto& e : els) {
        if (e.kind == El::Or) {
            or_pending = !groups.empty();
        } else if (e.kind == El::And) {
            or_pending = false;
        } else if (e.kind == El::Node) {
            if (or_pending) {
                groups.back().push_back(std::move(*e.node));
            } else {
                groups.push_back({std::move(*e.node)});
            }
            or_pending = false;
        }
    }
    if (groups.empty()) throw Untranslatable{"no recognized entities"};
    std::vector<LfNode> conj;
    for (auto& g : groups) {
        conj.push_back(g.size() == 1 ? std::move(g[0]) : LfNode::call("union", std::move(g)));
    }
    return conj.size() == 1 ? std::move(conj[0]) : LfNode::call("intersect", std::move(conj));
}

}  // namespace

Translation translate(std::string_view augmented, Polarity /*polarity*/, const llf::FunctionCatalog& catalog) {
    const std::string low = lower(augmented);
    for (const auto& phrase : blacklist()) {
        if (low.find(phrase) != std::string::npos) {
            return NotTranslatable{"judgement or consent criterion ('" + phrase + "')"};
        }
    }
    try {
        LfNode root = combine(Phrases(lex(augmented, catalog)).run());
        auto diags = llf::validate(root, catalog);
        if (!diags.empty()) return NotTranslatable{"pattern output failed validation: " + diags[0].message};
        llf::assign_span_indices(root);
        return root;
    } catch (const Untranslatable& u) {
        return NotTranslatable{u.reason};
    }
}

}  // namespace cohortc::text
