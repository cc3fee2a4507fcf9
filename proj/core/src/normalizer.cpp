#include "cohortc/normalizer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "util.hpp"

namespace cohortc::norm {

namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string join_key(const std::vector<std::string>& tokens, std::size_t b, std::size_t e) {
    std::string key;
    for (std::size_t i = b; i < e; ++i) {
        if (i > b) key.push_back(' ');
        key += tokens[i];
    }
    return key;
}

std::string key_of(std::string_view phrase) {
    auto t = tokenize(phrase);
    return join_key(t, 0, t.size());
}

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
    return std::any_of(a.begin(), a.end(), [&](const std::string& s) { return b.contains(s); });
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) out.push_back(std::move(word));
        word.clear();
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
        } else if (is_word_byte(c)) {
            word.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
            out.emplace_back(1, static_cast<char>(c));
        }
    }
    flush();
    return out;
}

// ---------------------------------------------------------------------------

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        auto tokens = tokenize(entries_[i].phrase);
        if (tokens.empty()) continue;
        max_tokens_ = std::max(max_tokens_, tokens.size());
        by_key_[join_key(tokens, 0, tokens.size())].push_back(i);
    }
}

Lexicon Lexicon::parse(std::string_view text) {
    std::vector<LexiconEntry> entries;
    std::size_t lineno = 0;
    for (const auto& line : detail::split(text, '\n')) {
        ++lineno;
        if (detail::skip_line(line)) continue;
        auto f = detail::split(line, '\t');
        if (f.size() != 3) throw LineError("ParseError", lineno, "expected phrase<TAB>cui<TAB>semtypes");
        LexiconEntry e;
        for (char c : detail::trim(f[0])) e.phrase.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        e.cui = detail::trim(f[1]);
        for (const auto& t : detail::split(detail::trim(f[2]), ',')) {
            auto st = detail::trim(t);
            if (!st.empty()) e.semantic_types.insert(st);
        }
        if (e.phrase.empty() || e.cui.empty()) throw LineError("ParseError", lineno, "empty phrase or cui");
        entries.push_back(std::move(e));
    }
    return Lexicon(std::move(entries));
}

Lexicon Lexicon::load(const std::filesystem::path& path) { return parse(detail::read_file(path)); }

std::vector<const LexiconEntry*> Lexicon::lookup(const std::vector<std::string>& tokens,
                                                 std::size_t begin, std::size_t end) const {
    std::vector<const LexiconEntry*> out;
    auto it = by_key_.find(join_key(tokens, begin, end));
    if (it == by_key_.end()) return out;
    for (auto i : it->second) out.push_back(&entries_[i]);
    return out;
}

// ---------------------------------------------------------------------------

TermStats::TermStats(const Lexicon& lexicon) {
    std::set<std::string> phrases;
    for (const auto& e : lexicon.entries()) phrases.insert(key_of(e.phrase));
    total_ = phrases.size();
    for (const auto& p : phrases) {
        std::set<std::string> seen;
        for (auto& t : detail::split(p, ' ')) {
            if (seen.insert(t).second) ++df_[t];
        }
    }
}

TermStats::TermStats(std::map<std::string, std::size_t> df, std::size_t total_phrases)
    : df_(df.begin(), df.end()), total_(total_phrases) {}

std::size_t TermStats::df(std::string_view token) const {
    auto it = df_.find(token);
    return it == df_.end() ? 0 : it->second;
}

double TermStats::idf(std::string_view token) const {
    if (total_ == 0) return 0;
    auto d = df(token);
    if (d == 0) return std::log(static_cast<double>(total_));
    return std::log(static_cast<double>(total_) / static_cast<double>(d));
}

std::vector<CandidateMatch> tfidf_filter(std::vector<CandidateMatch> candidates,
                                         const std::vector<std::string>& span_tokens,
                                         const TermStats& stats) {
    std::vector<CandidateMatch> out;
    for (auto& c : candidates) {
        double matched = 0, unmatched = 0;
        for (std::size_t i = 0; i < span_tokens.size(); ++i) {
            (c.matched_token_indices.contains(i) ? matched : unmatched) += stats.idf(span_tokens[i]);
        }
        c.matched_tfidf = matched;
        c.unmatched_tfidf = unmatched;
        // Removal needs strictly lower; ties stay.
        if (!(matched < unmatched)) out.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------

const std::set<std::string>& allowed_semantic_types(std::string_view function) {
    static const std::set<std::string> cond{"dsyn", "neop", "mobd", "inpo", "acab", "cgab",
                                            "patf", "sosy", "fndg"};
    static const std::set<std::string> obs{"fndg", "sosy", "clna", "inbe", "orgf", "phsf", "lbtr"};
    static const std::set<std::string> proc{"topp", "diap", "thep"};
    static const std::set<std::string> drug{"phsu", "antb", "clnd"};
    static const std::set<std::string> lab{"lbpr", "lbtr", "clna"};
    static const std::set<std::string> allergy{"dsyn", "phsu", "antb"};
    static const std::set<std::string> none;
    if (function == "cond") return cond;
    if (function == "obs") return obs;
    if (function == "proc") return proc;
    if (function == "drug") return drug;
    if (function == "lab") return lab;
    if (function == "allergy") return allergy;
    return none;
}

std::optional<std::string> function_for_semantic_type(std::string_view t) {
    static const std::map<std::string, std::string, std::less<>> table{
        {"dsyn", "cond"}, {"neop", "cond"}, {"mobd", "cond"}, {"inpo", "cond"}, {"acab", "cond"},
        {"cgab", "cond"}, {"patf", "cond"}, {"sosy", "obs"},  {"fndg", "obs"},  {"clna", "obs"},
        {"inbe", "obs"},  {"orgf", "obs"},  {"phsf", "obs"},  {"topp", "proc"}, {"diap", "proc"},
        {"thep", "proc"}, {"phsu", "drug"}, {"antb", "drug"}, {"clnd", "drug"}, {"lbpr", "lab"},
        {"lbtr", "lab"},
    };
    auto it = table.find(t);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------

Normalizer::Normalizer(Lexicon lexicon, const kb::KnowledgeBase& kb)
    : lexicon_(std::move(lexicon)), stats_(lexicon_), kb_(&kb) {}

std::vector<CandidateMatch> Normalizer::normalize(std::string_view text,
                                                  const std::set<std::string>& allowed) const {
    auto tokens = tokenize(text);
    struct Hit {
        std::size_t begin, end;
        const LexiconEntry* entry;
    };
    std::vector<Hit> hits;
    for (std::size_t b = 0; b < tokens.size(); ++b) {
        auto last = std::min(tokens.size(), b + lexicon_.max_phrase_tokens());
        for (std::size_t e = b + 1; e <= last; ++e) {
            for (auto* entry : lexicon_.lookup(tokens, b, e)) {
                if (allowed.empty() || intersects(entry->semantic_types, allowed)) {
                    hits.push_back({b, e, entry});
                }
            }
        }
    }
    // A hit strictly inside a longer one is shadowed by it.
    auto shadowed = [&](const Hit& h) {
        return std::any_of(hits.begin(), hits.end(), [&](const Hit& o) {
            return o.begin <= h.begin && h.end <= o.end && (o.end - o.begin) > (h.end - h.begin);
        });
    };
    std::map<std::string, CandidateMatch> by_cui;
    for (const auto& h : hits) {
        if (shadowed(h)) continue;
        auto& c = by_cui[h.entry->cui];
        c.cui = h.entry->cui;
        for (auto i = h.begin; i < h.end; ++i) c.matched_token_indices.insert(i);
    }
    std::vector<CandidateMatch> candidates;
    for (auto& [_, c] : by_cui) candidates.push_back(std::move(c));
    auto kept = tfidf_filter(std::move(candidates), tokens, stats_);
    std::stable_sort(kept.begin(), kept.end(), [](const CandidateMatch& a, const CandidateMatch& b) {
        if (a.matched_tfidf != b.matched_tfidf) return a.matched_tfidf > b.matched_tfidf;
        return a.cui < b.cui;
    });
    return kept;
}

std::optional<CandidateMatch> Normalizer::try_normalize_lab(std::string_view text) const {
    for (auto& c : normalize(text, {})) {
        const auto* concept_ = kb_->find(c.cui);
        if (concept_ && concept_->has_system(kb::CodeSystem::LOINC)) return c;
    }
    return std::nullopt;
}

CandidateMatch Normalizer::normalize_lab(std::string_view text) const {
    auto c = try_normalize_lab(text);
    if (!c) throw NoLoincMapping(std::string(text));
    return *c;
}

}  // namespace cohortc::norm
