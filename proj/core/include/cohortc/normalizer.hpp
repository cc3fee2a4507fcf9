#pragma once

// Lexicon-driven concept normalization with semantic-type and tf-idf span
// filtering, plus the LOINC-restricted lab path.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cohortc/error.hpp"
#include "cohortc/kb.hpp"

namespace cohortc::norm {

/// Lowercases and splits on whitespace and punctuation boundaries; each
/// punctuation character is its own token ("covid-19" -> covid, -, 19).
std::vector<std::string> tokenize(std::string_view text);

struct LexiconEntry {
    std::string phrase;  // lowercased
    std::string cui;
    std::set<std::string> semantic_types;
};

class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(std::vector<LexiconEntry> entries);

    /// `phrase<TAB>cui<TAB>semtypes`; `#` comments and blank lines skipped.
    static Lexicon parse(std::string_view text);
    static Lexicon load(const std::filesystem::path& path);

    const std::vector<LexiconEntry>& entries() const { return entries_; }

    /// Entries whose tokenized phrase equals `tokens[begin, end)`.
    std::vector<const LexiconEntry*> lookup(const std::vector<std::string>& tokens,
                                            std::size_t begin, std::size_t end) const;
    std::size_t max_phrase_tokens() const { return max_tokens_; }

private:
    std::vector<LexiconEntry> entries_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_key_;
    std::size_t max_tokens_ = 0;
};

/// Document frequencies over the lexicon's distinct phrases.
class TermStats {
public:
    TermStats() = default;
    explicit TermStats(const Lexicon& lexicon);
    TermStats(std::map<std::string, std::size_t> df, std::size_t total_phrases);

    std::size_t df(std::string_view token) const;
    std::size_t total_phrases() const { return total_; }
    /// ln(total / df) for known tokens, ln(total) for unknown ones.
    double idf(std::string_view token) const;

private:
    std::map<std::string, std::size_t, std::less<>> df_;
    std::size_t total_ = 0;
};

struct CandidateMatch {
    std::string cui;
    std::set<std::size_t> matched_token_indices;
    double matched_tfidf = 0;
    double unmatched_tfidf = 0;
    bool operator==(const CandidateMatch&) const = default;
};

/// Keeps candidates whose matched idf sum is not lower than the unmatched
/// sum; recomputes both sums from `span_tokens`.
std::vector<CandidateMatch> tfidf_filter(std::vector<CandidateMatch> candidates,
                                         const std::vector<std::string>& span_tokens,
                                         const TermStats& stats);

class NoLoincMapping : public Error {
public:
    explicit NoLoincMapping(const std::string& text)
        : Error("NoLoincMapping", "no LOINC-coded concept for '" + text + "'"), text_(text) {}
    const std::string& text() const noexcept { return text_; }

private:
    std::string text_;
};

/// Semantic types accepted when normalizing an entity function's span.
const std::set<std::string>& allowed_semantic_types(std::string_view function);

/// Entity function a semantic type is tagged with; nullopt for types the
/// tagger ignores.
std::optional<std::string> function_for_semantic_type(std::string_view semtype);

/// Holds a reference to the knowledge base, which must outlive it.
class Normalizer {
public:
    Normalizer(Lexicon lexicon, const kb::KnowledgeBase& kb);

    /// Candidates ordered by matched tf-idf (descending), then cui. An empty
    /// `allowed_semtypes` disables the semantic-type filter.
    std::vector<CandidateMatch> normalize(std::string_view text,
                                          const std::set<std::string>& allowed_semtypes) const;

    /// Best candidate whose concept carries a LOINC code.
    CandidateMatch normalize_lab(std::string_view text) const;
    std::optional<CandidateMatch> try_normalize_lab(std::string_view text) const;

    const Lexicon& lexicon() const { return lexicon_; }
    const TermStats& stats() const { return stats_; }
    const kb::KnowledgeBase& knowledge_base() const { return *kb_; }

private:
    Lexicon lexicon_;
    TermStats stats_;
    const kb::KnowledgeBase* kb_;
};

}  // namespace cohortc::norm
