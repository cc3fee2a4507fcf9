#pragma once

// Deterministic text front end: a lexicon entity tagger that produces
// augmented criteria and a pattern translator from augmented text to
// logical forms. Both sit behind plain functions so a model-backed
// translator can replace them.

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cohortc/llf.hpp"
#include "cohortc/normalizer.hpp"

namespace cohortc::text {

struct Span {
    std::size_t start = 0;  // byte offsets into the original text
    std::size_t end = 0;
    std::string function;
    bool operator==(const Span&) const = default;
};

struct AugmentedCriterion {
    std::string original;
    std::string augmented;
    std::vector<Span> spans;  // ordered, non-overlapping
};

/// `fn("text")` with embedded quotes escaped.
std::string render_span(std::string_view function, std::string_view text);

/// Longest match, left to right. Text already inside a catalog call such as
/// `cond("...")` is copied through untouched, which makes this idempotent.
AugmentedCriterion augment(std::string_view text, const norm::Lexicon& lexicon);

struct NotTranslatable {
    std::string reason;
    bool operator==(const NotTranslatable&) const = default;
};

using Translation = std::variant<llf::LfNode, NotTranslatable>;

/// Applies the documented sentence patterns (docs/patterns.md). Accepts
/// both tagger output and hand-augmented text containing demographic and
/// comparison calls.
Translation translate(std::string_view augmented, llf::Polarity polarity,
                      const llf::FunctionCatalog& catalog);

inline Translation translate(const AugmentedCriterion& aug, llf::Polarity polarity,
                             const llf::FunctionCatalog& catalog) {
    return translate(aug.augmented, polarity, catalog);
}

}  // namespace cohortc::text
