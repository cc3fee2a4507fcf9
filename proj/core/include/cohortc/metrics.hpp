#pragma once

// Sentence-level BLEU and ROUGE-L over logical-form strings.

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cohortc/error.hpp"

namespace cohortc::metrics {

/// Zero-match n-gram orders contribute (0 + epsilon) / total instead of 0.
inline constexpr double kSmoothingEpsilon = 1e-9;

class EmptyReference : public Error {
public:
    EmptyReference() : Error("EmptyReference", "reference has no tokens") {}
};

class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("EmptyCorpus", "no candidate/reference pairs") {}
};

/// Splits on whitespace after padding `(` `)` `,` `.` and `"` into
/// standalone tokens.
std::vector<std::string> tokenize(std::string_view text);

/// exp(1 - r/c) when the candidate is shorter than the reference, else 1.
double brevity_penalty(std::size_t candidate_length, std::size_t reference_length);

/// Clipped modified n-gram precision for one order: {matches, total}.
std::pair<std::size_t, std::size_t> clipped_precision(const std::vector<std::string>& candidate,
                                                      const std::vector<std::string>& reference,
                                                      std::size_t n);

/// Geometric mean of clipped precisions for orders 1..min(max_n, |candidate|)
/// times the brevity penalty. An empty candidate scores 0.
double bleu(std::string_view candidate, std::string_view reference, int max_n = 4);

struct RougeL {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
};

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

RougeL rouge_l(std::string_view candidate, std::string_view reference);

struct ScoredPair {
    std::vector<std::string> candidate;
    std::vector<std::string> reference;
    double bleu = 0;
    double rouge_l_f1 = 0;
};

ScoredPair score_pair(std::string_view candidate, std::string_view reference);

/// Mean sentence-level BLEU over the pairs.
double corpus_agreement(std::span<const std::pair<std::string, std::string>> pairs);

}  // namespace cohortc::metrics
