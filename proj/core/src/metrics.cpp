#include "cohortc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cohortc::metrics {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            flush();
        } else if (c == '(' || c == ')' || c == ',' || c == '.' || c == '"') {
            flush();
            out.emplace_back(1, c);
        } else {
            cur += c;
        }
    }
    flush();
    return out;
}

double brevity_penalty(std::size_t candidate_length, std::size_t reference_length) {
    if (candidate_length == 0) return 0.0;
    if (candidate_length >= reference_length) return 1.0;
    return std::exp(1.0 - static_cast<double>(reference_length) / static_cast<double>(candidate_length));
}

namespace {

using NGramCounts = std::map<std::vector<std::string>, std::size_t>;

NGramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
    NGramCounts counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
    }
    return counts;
}

}  // namespace

std::pair<std::size_t, std::size_t> clipped_precision(const std::vector<std::string>& candidate,
                                                      const std::vector<std::string>& reference,
                                                      std::size_t n) {
    auto cand = count_ngrams(candidate, n);
    auto ref = count_ngrams(reference, n);
    std::size_t matches = 0, total = 0;
    for (const auto& [gram, count] : cand) {
        total += count;
        auto it = ref.find(gram);
        if (it != ref.end()) matches += std::min(count, it->second);
    }
    return {matches, total};
}

double bleu(std::string_view candidate, std::string_view reference, int max_n) {
    if (max_n < 1) throw Error("InvalidArgument", "max_n must be at least 1");
    auto ref = tokenize(reference);
    if (ref.empty()) throw EmptyReference();
    auto cand = tokenize(candidate);
    if (cand.empty()) return 0.0;

    const std::size_t orders = std::min<std::size_t>(static_cast<std::size_t>(max_n), cand.size());
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= orders; ++n) {
        auto [matches, total] = clipped_precision(cand, ref, n);
        double p = matches > 0 ? static_cast<double>(matches) / static_cast<double>(total)
                               : kSmoothingEpsilon / static_cast<double>(total);
        log_sum += std::log(p);
    }
    return brevity_penalty(cand.size(), ref.size()) * std::exp(log_sum / static_cast<double>(orders));
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

RougeL rouge_l(std::string_view candidate, std::string_view reference) {
    auto ref = tokenize(reference);
    if (ref.empty()) throw EmptyReference();
    auto cand = tokenize(candidate);
    RougeL r;
    if (cand.empty()) return r;
    const double l = static_cast<double>(lcs_length(cand, ref));
    r.precision = l / static_cast<double>(cand.size());
    r.recall = l / static_cast<double>(ref.size());
    r.f1 = (r.precision + r.recall) > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

ScoredPair score_pair(std::string_view candidate, std::string_view reference) {
    ScoredPair s;
    s.candidate = tokenize(candidate);
    s.reference = tokenize(reference);
    s.bleu = bleu(candidate, reference);
    s.rouge_l_f1 = rouge_l(candidate, reference).f1;
    return s;
}

double corpus_agreement(std::span<const std::pair<std::string, std::string>> pairs) {
    if (pairs.empty()) throw EmptyCorpus();
    double sum = 0.0;
    for (const auto& [cand, ref] : pairs) sum += bleu(cand, ref);
    return sum / static_cast<double>(pairs.size());
}

}  // namespace cohortc::metrics
