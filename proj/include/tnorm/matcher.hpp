#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tnorm/similarity.hpp"
#include "tnorm/word.hpp"

namespace tnorm {

class MatchParams {
public:
    MatchParams(SimilarityWeights weights, double threshold, std::size_t k = 1)
        : weights_(weights), threshold_(threshold), k_(k) {
        if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must satisfy 0 < t < 1");
        if (k < 1) throw std::invalid_argument("K must be at least 1");
    }

    const SimilarityWeights& weights() const noexcept { return weights_; }
    double threshold() const noexcept { return threshold_; }
    std::size_t k() const noexcept { return k_; }

private:
    SimilarityWeights weights_;
    double threshold_;
    std::size_t k_;
};

struct Candidate {
    Word iv;
    double score;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

using CandidateList = std::vector<Candidate>;

// Per-OOV ranked candidates. Unmatched OOV words keep an empty list.
class MatchResult {
public:
    explicit MatchResult(std::size_t k = 1) : k_(k) {}

    void add(Word oov, CandidateList list) {
        if (list.size() > k_) throw std::invalid_argument("candidate list longer than K");
        if (!index_.emplace(oov, oov_.size()).second)
            throw std::invalid_argument("duplicate OOV word '" + oov.utf8() + "' in match result");
        oov_.push_back(std::move(oov));
        lists_.push_back(std::move(list));
    }

    std::size_t k() const noexcept { return k_; }
    std::size_t size() const noexcept { return oov_.size(); }
    const Word& oov(std::size_t j) const { return oov_[j]; }
    const CandidateList& candidates(std::size_t j) const { return lists_[j]; }

    const CandidateList* find(const Word& oov) const {
        auto it = index_.find(oov);
        return it == index_.end() ? nullptr : &lists_[it->second];
    }

    std::size_t matched_count() const {
        return static_cast<std::size_t>(
            std::count_if(lists_.begin(), lists_.end(), [](const auto& l) { return !l.empty(); }));
    }

    friend bool operator==(const MatchResult& a, const MatchResult& b) {
        return a.k_ == b.k_ && a.oov_ == b.oov_ && a.lists_ == b.lists_;
    }

private:
    std::size_t k_;
    std::vector<Word> oov_;
    std::vector<CandidateList> lists_;
    std::unordered_map<Word, std::size_t, WordHash> index_;
};

/// Top-K IV candidates of one OOV row with score >= t, best first; equal
/// scores are ordered by ascending IV word.
inline CandidateList match_word(std::span<const ComponentTriple> row, std::span<const Word> iv_index,
                                const MatchParams& params) {
    if (row.size() != iv_index.size()) throw std::invalid_argument("match_word: row length differs from IV index");
    struct Scored {
        double score;
        std::size_t k;
    };
    std::vector<Scored> kept;
    for (std::size_t k = 0; k < row.size(); ++k) {
        const double s = combine(row[k], params.weights());
        if (s >= params.threshold()) kept.push_back({s, k});
    }
    auto better = [&](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return iv_index[a.k] < iv_index[b.k];
    };
    const std::size_t keep = std::min(params.k(), kept.size());
    std::partial_sort(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(keep), kept.end(), better);
    CandidateList out;
    out.reserve(keep);
    for (std::size_t r = 0; r < keep; ++r) out.push_back({iv_index[kept[r].k], kept[r].score});
    return out;
}

/// Matches every OOV row of the matrix. Rows run in parallel; output is in row order.
inline MatchResult match_all(const ComponentMatrix& matrix, const MatchParams& params) {
    std::vector<CandidateList> lists(matrix.rows());
    const auto& iv = matrix.iv_index();
    parallel_for(matrix.rows(), [&](std::size_t j) { lists[j] = match_word(matrix.row(j), iv, params); }, 8);
    MatchResult result(params.k());
    for (std::size_t j = 0; j < matrix.rows(); ++j) result.add(matrix.oov_index()[j], std::move(lists[j]));
    return result;
}

/// IV tokens and unmatched OOV tokens pass through; matched OOV tokens become their rank-1 IV word.
inline std::vector<Word> apply_normalization(std::span<const Word> tokens,
                                             const std::unordered_set<Word, WordHash>& iv_set,
                                             const MatchResult& result) {
    std::vector<Word> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
        if (iv_set.contains(tok)) {
            out.push_back(tok);
            continue;
        }
        const CandidateList* list = result.find(tok);
        out.push_back(list && !list->empty() ? list->front().iv : tok);
    }
    return out;
}

/// Predictions TSV: "oov<TAB>iv<TAB>score" per matched pair, score with 6 decimals.
inline void write_predictions(std::ostream& out, const MatchResult& result) {
    char score[32];
    for (std::size_t j = 0; j < result.size(); ++j) {
        for (const auto& c : result.candidates(j)) {
            std::snprintf(score, sizeof score, "%.6f", c.score);
            out << result.oov(j).utf8() << '\t' << c.iv.utf8() << '\t' << score << '\n';
        }
    }
}

}  // namespace tnorm
