#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tnorm/embeddings.hpp"
#include "tnorm/parallel.hpp"
#include "tnorm/phonetics.hpp"
#include "tnorm/textsim.hpp"
#include "tnorm/word.hpp"

namespace tnorm {

// Contextual, phonetic and string similarity of one (OOV, IV) pair, stored
// compactly as floats. Contextual and phonetic may be undefined; string never is.
class ComponentTriple {
public:
    ComponentTriple() = default;
    ComponentTriple(std::optional<double> contextual, std::optional<double> phonetic, double string)
        : contextual_(static_cast<float>(contextual.value_or(0.0))),
          phonetic_(static_cast<float>(phonetic.value_or(0.0))),
          string_(static_cast<float>(string)),
          flags_(static_cast<std::uint8_t>((contextual ? has_contextual_bit : 0) | (phonetic ? has_phonetic_bit : 0))) {
        check(contextual_);
        check(phonetic_);
        check(string_);
    }

    std::optional<double> contextual() const {
        if (!has_contextual()) return std::nullopt;
        return contextual_;
    }
    std::optional<double> phonetic() const {
        if (!has_phonetic()) return std::nullopt;
        return phonetic_;
    }
    double string() const noexcept { return string_; }

    bool has_contextual() const noexcept { return flags_ & has_contextual_bit; }
    bool has_phonetic() const noexcept { return flags_ & has_phonetic_bit; }

    float contextual_raw() const noexcept { return contextual_; }
    float phonetic_raw() const noexcept { return phonetic_; }

    friend bool operator==(const ComponentTriple&, const ComponentTriple&) = default;

private:
    static constexpr std::uint8_t has_contextual_bit = 1;
    static constexpr std::uint8_t has_phonetic_bit = 2;

    static void check(float v) {
        if (!(v >= 0.0f && v <= 1.0f)) throw std::invalid_argument("component similarity outside [0,1]");
    }

    float contextual_ = 0.0f;
    float phonetic_ = 0.0f;
    float string_ = 0.0f;
    std::uint8_t flags_ = 0;
};

// Weights of the three components; each in [0,1], at least one positive.
class SimilarityWeights {
public:
    SimilarityWeights(double contextual, double phonetic, double string)
        : contextual_(contextual), phonetic_(phonetic), string_(string) {
        for (double w : {contextual, phonetic, string}) {
            if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("similarity weights must lie in [0,1]");
        }
        if (!(contextual > 0.0 || phonetic > 0.0 || string > 0.0))
            throw std::invalid_argument("at least one similarity weight must be positive");
    }

    double contextual() const noexcept { return contextual_; }
    double phonetic() const noexcept { return phonetic_; }
    double string() const noexcept { return string_; }

    friend bool operator==(const SimilarityWeights&, const SimilarityWeights&) = default;

private:
    double contextual_;
    double phonetic_;
    double string_;
};

/// Weighted mean of the defined components. An undefined component contributes
/// neither to the numerator nor to the weight sum; if no weight remains the result is 0.
inline double combine(const ComponentTriple& t, const SimilarityWeights& w) noexcept {
    const double wc = t.has_contextual() ? w.contextual() : 0.0;
    const double wp = t.has_phonetic() ? w.phonetic() : 0.0;
    const double num = wc * static_cast<double>(t.contextual_raw()) + wp * static_cast<double>(t.phonetic_raw()) +
                       w.string() * t.string();
    const double den = wc + wp + w.string();
    return den > 0.0 ? num / den : 0.0;
}

namespace probe {

// Number of component triples computed from scratch since process start.
inline std::atomic<std::uint64_t> component_evaluations{0};

inline std::uint64_t component_evaluation_count() noexcept {
    return component_evaluations.load(std::memory_order_relaxed);
}

}  // namespace probe

namespace detail {

struct WordFeatures {
    PhoneticCodes codes;
    std::optional<std::size_t> embedding;
};

inline WordFeatures features_of(const Word& w, const EmbeddingStore& store, std::size_t max_code_len) {
    return {encode(w, max_code_len), store.find(w)};
}

inline ComponentTriple triple_from_features(const Word& o, const WordFeatures& fo, const Word& i,
                                           const WordFeatures& fi, const EmbeddingStore& store) {
    std::optional<double> contextual;
    if (fo.embedding && fi.embedding) contextual = store.cosine(*fo.embedding, *fi.embedding);
    return {contextual, phonetic_similarity(fo.codes, fi.codes), string_similarity(o, i)};
}

}  // namespace detail

inline ComponentTriple component_triple(const Word& o, const Word& i, const EmbeddingStore& store,
                                        std::size_t max_code_len = default_max_code_len) {
    probe::component_evaluations.fetch_add(1, std::memory_order_relaxed);
    return detail::triple_from_features(o, detail::features_of(o, store, max_code_len), i,
                                        detail::features_of(i, store, max_code_len), store);
}

// Dense |OOV| x |IV| cache of component triples, row-major by OOV.
class ComponentMatrix {
public:
    ComponentMatrix(std::vector<Word> oov_index, std::vector<Word> iv_index, std::vector<ComponentTriple> triples)
        : oov_(std::move(oov_index)), iv_(std::move(iv_index)), triples_(std::move(triples)) {
        if (triples_.size() != oov_.size() * iv_.size())
            throw std::invalid_argument("component matrix size does not match its indexes");
        for (std::size_t j = 0; j < oov_.size(); ++j) row_of_.emplace(oov_[j], j);
    }

    const std::vector<Word>& oov_index() const noexcept { return oov_; }
    const std::vector<Word>& iv_index() const noexcept { return iv_; }
    std::size_t rows() const noexcept { return oov_.size(); }
    std::size_t cols() const noexcept { return iv_.size(); }

    std::span<const ComponentTriple> row(std::size_t j) const {
        return {triples_.data() + j * iv_.size(), iv_.size()};
    }
    const ComponentTriple& at(std::size_t j, std::size_t k) const { return triples_[j * iv_.size() + k]; }

    std::optional<std::size_t> row_of(const Word& oov) const {
        auto it = row_of_.find(oov);
        if (it == row_of_.end()) return std::nullopt;
        return it->second;
    }

    /// Copy of the rows for `words`, in that order. Throws if a word has no row.
    ComponentMatrix select_rows(std::span<const Word> words) const {
        std::vector<ComponentTriple> out;
        out.reserve(words.size() * iv_.size());
        for (const auto& w : words) {
            auto j = row_of(w);
            if (!j) throw std::invalid_argument("select_rows: '" + w.utf8() + "' has no row");
            auto r = row(*j);
            out.insert(out.end(), r.begin(), r.end());
        }
        return {std::vector<Word>(words.begin(), words.end()), iv_, std::move(out)};
    }

private:
    std::vector<Word> oov_;
    std::vector<Word> iv_;
    std::vector<ComponentTriple> triples_;
    std::unordered_map<Word, std::size_t, WordHash> row_of_;
};

/// Computes every (OOV, IV) triple, parallel over OOV rows. Word features
/// (codes, embedding rows) are computed once per word.
inline ComponentMatrix build_component_matrix(std::vector<Word> oov, std::vector<Word> iv, const EmbeddingStore& store,
                                              std::size_t max_code_len = default_max_code_len) {
    if (oov.empty() || iv.empty()) throw std::invalid_argument("build_component_matrix: empty word list");
    auto require_unique = [](const std::vector<Word>& words, const char* what) {
        std::unordered_set<Word, WordHash> seen;
        for (const auto& w : words) {
            if (!seen.insert(w).second)
                throw std::invalid_argument(std::string("build_component_matrix: duplicate ") + what + " '" +
                                            w.utf8() + "'");
        }
    };
    require_unique(oov, "OOV word");
    require_unique(iv, "IV word");

    std::vector<detail::WordFeatures> oov_features(oov.size());
    std::vector<detail::WordFeatures> iv_features(iv.size());
    parallel_for(oov.size(), [&](std::size_t j) { oov_features[j] = detail::features_of(oov[j], store, max_code_len); }, 64);
    parallel_for(iv.size(), [&](std::size_t k) { iv_features[k] = detail::features_of(iv[k], store, max_code_len); }, 64);

    const std::size_t cols = iv.size();
    std::vector<ComponentTriple> triples(oov.size() * cols);
    parallel_for(oov.size(), [&](std::size_t j) {
        ComponentTriple* out = triples.data() + j * cols;
        for (std::size_t k = 0; k < cols; ++k)
            out[k] = detail::triple_from_features(oov[j], oov_features[j], iv[k], iv_features[k], store);
        probe::component_evaluations.fetch_add(cols, std::memory_order_relaxed);
    });
    return {std::move(oov), std::move(iv), std::move(triples)};
}

}  // namespace tnorm
