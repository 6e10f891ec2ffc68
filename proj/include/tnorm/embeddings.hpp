#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tnorm/errors.hpp"
#include "tnorm/word.hpp"

namespace tnorm {

// Immutable word -> dense vector table. Norms are precomputed; zero vectors are never stored.
class EmbeddingStore {
public:
    EmbeddingStore() = default;
    explicit EmbeddingStore(std::size_t dimension) : dimension_(dimension) {}

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return norms_.size(); }
    bool empty() const noexcept { return norms_.empty(); }

    std::optional<std::size_t> find(const Word& w) const {
        auto it = index_.find(w);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    bool contains(const Word& w) const { return index_.contains(w); }

    std::span<const float> vector(std::size_t row) const {
        return {values_.data() + row * dimension_, dimension_};
    }
    double norm(std::size_t row) const { return norms_[row]; }

    /// Cosine of two stored rows clamped to [0,1]; a row against itself is exactly 1.
    double cosine(std::size_t a, std::size_t b) const {
        if (a == b) return 1.0;
        const float* va = values_.data() + a * dimension_;
        const float* vb = values_.data() + b * dimension_;
        double dot = 0.0;
        for (std::size_t d = 0; d < dimension_; ++d) dot += static_cast<double>(va[d]) * static_cast<double>(vb[d]);
        const double c = dot / (norms_[a] * norms_[b]);
        return std::clamp(c, 0.0, 1.0);
    }

    /// Adds a vector. Returns false (and stores nothing) for duplicates and zero vectors.
    bool insert(const Word& w, std::span<const float> v) {
        if (v.size() != dimension_) throw std::invalid_argument("embedding dimension mismatch");
        if (index_.contains(w)) return false;
        double sq = 0.0;
        for (float x : v) sq += static_cast<double>(x) * static_cast<double>(x);
        if (!(sq > 0.0)) return false;
        index_.emplace(w, norms_.size());
        values_.insert(values_.end(), v.begin(), v.end());
        norms_.push_back(std::sqrt(sq));
        return true;
    }

private:
    std::size_t dimension_ = 0;
    std::vector<float> values_;
    std::vector<double> norms_;
    std::unordered_map<Word, std::size_t, WordHash> index_;
};

struct EmbeddingLoad {
    EmbeddingStore store;
    std::size_t duplicates = 0;
    std::size_t zero_norm = 0;
};

namespace detail {

inline std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        if (i == line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ') ++j;
        fields.push_back(line.substr(i, j - i));
        i = j;
    }
    return fields;
}

inline bool parse_unsigned(std::string_view s, std::size_t& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_float(std::string_view s, float& out) {
    double d = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(d)) return false;
    out = static_cast<float>(d);
    return true;
}

}  // namespace detail

/// Reads the plain-text vector format: an optional "<count> <dimension>" header,
/// then "word v1 v2 ... vd" per line. Words are lowercased; the first occurrence
/// of a duplicate wins and zero vectors are skipped, both counted in the result.
inline EmbeddingLoad load_embeddings(std::istream& in, const std::string& source = "<embeddings>") {
    EmbeddingLoad out;
    std::optional<std::size_t> dim;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    std::vector<float> values;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        auto fields = detail::split_spaces(view);
        if (fields.empty()) continue;
        if (first_content) {
            first_content = false;
            std::size_t count = 0;
            std::size_t header_dim = 0;
            if (fields.size() == 2 && detail::parse_unsigned(fields[0], count) &&
                detail::parse_unsigned(fields[1], header_dim)) {
                if (header_dim == 0) throw FormatError(source, line_no, "header declares zero dimension");
                dim = header_dim;
                continue;
            }
        }
        if (fields.size() < 2) throw FormatError(source, line_no, "expected a word followed by vector values");
        const std::size_t line_dim = fields.size() - 1;
        if (!dim) {
            dim = line_dim;
        } else if (*dim != line_dim) {
            throw FormatError(source, line_no,
                              "dimension mismatch: expected " + std::to_string(*dim) + ", got " +
                                  std::to_string(line_dim));
        }
        if (out.store.empty() && out.store.dimension() != *dim) out.store = EmbeddingStore(*dim);
        values.resize(line_dim);
        for (std::size_t k = 0; k < line_dim; ++k) {
            if (!detail::parse_float(fields[k + 1], values[k]))
                throw FormatError(source, line_no, "unparseable number '" + std::string(fields[k + 1]) + "'");
        }
        const Word w = Word::from_utf8(fields[0]);
        if (out.store.contains(w)) {
            ++out.duplicates;
            continue;
        }
        if (!out.store.insert(w, values)) ++out.zero_norm;
    }
    if (dim && out.store.dimension() != *dim) out.store = EmbeddingStore(*dim);
    return out;
}

/// Clamped cosine similarity; nullopt when either word has no vector.
inline std::optional<double> contextual_similarity(const EmbeddingStore& store, const Word& a, const Word& b) {
    const auto ia = store.find(a);
    if (!ia) return std::nullopt;
    const auto ib = store.find(b);
    if (!ib) return std::nullopt;
    return store.cosine(*ia, *ib);
}

}  // namespace tnorm
