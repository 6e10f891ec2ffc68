#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tnorm/word.hpp"

namespace tnorm {

namespace detail {

// One DP row. Words are short, so the common case lives on the stack.
class DpRow {
public:
    explicit DpRow(std::size_t n) {
        if (n <= inline_capacity) {
            data_ = inline_.data();
        } else {
            heap_.resize(n);
            data_ = heap_.data();
        }
    }
    DpRow(const DpRow&) = delete;
    DpRow& operator=(const DpRow&) = delete;

    std::size_t& operator[](std::size_t i) noexcept { return data_[i]; }

private:
    static constexpr std::size_t inline_capacity = 72;
    std::array<std::size_t, inline_capacity> inline_;
    std::vector<std::size_t> heap_;
    std::size_t* data_;
};

}  // namespace detail

/// Unit-cost edit distance (insert, delete, substitute).
template <typename CharT>
std::size_t levenshtein(std::basic_string_view<CharT> a, std::basic_string_view<CharT> b) {
    if (a.size() < b.size()) std::swap(a, b);
    // b is the shorter side; the row runs over it
    const std::size_t m = b.size();
    if (m == 0) return a.size();
    detail::DpRow row(m + 1);
    for (std::size_t j = 0; j <= m; ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        const CharT ca = a[i - 1];
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t up = row[j];
            const std::size_t sub = diag + (ca == b[j - 1] ? 0 : 1);
            row[j] = std::min({up + 1, row[j - 1] + 1, sub});
            diag = up;
        }
    }
    return row[m];
}

/// Length of the longest common (not necessarily contiguous) subsequence.
template <typename CharT>
std::size_t lcs_len(std::basic_string_view<CharT> a, std::basic_string_view<CharT> b) {
    if (a.size() < b.size()) std::swap(a, b);
    const std::size_t m = b.size();
    if (m == 0) return 0;
    detail::DpRow row(m + 1);
    for (std::size_t j = 0; j <= m; ++j) row[j] = 0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = 0;
        const CharT ca = a[i - 1];
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t up = row[j];
            row[j] = (ca == b[j - 1]) ? diag + 1 : std::max(up, row[j - 1]);
            diag = up;
        }
    }
    return row[m];
}

/// Normalized LCS similarity: lcs / (min(len a, len b) + levenshtein). In [0,1], 1 iff a == b.
/// Throws std::invalid_argument when either side is empty.
template <typename CharT>
double string_similarity(std::basic_string_view<CharT> a, std::basic_string_view<CharT> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("string_similarity: empty input");
    const auto lcs = static_cast<double>(lcs_len(a, b));
    const auto ld = static_cast<double>(levenshtein(a, b));
    const auto shorter = static_cast<double>(std::min(a.size(), b.size()));
    return lcs / (shorter + ld);
}

inline std::size_t levenshtein(const Word& a, const Word& b) { return levenshtein(a.view(), b.view()); }
inline std::size_t lcs_len(const Word& a, const Word& b) { return lcs_len(a.view(), b.view()); }
inline double string_similarity(const Word& a, const Word& b) { return string_similarity(a.view(), b.view()); }

}  // namespace tnorm
