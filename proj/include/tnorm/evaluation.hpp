#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tnorm/errors.hpp"
#include "tnorm/matcher.hpp"
#include "tnorm/similarity.hpp"
#include "tnorm/word.hpp"

namespace tnorm {

// Labeled OOV -> IV mappings, one target per OOV word.
class GoldDataset {
public:
    GoldDataset() = default;

    explicit GoldDataset(std::span<const std::pair<Word, Word>> entries) {
        for (const auto& [oov, iv] : entries) add(oov, iv);
    }

    void add(Word oov, Word iv) {
        if (oov == iv) throw std::invalid_argument("gold entry maps '" + oov.utf8() + "' to itself");
        if (index_.contains(oov)) throw std::invalid_argument("duplicate gold OOV word '" + oov.utf8() + "'");
        index_.emplace(oov, entries_.size());
        entries_.emplace_back(std::move(oov), std::move(iv));
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<std::pair<Word, Word>>& entries() const noexcept { return entries_; }

    const Word* target(const Word& oov) const {
        auto it = index_.find(oov);
        return it == index_.end() ? nullptr : &entries_[it->second].second;
    }

    std::vector<Word> oov_words() const {
        std::vector<Word> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(e.first);
        return out;
    }

    GoldDataset subset(std::span<const std::size_t> positions) const {
        GoldDataset out;
        for (std::size_t p : positions) out.add(entries_.at(p).first, entries_.at(p).second);
        return out;
    }

private:
    std::vector<std::pair<Word, Word>> entries_;
    std::unordered_map<Word, std::size_t, WordHash> index_;
};

struct GoldLoad {
    GoldDataset gold;
    std::size_t self_mappings = 0;  // oov == iv, skipped
    std::size_t multi_token = 0;    // either side contains a space, skipped
    std::size_t duplicates = 0;     // repeated OOV key, first kept
};

/// Reads "oov<TAB>iv" lines. Blank lines and '#' comments are ignored.
inline GoldLoad load_gold(std::istream& in, const std::string& source = "<gold>") {
    GoldLoad out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view v(line);
        if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
        if (v.empty() || v.front() == '#') continue;
        const auto tab = v.find('\t');
        if (tab == std::string_view::npos) throw FormatError(source, line_no, "expected 'oov<TAB>iv'");
        std::string_view oov = v.substr(0, tab);
        std::string_view iv = v.substr(tab + 1);
        if (iv.find('\t') != std::string_view::npos) throw FormatError(source, line_no, "more than two columns");
        auto trim = [](std::string_view s) {
            while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
            while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
            return s;
        };
        oov = trim(oov);
        iv = trim(iv);
        if (oov.empty() || iv.empty()) throw FormatError(source, line_no, "empty word");
        if (oov.find(' ') != std::string_view::npos || iv.find(' ') != std::string_view::npos) {
            ++out.multi_token;
            continue;
        }
        Word o = Word::from_utf8(oov);
        Word i = Word::from_utf8(iv);
        if (o == i) {
            ++out.self_mappings;
            continue;
        }
        if (out.gold.target(o)) {
            ++out.duplicates;
            continue;
        }
        out.gold.add(std::move(o), std::move(i));
    }
    return out;
}

struct EvalReport {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    std::size_t predicted = 0;
    std::size_t correct = 0;
    std::size_t gold_total = 0;

    /// Precision is 0 when nothing is predicted; F is 0 when P + R is 0.
    static EvalReport from_counts(std::size_t predicted, std::size_t correct, std::size_t gold_total) {
        EvalReport r;
        r.predicted = predicted;
        r.correct = correct;
        r.gold_total = gold_total;
        r.precision = predicted ? static_cast<double>(correct) / static_cast<double>(predicted) : 0.0;
        r.recall = gold_total ? static_cast<double>(correct) / static_cast<double>(gold_total) : 0.0;
        const double pr = r.precision + r.recall;
        r.f_measure = pr > 0.0 ? 2.0 * r.precision * r.recall / pr : 0.0;
        return r;
    }

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Single-mapping evaluation: a prediction is an OOV with a non-empty list, and
/// it is correct when its rank-1 IV equals the gold target.
inline EvalReport evaluate(const MatchResult& result, const GoldDataset& gold) {
    if (result.k() != 1) throw std::invalid_argument("evaluate: defined for K = 1 match results only");
    std::size_t predicted = 0;
    std::size_t correct = 0;
    for (std::size_t j = 0; j < result.size(); ++j) {
        const auto& list = result.candidates(j);
        if (list.empty()) continue;
        ++predicted;
        const Word* t = gold.target(result.oov(j));
        if (t && *t == list.front().iv) ++correct;
    }
    return EvalReport::from_counts(predicted, correct, gold.size());
}

/// Reads a predictions TSV ("oov<TAB>iv[<TAB>score]") back into a K = 1 result.
inline MatchResult read_predictions(std::istream& in, const std::string& source = "<predictions>") {
    MatchResult result(1);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view v(line);
        if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
        if (v.empty() || v.front() == '#') continue;
        const auto t1 = v.find('\t');
        if (t1 == std::string_view::npos) throw FormatError(source, line_no, "expected 'oov<TAB>iv<TAB>score'");
        const auto t2 = v.find('\t', t1 + 1);
        const std::string_view oov = v.substr(0, t1);
        const std::string_view iv = v.substr(t1 + 1, t2 == std::string_view::npos ? std::string_view::npos : t2 - t1 - 1);
        double score = 0.0;
        if (t2 != std::string_view::npos) {
            const std::string_view s = v.substr(t2 + 1);
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), score);
            if (ec != std::errc() || p != s.data() + s.size())
                throw FormatError(source, line_no, "unparseable score '" + std::string(s) + "'");
        }
        if (oov.empty() || iv.empty()) throw FormatError(source, line_no, "empty word");
        Word o = Word::from_utf8(oov);
        if (result.find(o))
            throw FormatError(source, line_no, "OOV '" + o.utf8() + "' predicted more than once (K > 1 is not evaluable)");
        result.add(std::move(o), {{Word::from_utf8(iv), score}});
    }
    return result;
}

namespace detail {

inline constexpr std::size_t no_column = std::numeric_limits<std::size_t>::max();

// Position of each IV word in code-point order, for cheap tie-breaking.
inline std::vector<std::size_t> iv_ranks(const ComponentMatrix& m) {
    const auto& iv = m.iv_index();
    std::vector<std::size_t> order(iv.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return iv[a] < iv[b]; });
    std::vector<std::size_t> rank(iv.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    return rank;
}

// Column of each row's gold target, or no_column when the row has no gold
// entry or its target is not among the IV candidates.
inline std::vector<std::size_t> gold_columns(const ComponentMatrix& m, const GoldDataset& gold) {
    std::unordered_map<Word, std::size_t, WordHash> col;
    for (std::size_t k = 0; k < m.cols(); ++k) col.emplace(m.iv_index()[k], k);
    std::vector<std::size_t> out(m.rows(), no_column);
    for (std::size_t j = 0; j < m.rows(); ++j) {
        if (const Word* t = gold.target(m.oov_index()[j])) {
            auto it = col.find(*t);
            if (it != col.end()) out[j] = it->second;
        }
    }
    return out;
}

struct RowBest {
    double score;
    std::size_t column;
};

// Rank-1 candidate of a row ignoring the threshold; same scores and tie rule as match_word.
inline RowBest best_in_row(std::span<const ComponentTriple> row, std::span<const std::size_t> rank,
                           const SimilarityWeights& w) {
    RowBest best{-1.0, no_column};
    for (std::size_t k = 0; k < row.size(); ++k) {
        const double s = combine(row[k], w);
        if (s > best.score || (s == best.score && rank[k] < rank[best.column])) best = {s, k};
    }
    return best;
}

// Evaluation counts at threshold t given each row's rank-1 candidate. With K = 1
// a row is matched at t exactly when its rank-1 score is >= t.
inline EvalReport report_at(std::span<const RowBest> best, std::span<const std::size_t> gold_col, double t,
                            std::size_t gold_total) {
    std::size_t predicted = 0;
    std::size_t correct = 0;
    for (std::size_t j = 0; j < best.size(); ++j) {
        if (best[j].column == no_column || best[j].score < t) continue;
        ++predicted;
        if (best[j].column == gold_col[j]) ++correct;
    }
    return EvalReport::from_counts(predicted, correct, gold_total);
}

inline void require_threshold_list(std::span<const double> t_values) {
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        if (!(t_values[i] > 0.0 && t_values[i] < 1.0)) throw std::invalid_argument("thresholds must lie in (0,1)");
        if (i > 0 && !(t_values[i] > t_values[i - 1]))
            throw std::invalid_argument("threshold list must be strictly ascending");
    }
}

}  // namespace detail

struct SweepPoint {
    double t;
    EvalReport report;
};

/// K = 1 evaluation at each threshold, reusing one rank-1 pass over the cached components.
inline std::vector<SweepPoint> threshold_sweep(const ComponentMatrix& matrix, const SimilarityWeights& weights,
                                               const GoldDataset& gold, std::span<const double> t_values) {
    detail::require_threshold_list(t_values);
    const auto rank = detail::iv_ranks(matrix);
    const auto gold_col = detail::gold_columns(matrix, gold);
    std::vector<detail::RowBest> best(matrix.rows());
    parallel_for(matrix.rows(), [&](std::size_t j) { best[j] = detail::best_in_row(matrix.row(j), rank, weights); }, 8);
    std::vector<SweepPoint> out;
    out.reserve(t_values.size());
    for (double t : t_values) out.push_back({t, detail::report_at(best, gold_col, t, gold.size())});
    return out;
}

inline void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points) {
    out << "t,precision,recall,f_measure,predicted,correct,gold_total\n";
    char buf[160];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.4f,%.6f,%.6f,%.6f,%zu,%zu,%zu\n", p.t, p.report.precision, p.report.recall,
                      p.report.f_measure, p.report.predicted, p.report.correct, p.report.gold_total);
        out << buf;
    }
}

}  // namespace tnorm
