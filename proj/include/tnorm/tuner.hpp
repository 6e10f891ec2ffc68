#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tnorm/evaluation.hpp"
#include "tnorm/matcher.hpp"
#include "tnorm/parallel.hpp"
#include "tnorm/similarity.hpp"

namespace tnorm {

// Lattice searched by grid_search. Scan order: w_c, w_p, w_s, t (outer to inner), each ascending.
struct GridSpec {
    std::vector<double> weight_values;
    std::vector<double> t_values;

    /// Weights k*step over [0,1]; thresholds k*step over [0.1,0.9]. Values are
    /// computed as k*step from an integer k so they do not accumulate error.
    static GridSpec with_step(double step) {
        if (!(step > 0.0 && step <= 0.5)) throw std::invalid_argument("grid step must lie in (0, 0.5]");
        const auto n = static_cast<long>(std::floor(1.0 / step + 1e-9));
        GridSpec g;
        for (long k = 0; k <= n; ++k) g.weight_values.push_back(round_grid(static_cast<double>(k) * step));
        if (g.weight_values.back() < 1.0 - 1e-9) g.weight_values.push_back(1.0);
        for (long k = 1; k <= n; ++k) {
            const double t = round_grid(static_cast<double>(k) * step);
            if (t >= 0.1 - 1e-9 && t <= 0.9 + 1e-9) g.t_values.push_back(t);
        }
        if (g.t_values.empty()) throw std::invalid_argument("grid step leaves no threshold in [0.1, 0.9]");
        return g;
    }

    static GridSpec defaults() { return with_step(0.1); }

    /// Points evaluated by grid_search: every lattice point except all-zero weight triples.
    std::size_t point_count() const {
        const std::size_t positive = static_cast<std::size_t>(
            std::count_if(weight_values.begin(), weight_values.end(), [](double w) { return w > 0.0; }));
        const std::size_t w = weight_values.size();
        const std::size_t zero = w - positive;
        return (w * w * w - zero * zero * zero) * t_values.size();
    }

    void validate() const {
        if (weight_values.empty() || t_values.empty()) throw std::invalid_argument("grid must be non-empty");
        for (std::size_t i = 0; i < weight_values.size(); ++i) {
            if (!(weight_values[i] >= 0.0 && weight_values[i] <= 1.0))
                throw std::invalid_argument("grid weights must lie in [0,1]");
            if (i > 0 && !(weight_values[i] > weight_values[i - 1]))
                throw std::invalid_argument("grid weights must be strictly ascending");
        }
        if (!(weight_values.back() > 0.0)) throw std::invalid_argument("grid needs a positive weight value");
        detail::require_threshold_list(t_values);
    }

private:
    // Snap to 12 decimals so 0.30000000000000004 becomes the double nearest 0.3.
    static double round_grid(double v) { return std::round(v * 1e12) / 1e12; }
};

struct TunedParams {
    SimilarityWeights weights{1.0, 1.0, 1.0};
    double t = 0.5;
    double training_f = 0.0;
    EvalReport training_report;
    std::size_t evaluated_points = 0;
    // Component triples recomputed while searching; zero because search only reads the cache.
    std::uint64_t component_recomputations = 0;
    bool refined = false;

    MatchParams match_params() const { return {weights, t, 1}; }
};

namespace detail {

// Evaluates every (weights, t) lattice point. Each row is scored once per
// weight triple while it is hot in cache; thresholds then only filter the
// rank-1 score. Counts are integers, so the chunked reduction is exact.
// Returns the scan-order-first F maximum.
inline TunedParams search_lattice(const ComponentMatrix& matrix, const GoldDataset& gold,
                                  std::span<const double> wc_values, std::span<const double> wp_values,
                                  std::span<const double> ws_values, std::span<const double> t_values) {
    if (gold.empty()) throw std::invalid_argument("grid search needs a non-empty gold dataset");
    require_threshold_list(t_values);
    const std::uint64_t probe_before = probe::component_evaluation_count();

    std::vector<SimilarityWeights> weights;
    for (double c : wc_values)
        for (double p : wp_values)
            for (double s : ws_values)
                if (c > 0.0 || p > 0.0 || s > 0.0) weights.emplace_back(c, p, s);
    if (weights.empty()) throw std::invalid_argument("grid contains no weight triple with a positive weight");

    const auto rank = iv_ranks(matrix);
    const auto gold_col = gold_columns(matrix, gold);
    const std::size_t nt = t_values.size();
    const std::size_t points = weights.size() * nt;

    struct Counts {
        std::vector<std::size_t> predicted, correct;
    };
    const std::size_t chunks = std::max<std::size_t>(1, std::min(worker_count() * 4, matrix.rows()));
    std::vector<Counts> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        Counts& acc = partial[c];
        acc.predicted.assign(points, 0);
        acc.correct.assign(points, 0);
        const std::size_t begin = matrix.rows() * c / chunks;
        const std::size_t end = matrix.rows() * (c + 1) / chunks;
        for (std::size_t j = begin; j < end; ++j) {
            const auto row = matrix.row(j);
            for (std::size_t i = 0; i < weights.size(); ++i) {
                const RowBest best = best_in_row(row, rank, weights[i]);
                if (best.column == no_column) continue;
                const bool hit = best.column == gold_col[j];
                // t_values ascending: every threshold up to the rank-1 score matches
                for (std::size_t ti = 0; ti < nt && t_values[ti] <= best.score; ++ti) {
                    ++acc.predicted[i * nt + ti];
                    if (hit) ++acc.correct[i * nt + ti];
                }
            }
        }
    });

    std::vector<EvalReport> reports(points);
    for (std::size_t q = 0; q < points; ++q) {
        std::size_t predicted = 0;
        std::size_t correct = 0;
        for (const auto& acc : partial) {
            predicted += acc.predicted[q];
            correct += acc.correct[q];
        }
        reports[q] = EvalReport::from_counts(predicted, correct, gold.size());
    }

    std::size_t arg = 0;
    for (std::size_t q = 1; q < points; ++q) {
        if (reports[q].f_measure > reports[arg].f_measure) arg = q;
    }
    TunedParams out;
    out.weights = weights[arg / nt];
    out.t = t_values[arg % nt];
    out.training_report = reports[arg];
    out.training_f = reports[arg].f_measure;
    out.evaluated_points = points;
    out.component_recomputations = probe::component_evaluation_count() - probe_before;
    return out;
}

}  // namespace detail

/// Exhaustive K = 1 search maximizing F over the grid. Ties go to the first
/// point in scan order. Only the cached components are read.
inline TunedParams grid_search(const ComponentMatrix& matrix, const GoldDataset& gold,
                               const GridSpec& grid = GridSpec::defaults()) {
    grid.validate();
    return detail::search_lattice(matrix, gold, grid.weight_values, grid.weight_values, grid.weight_values,
                                  grid.t_values);
}

/// Second pass on a 0.01 lattice within +-0.05 of each coarse coordinate
/// (weights clipped to [0,1], t to [0.01,0.99]). The coarse point wins ties.
inline TunedParams refine(const ComponentMatrix& matrix, const GoldDataset& gold, const TunedParams& coarse) {
    auto around = [](double centre, long lo, long hi) {
        const long c = std::lround(centre * 100.0);
        std::vector<double> v;
        for (long k = std::max(lo, c - 5); k <= std::min(hi, c + 5); ++k) v.push_back(static_cast<double>(k) / 100.0);
        return v;
    };
    const auto wc = around(coarse.weights.contextual(), 0, 100);
    const auto wp = around(coarse.weights.phonetic(), 0, 100);
    const auto ws = around(coarse.weights.string(), 0, 100);
    const auto ts = around(coarse.t, 1, 99);
    TunedParams fine = detail::search_lattice(matrix, gold, wc, wp, ws, ts);
    TunedParams out = fine.training_f > coarse.training_f ? fine : coarse;
    out.evaluated_points = coarse.evaluated_points + fine.evaluated_points;
    out.component_recomputations = coarse.component_recomputations + fine.component_recomputations;
    out.refined = true;
    return out;
}

// ---------------------------------------------------------------------------
// Experiment protocols

enum class Protocol { cv2, split20, cross };

inline std::string_view protocol_name(Protocol p) {
    switch (p) {
    case Protocol::cv2: return "cv2";
    case Protocol::split20: return "split20";
    case Protocol::cross: return "cross";
    }
    return "?";
}

inline Protocol parse_protocol(std::string_view s) {
    if (s == "cv2") return Protocol::cv2;
    if (s == "split20") return Protocol::split20;
    if (s == "cross") return Protocol::cross;
    throw std::invalid_argument("unknown protocol '" + std::string(s) + "' (expected cv2, split20 or cross)");
}

inline int experiment_id(Protocol p) {
    switch (p) {
    case Protocol::cv2: return 1;
    case Protocol::split20: return 2;
    case Protocol::cross: return 3;
    }
    return 0;
}

struct ExperimentRun {
    TunedParams tuned;
    EvalReport test_report;
    std::vector<Word> train_oov;
    std::vector<Word> test_oov;
};

struct ExperimentReport {
    Protocol protocol = Protocol::cv2;
    std::uint64_t seed = 0;
    std::vector<ExperimentRun> runs;
    // arithmetic means over runs
    double w_c = 0.0, w_p = 0.0, w_s = 0.0, t = 0.0;
    double precision = 0.0, recall = 0.0, f_measure = 0.0;
};

struct ExperimentOptions {
    GridSpec grid = GridSpec::defaults();
    bool refine = false;
    std::size_t split_runs = 5;
    double train_fraction = 0.2;
};

// Builds the component matrix for a list of OOV words against a fixed IV set.
using MatrixBuilder = std::function<ComponentMatrix(std::span<const Word>)>;

namespace detail {

// Fisher-Yates over a 64-bit Mersenne Twister with rejection sampling, so a
// seed gives the same permutation with any standard library.
inline std::vector<std::size_t> seeded_permutation(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (std::size_t i = n; i > 1; --i) {
        const std::uint64_t bound = i;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r;
        do r = rng(); while (r >= limit);
        std::swap(p[i - 1], p[static_cast<std::size_t>(r % bound)]);
    }
    return p;
}

inline ExperimentRun train_and_test(const GoldDataset& train, const GoldDataset& test, const MatrixBuilder& build,
                                    const ExperimentOptions& opt) {
    const auto train_oov = train.oov_words();
    const auto test_oov = test.oov_words();
    const ComponentMatrix train_m = build(train_oov);
    TunedParams tuned = grid_search(train_m, train, opt.grid);
    if (opt.refine) tuned = refine(train_m, train, tuned);
    const ComponentMatrix test_m = build(test_oov);
    const EvalReport report = evaluate(match_all(test_m, tuned.match_params()), test);
    return {std::move(tuned), report, train_oov, test_oov};
}

}  // namespace detail

/// Runs one of the three evaluation protocols:
///   cv2     two folds of a seeded shuffle; each fold tunes, the other tests
///   split20 split_runs seeded splits, tuning on train_fraction, testing on the rest
///   cross   tune on `secondary`, test on `primary`
/// Splits partition gold OOV words, so train and test never share an OOV word.
inline ExperimentReport run_experiment(Protocol protocol, const GoldDataset& primary, const GoldDataset* secondary,
                                       const MatrixBuilder& build, std::uint64_t seed,
                                       const ExperimentOptions& opt = {}) {
    ExperimentReport rep;
    rep.protocol = protocol;
    rep.seed = seed;
    if (protocol == Protocol::cross) {
        if (!secondary) throw std::invalid_argument("cross protocol needs a second gold dataset");
        for (const auto& [oov, iv] : secondary->entries()) {
            if (primary.target(oov))
                throw std::invalid_argument("cross protocol: OOV '" + oov.utf8() + "' appears in both datasets");
        }
        rep.runs.push_back(detail::train_and_test(*secondary, primary, build, opt));
    } else {
        if (secondary) throw std::invalid_argument(std::string(protocol_name(protocol)) + " takes a single gold dataset");
        std::mt19937_64 rng(seed);
        const std::size_t n = primary.size();
        if (protocol == Protocol::cv2) {
            if (n < 2) throw std::invalid_argument("cv2 needs at least two gold mappings");
            const auto perm = detail::seeded_permutation(n, rng);
            const std::size_t half = n / 2;
            const std::span<const std::size_t> a(perm.data(), half);
            const std::span<const std::size_t> b(perm.data() + half, n - half);
            const GoldDataset fold_a = primary.subset(a);
            const GoldDataset fold_b = primary.subset(b);
            rep.runs.push_back(detail::train_and_test(fold_a, fold_b, build, opt));
            rep.runs.push_back(detail::train_and_test(fold_b, fold_a, build, opt));
        } else {
            if (!(opt.train_fraction > 0.0 && opt.train_fraction < 1.0))
                throw std::invalid_argument("train fraction must lie in (0,1)");
            if (n < 2) throw std::invalid_argument("split20 needs at least two gold mappings");
            const auto n_train = std::clamp<std::size_t>(
                static_cast<std::size_t>(std::llround(opt.train_fraction * static_cast<double>(n))), 1, n - 1);
            for (std::size_t r = 0; r < opt.split_runs; ++r) {
                const auto perm = detail::seeded_permutation(n, rng);
                const GoldDataset train = primary.subset(std::span<const std::size_t>(perm.data(), n_train));
                const GoldDataset test = primary.subset(std::span<const std::size_t>(perm.data() + n_train, n - n_train));
                rep.runs.push_back(detail::train_and_test(train, test, build, opt));
            }
        }
    }
    for (const auto& run : rep.runs) {
        rep.w_c += run.tuned.weights.contextual();
        rep.w_p += run.tuned.weights.phonetic();
        rep.w_s += run.tuned.weights.string();
        rep.t += run.tuned.t;
        rep.precision += run.test_report.precision;
        rep.recall += run.test_report.recall;
        rep.f_measure += run.test_report.f_measure;
    }
    const auto runs = static_cast<double>(rep.runs.size());
    for (double* v : {&rep.w_c, &rep.w_p, &rep.w_s, &rep.t, &rep.precision, &rep.recall, &rep.f_measure}) *v /= runs;
    return rep;
}

}  // namespace tnorm
