#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support.hpp"
#include "tnorm/report_json.hpp"
#include "tnorm/tuner.hpp"

using namespace tnorm;
using tnorm::testing::oracle_grid_max;
using tnorm::testing::Synthetic;

namespace {

const std::vector<double> unit_t{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

void expect_reproducible(const ComponentMatrix& m, const GoldDataset& gold, const TunedParams& p) {
    EXPECT_EQ(evaluate(match_all(m, p.match_params()), gold), p.training_report);
    EXPECT_EQ(p.training_f, p.training_report.f_measure);
}

// Builder over one precomputed matrix, counting calls.
struct RowSelector {
    const ComponentMatrix* full;
    int* calls;
    ComponentMatrix operator()(std::span<const Word> words) const {
        ++*calls;
        return full->select_rows(words);
    }
};

}  // namespace

TEST(GridSpec, DefaultCardinality) {
    const auto g = GridSpec::defaults();
    EXPECT_EQ(g.weight_values.size(), 11u);
    EXPECT_EQ(g.t_values, unit_t);
    EXPECT_EQ(g.point_count(), 11970u);
    EXPECT_EQ(g.weight_values[3], 0.3);
}

TEST(GridSpec, OtherSteps) {
    const auto g = GridSpec::with_step(0.05);
    EXPECT_EQ(g.weight_values.size(), 21u);
    EXPECT_EQ(g.t_values.front(), 0.1);
    EXPECT_EQ(g.t_values.back(), 0.9);
    EXPECT_EQ(g.t_values.size(), 17u);
    EXPECT_THROW(GridSpec::with_step(0.0), std::invalid_argument);
    EXPECT_THROW(GridSpec::with_step(0.7), std::invalid_argument);
}

TEST(GridSearch, DefaultGridMatchesExhaustiveEnumeration) {
    const auto& f = Synthetic::get();
    const auto m = f.matrix();
    const auto before = probe::component_evaluation_count();
    const auto got = grid_search(m, f.gold);
    EXPECT_EQ(probe::component_evaluation_count(), before);
    EXPECT_EQ(got.component_recomputations, 0u);
    EXPECT_EQ(got.evaluated_points, 11970u);

    std::size_t points = 0;
    const auto g = GridSpec::defaults();
    const auto want = oracle_grid_max(m, f.gold, g.weight_values, g.t_values, &points);
    EXPECT_EQ(points, 11970u);
    EXPECT_EQ(got.training_f, want.report.f_measure);
    EXPECT_EQ(got.weights, SimilarityWeights(want.wc, want.wp, want.ws));
    EXPECT_EQ(got.t, want.t);
    expect_reproducible(m, f.gold, got);
}

TEST(GridSearch, FixtureOptimumOnBinaryWeights) {
    // With weights restricted to {0,1}, (1,0,1) at t = 0.4 is the unique best point of the fixture.
    const auto& f = Synthetic::get();
    const auto m = f.matrix();
    const GridSpec grid{{0.0, 1.0}, unit_t};
    const auto got = grid_search(m, f.gold, grid);
    EXPECT_EQ(got.weights, SimilarityWeights(1, 0, 1));
    EXPECT_EQ(got.t, 0.4);
    EXPECT_EQ(got.evaluated_points, 63u);

    std::size_t at_max = 0;
    for (double wc : {0.0, 1.0})
        for (double wp : {0.0, 1.0})
            for (double ws : {0.0, 1.0}) {
                if (wc + wp + ws == 0) continue;
                for (double t : unit_t)
                    at_max += tnorm::testing::oracle_evaluate(m, f.gold, {wc, wp, ws}, t).f_measure == got.training_f;
            }
    EXPECT_EQ(at_max, 1u);
}

TEST(GridSearch, SinglePointGrid) {
    const auto& f = Synthetic::get();
    const auto m = f.matrix();
    const auto got = grid_search(m, f.gold, GridSpec{{0.7}, {0.35}});
    EXPECT_EQ(got.weights, SimilarityWeights(0.7, 0.7, 0.7));
    EXPECT_EQ(got.t, 0.35);
    EXPECT_EQ(got.evaluated_points, 1u);
    EXPECT_EQ(got.training_report, tnorm::testing::oracle_evaluate(m, f.gold, {0.7, 0.7, 0.7}, 0.35));
}

TEST(GridSearch, TiesGoToFirstPointInScanOrder) {
    // (0.5,0.5,0.5) and (1,1,1) score identically; the former is scanned first
    const auto& f = Synthetic::get();
    const auto got = grid_search(f.matrix(), f.gold, GridSpec{{0.5, 1.0}, {0.4}});
    const auto m = f.matrix();
    const auto want = oracle_grid_max(m, f.gold, {0.5, 1.0}, {0.4});
    EXPECT_EQ(got.weights, SimilarityWeights(want.wc, want.wp, want.ws));
    EXPECT_TRUE(got.weights.contextual() == 0.5 || got.weights.phonetic() == 0.5 || got.weights.string() == 0.5);
}

TEST(GridSearch, RandomInstancesMatchEnumeration) {
    std::mt19937_64 rng(77);
    const std::vector<double> wv{0.0, 0.5, 1.0};
    const std::vector<double> tv{0.2, 0.4, 0.6, 0.8};
    for (int inst = 0; inst < 20; ++inst) {
        const auto m = tnorm::testing::random_matrix(rng, 15, 25, inst % 2 == 0);
        GoldDataset gold;
        std::uniform_int_distribution<std::size_t> col(0, m.cols() - 1);
        for (std::size_t j = 0; j < m.rows(); j += 1 + inst % 2) gold.add(m.oov_index()[j], m.iv_index()[col(rng)]);
        const auto got = grid_search(m, gold, GridSpec{wv, tv});
        const auto want = oracle_grid_max(m, gold, wv, tv);
        ASSERT_EQ(got.training_f, want.report.f_measure);
        ASSERT_EQ(got.weights, SimilarityWeights(want.wc, want.wp, want.ws));
        ASSERT_EQ(got.t, want.t);
        expect_reproducible(m, gold, got);
    }
}

TEST(GridSearch, EmptyGoldRejected) {
    const auto& f = Synthetic::get();
    EXPECT_THROW(grid_search(f.matrix(), GoldDataset{}), std::invalid_argument);
}

TEST(Refine, NeverLowersF) {
    const auto& f = Synthetic::get();
    const auto m = f.matrix();
    const auto coarse = grid_search(m, f.gold);
    const auto fine = refine(m, f.gold, coarse);
    EXPECT_GE(fine.training_f, coarse.training_f);
    EXPECT_TRUE(fine.refined);
    EXPECT_GT(fine.evaluated_points, coarse.evaluated_points);
    EXPECT_EQ(fine.component_recomputations, 0u);
    expect_reproducible(m, f.gold, fine);
}

TEST(Refine, StaysWithinNeighbourhoodAndClipsThreshold) {
    const auto& f = Synthetic::get();
    const auto m = f.matrix();
    auto coarse = grid_search(m, f.gold, GridSpec{{0.0, 1.0}, {0.1}});
    const auto fine = refine(m, f.gold, coarse);
    EXPECT_GE(fine.t, 0.05 - 1e-12);
    EXPECT_LE(fine.t, 0.15 + 1e-12);
    EXPECT_LE(std::abs(fine.weights.contextual() - coarse.weights.contextual()), 0.05 + 1e-12);
    EXPECT_LE(std::abs(fine.weights.string() - coarse.weights.string()), 0.05 + 1e-12);
}

TEST(Refine, FlatNeighbourhoodKeepsCoarsePoint) {
    // every row scores the same everywhere, so F is flat and the coarse point must win
    const Word a = Word::from_utf8("aa"), b = Word::from_utf8("bb"), x = Word::from_utf8("x");
    ComponentMatrix m({x}, {a, b}, {ComponentTriple(0.9, 0.9, 0.9), ComponentTriple(0.2, 0.2, 0.2)});
    GoldDataset gold;
    gold.add(x, a);
    const auto coarse = grid_search(m, gold, GridSpec{{0.0, 0.5, 1.0}, {0.5}});
    const auto fine = refine(m, gold, coarse);
    EXPECT_EQ(fine.weights, coarse.weights);
    EXPECT_EQ(fine.t, coarse.t);
}

TEST(Experiment, Cv2FoldsPartitionGold) {
    const auto& f = Synthetic::get();
    const auto full = f.matrix();
    int calls = 0;
    const auto rep = run_experiment(Protocol::cv2, f.gold, nullptr, RowSelector{&full, &calls}, 99);
    ASSERT_EQ(rep.runs.size(), 2u);
    EXPECT_EQ(calls, 4);
    const auto& r0 = rep.runs[0];
    const auto& r1 = rep.runs[1];
    EXPECT_EQ(r0.train_oov.size() + r0.test_oov.size(), f.gold.size());
    std::set<Word> train(r0.train_oov.begin(), r0.train_oov.end());
    std::set<Word> test(r0.test_oov.begin(), r0.test_oov.end());
    for (const auto& w : test) EXPECT_FALSE(train.contains(w));
    EXPECT_EQ(train.size() + test.size(), f.gold.size());
    EXPECT_EQ(r1.train_oov, r0.test_oov);
    EXPECT_EQ(r1.test_oov, r0.train_oov);
    EXPECT_NEAR(rep.f_measure, (r0.test_report.f_measure + r1.test_report.f_measure) / 2, 1e-15);
    EXPECT_NEAR(rep.t, (r0.tuned.t + r1.tuned.t) / 2, 1e-15);
}

TEST(Experiment, Cv2OnTenMappings) {
    GoldDataset gold;
    std::vector<Word> oov, iv;
    for (int i = 0; i < 10; ++i) {
        oov.push_back(Word::from_utf8("o" + std::to_string(i)));
        iv.push_back(Word::from_utf8("i" + std::to_string(i)));
        gold.add(oov.back(), iv.back());
    }
    std::mt19937_64 rng(4);
    std::vector<ComponentTriple> t(100);
    for (auto& x : t) x = tnorm::testing::random_triple(rng, false);
    const ComponentMatrix full(oov, iv, t);
    int calls = 0;
    const auto rep = run_experiment(Protocol::cv2, gold, nullptr, RowSelector{&full, &calls}, 5);
    EXPECT_EQ(rep.runs[0].train_oov.size(), 5u);
    EXPECT_EQ(rep.runs[0].test_oov.size(), 5u);
}

TEST(Experiment, Split20IsReproducible) {
    const auto& f = Synthetic::get();
    const auto full = f.matrix();
    int calls = 0;
    const auto a = run_experiment(Protocol::split20, f.gold, nullptr, RowSelector{&full, &calls}, 7);
    const auto b = run_experiment(Protocol::split20, f.gold, nullptr, RowSelector{&full, &calls}, 7);
    ASSERT_EQ(a.runs.size(), 5u);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    for (const auto& run : a.runs) {
        EXPECT_EQ(run.train_oov.size(), 6u);
        EXPECT_EQ(run.test_oov.size(), 24u);
    }
    const auto c = run_experiment(Protocol::split20, f.gold, nullptr, RowSelector{&full, &calls}, 8);
    EXPECT_NE(to_json(a)["runs"].dump(), to_json(c)["runs"].dump());
}

TEST(Experiment, CrossTunesOnSecondaryAndTestsOnPrimary) {
    const auto& f = Synthetic::get();
    std::vector<Word> all = f.gold.oov_words();
    for (const auto& w : f.gold2.oov_words()) all.push_back(w);
    const auto full = build_component_matrix(all, sorted_words(f.lexicon), f.store);
    int calls = 0;
    const auto rep = run_experiment(Protocol::cross, f.gold, &f.gold2, RowSelector{&full, &calls}, 0);
    ASSERT_EQ(rep.runs.size(), 1u);
    EXPECT_EQ(rep.runs[0].train_oov, f.gold2.oov_words());
    EXPECT_EQ(rep.runs[0].test_oov, f.gold.oov_words());

    const auto j = to_json(rep);
    EXPECT_EQ(j["row"]["experiment"], 3);
    EXPECT_EQ(j["row"]["params"].size(), 4u);
    for (const char* key : {"pre", "rec", "fme"}) EXPECT_TRUE(j["row"][key].is_number());
    EXPECT_EQ(j["runs"].size(), 1u);
}

TEST(Experiment, ProtocolDatasetMismatchRejected) {
    const auto& f = Synthetic::get();
    const auto full = f.matrix();
    int calls = 0;
    RowSelector sel{&full, &calls};
    EXPECT_THROW(run_experiment(Protocol::cross, f.gold, nullptr, sel, 0), std::invalid_argument);
    EXPECT_THROW(run_experiment(Protocol::cv2, f.gold, &f.gold2, sel, 0), std::invalid_argument);
    EXPECT_THROW(run_experiment(Protocol::cross, f.gold, &f.gold, sel, 0), std::invalid_argument);
    EXPECT_THROW(parse_protocol("cv3"), std::invalid_argument);
}

TEST(Experiment, SeededPermutationIsStable) {
    std::mt19937_64 a(123), b(123);
    const auto p = detail::seeded_permutation(50, a);
    EXPECT_EQ(p, detail::seeded_permutation(50, b));
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
}

TEST(TunedParamsJson, RoundTrip) {
    const auto& f = Synthetic::get();
    const auto tuned = grid_search(f.matrix(), f.gold, GridSpec{{0.0, 1.0}, unit_t});
    const auto j = to_json(tuned, 17);
    for (const char* key : {"w_c", "w_p", "w_s", "t", "f_measure", "evaluated_points", "seed"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["seed"], 17);
    const auto back = tuned_params_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.weights, tuned.weights);
    EXPECT_EQ(back.t, tuned.t);
    EXPECT_THROW(tuned_params_from_json(nlohmann::json::parse(R"({"w_c":1,"w_p":0,"w_s":1})")),
                 std::invalid_argument);
}
