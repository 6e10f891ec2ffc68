#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"
#include "tnorm/embeddings.hpp"

using namespace tnorm;

namespace {

EmbeddingLoad load(const std::string& text) {
    std::istringstream in(text);
    return load_embeddings(in, "vec.txt");
}

Word w(const char* s) { return Word::from_utf8(s); }

}  // namespace

TEST(Embeddings, LoadsWithHeader) {
    const auto r = load("3 2\nlove 1 0\nluv 0.8 0.6\nhate -1 0\n");
    EXPECT_EQ(r.store.size(), 3u);
    EXPECT_EQ(r.store.dimension(), 2u);
    EXPECT_TRUE(r.store.contains(w("luv")));
}

TEST(Embeddings, LoadsWithoutHeaderAndLowercases) {
    const auto r = load("Love 1 0 0\r\nLUV 1 1 0\n");
    EXPECT_EQ(r.store.dimension(), 3u);
    EXPECT_TRUE(r.store.contains(w("love")));
    EXPECT_TRUE(r.store.contains(w("luv")));
}

TEST(Embeddings, DuplicatesAndZeroVectorsAreCounted) {
    const auto r = load("a 1 0\na 0 1\nz 0 0\n");
    EXPECT_EQ(r.store.size(), 1u);
    EXPECT_EQ(r.duplicates, 1u);
    EXPECT_EQ(r.zero_norm, 1u);
    EXPECT_FALSE(r.store.contains(w("z")));
}

TEST(Embeddings, ErrorsNameFileAndLine) {
    try {
        load("a 1 0\nb 1 0 0\n");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_EQ(e.source(), "vec.txt");
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("vec.txt:2"), std::string::npos);
    }
    EXPECT_THROW(load("a 1 x\n"), FormatError);
    EXPECT_THROW(load("2 3\na 1 2\n"), FormatError);
    EXPECT_THROW(load("lonely\n"), FormatError);
    EXPECT_THROW(load("a 1 nan\n"), FormatError);
}

TEST(Embeddings, CosineIsClampedToUnitInterval) {
    const auto r = load("v 1 2 3\nneg -1 -2 -3\nsame 2 4 6\northo 3 0 -1\n");
    const auto& s = r.store;
    EXPECT_EQ(contextual_similarity(s, w("v"), w("neg")), std::optional<double>(0.0));
    EXPECT_NEAR(*contextual_similarity(s, w("v"), w("same")), 1.0, 1e-12);
    EXPECT_EQ(contextual_similarity(s, w("v"), w("ortho")), std::optional<double>(0.0));
    EXPECT_EQ(contextual_similarity(s, w("v"), w("v")), std::optional<double>(1.0));
}

TEST(Embeddings, CosineMatchesDirectFormula) {
    const auto r = load("a 0.5 -0.25 2\nb 1 1 1\n");
    const double dot = 0.5 - 0.25 + 2.0;
    const double expected = dot / (std::sqrt(0.25 + 0.0625 + 4.0) * std::sqrt(3.0));
    EXPECT_NEAR(*contextual_similarity(r.store, w("a"), w("b")), expected, 1e-12);
}

TEST(Embeddings, AbsentWordIsUndefined) {
    const auto r = load("a 1 0\n");
    EXPECT_FALSE(contextual_similarity(r.store, w("a"), w("b")).has_value());
    EXPECT_FALSE(contextual_similarity(r.store, w("b"), w("a")).has_value());
}

TEST(Embeddings, BundledFixtureLoads) {
    const auto& f = tnorm::testing::Synthetic::get();
    EXPECT_EQ(f.store.dimension(), 16u);
    EXPECT_GT(f.store.size(), 50u);
}
