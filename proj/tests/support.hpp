#pragma once

// Shared helpers for the unit tests and the acceptance runner: fixture paths,
// seeded random instances and independent reference computations.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "tnorm/tnorm.hpp"

namespace tnorm::testing {

inline std::string fixture(const std::string& name) { return std::string(TNORM_FIXTURE_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("tnorm-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

struct CommandResult {
    int status;
    std::string out;
    std::string err;
};

// Runs the tnorm executable through the shell; stdout and stderr are captured separately.
inline CommandResult run_cli(const std::string& args, const TempDir& dir, const std::string& stdin_file = "") {
    const std::string out = dir / "cmd.out";
    const std::string err = dir / "cmd.err";
    std::string cmd = std::string("'") + TNORM_CLI_PATH + "' " + args + " >'" + out + "' 2>'" + err + "'";
    if (!stdin_file.empty()) cmd += " <'" + stdin_file + "'";
    const int raw = std::system(cmd.c_str());
    const int status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return {status, read_file(out), read_file(err)};
}

// The bundled synthetic fixture, loaded through the library readers.
struct Synthetic {
    WordSet lexicon;
    EmbeddingStore store;
    GoldDataset gold;
    GoldDataset gold2;

    static const Synthetic& get() {
        static const Synthetic s = [] {
            Synthetic f;
            f.lexicon = load_lexicon(fixture("synthetic/lexicon.txt"));
            std::ifstream e(fixture("synthetic/embeddings.txt"));
            f.store = load_embeddings(e, "embeddings.txt").store;
            std::ifstream g(fixture("synthetic/gold.tsv"));
            f.gold = load_gold(g, "gold.tsv").gold;
            std::ifstream g2(fixture("synthetic/gold2.tsv"));
            f.gold2 = load_gold(g2, "gold2.tsv").gold;
            return f;
        }();
        return s;
    }

    ComponentMatrix matrix() const { return build_component_matrix(gold.oov_words(), sorted_words(lexicon), store); }
};

// ---- random instances ------------------------------------------------------

inline std::u32string random_string(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len,
                                    std::size_t alphabet) {
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::uniform_int_distribution<std::size_t> ch(0, alphabet - 1);
    std::u32string s(len(rng), U'a');
    for (auto& c : s) c = static_cast<char32_t>(U'a' + ch(rng));
    return s;
}

// Distinct random words of length 1..6 over `alphabet` letters.
inline std::vector<Word> random_words(std::mt19937_64& rng, std::size_t n, std::size_t alphabet = 6) {
    WordSet seen;
    std::vector<Word> out;
    while (out.size() < n) {
        Word w(random_string(rng, 1, 6, alphabet));
        if (seen.insert(w).second) out.push_back(w);
    }
    return out;
}

// Component values drawn from a small set of levels so equal scores (ties) are common.
inline ComponentTriple random_triple(std::mt19937_64& rng, bool coarse) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> level(0, 4);
    auto value = [&] { return coarse ? level(rng) / 4.0 : u(rng); };
    std::optional<double> c, p;
    if (u(rng) < 0.8) c = value();
    if (u(rng) < 0.8) p = value();
    return {c, p, value()};
}

inline ComponentMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, bool coarse) {
    auto oov = random_words(rng, rows);
    auto iv = random_words(rng, cols, 7);
    std::vector<ComponentTriple> t(rows * cols);
    for (auto& x : t) x = random_triple(rng, coarse);
    return {std::move(oov), std::move(iv), std::move(t)};
}

inline SimilarityWeights random_weights(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (true) {
        const double c = u(rng) < 0.2 ? 0.0 : u(rng);
        const double p = u(rng) < 0.2 ? 0.0 : u(rng);
        const double s = u(rng) < 0.2 ? 0.0 : u(rng);
        if (c > 0 || p > 0 || s > 0) return {c, p, s};
    }
}

// ---- reference computations -------------------------------------------------

// Full-matrix edit distance, written independently of the library's row-rolling version.
inline std::size_t oracle_levenshtein(const std::u32string& a, const std::u32string& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    return d[a.size()][b.size()];
}

inline std::size_t oracle_lcs(const std::u32string& a, const std::u32string& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = a[i - 1] == b[j - 1] ? d[i - 1][j - 1] + 1 : std::max(d[i - 1][j], d[i][j - 1]);
    return d[a.size()][b.size()];
}

inline double oracle_string_similarity(const std::u32string& a, const std::u32string& b) {
    return static_cast<double>(oracle_lcs(a, b)) /
           static_cast<double>(std::min(a.size(), b.size()) + oracle_levenshtein(a, b));
}

// Weighted average written from the definition: sum over defined components only.
inline double oracle_combine(const ComponentTriple& t, double wc, double wp, double ws) {
    double num = 0.0, den = 0.0;
    if (auto c = t.contextual()) {
        num += wc * *c;
        den += wc;
    }
    if (auto p = t.phonetic()) {
        num += wp * *p;
        den += wp;
    }
    num += ws * t.string();
    den += ws;
    return den == 0.0 ? 0.0 : num / den;
}

// Every candidate scored, fully sorted, filtered and truncated.
inline CandidateList oracle_match_row(const ComponentMatrix& m, std::size_t j, const SimilarityWeights& w, double t,
                                      std::size_t k) {
    CandidateList all;
    for (std::size_t i = 0; i < m.cols(); ++i) {
        const double s = oracle_combine(m.at(j, i), w.contextual(), w.phonetic(), w.string());
        if (s >= t) all.push_back({m.iv_index()[i], s});
    }
    std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
        return a.score != b.score ? a.score > b.score : a.iv < b.iv;
    });
    if (all.size() > k) all.erase(all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
    return all;
}

// Counts-based P/R/F written from the definitions.
inline EvalReport oracle_evaluate(const ComponentMatrix& m, const GoldDataset& gold, const SimilarityWeights& w,
                                  double t) {
    std::size_t predicted = 0, correct = 0;
    for (std::size_t j = 0; j < m.rows(); ++j) {
        const auto list = oracle_match_row(m, j, w, t, 1);
        if (list.empty()) continue;
        ++predicted;
        const Word* target = gold.target(m.oov_index()[j]);
        if (target && *target == list.front().iv) ++correct;
    }
    EvalReport r;
    r.predicted = predicted;
    r.correct = correct;
    r.gold_total = gold.size();
    r.precision = predicted == 0 ? 0.0 : double(correct) / double(predicted);
    r.recall = double(correct) / double(gold.size());
    r.f_measure = r.precision + r.recall == 0.0 ? 0.0 : 2 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

struct OraclePoint {
    double wc, wp, ws, t;
    EvalReport report;
};

// Exhaustive enumeration in w_c, w_p, w_s, t order keeping the first strict maximum.
inline OraclePoint oracle_grid_max(const ComponentMatrix& m, const GoldDataset& gold, const std::vector<double>& wv,
                                   const std::vector<double>& tv, std::size_t* points = nullptr) {
    std::optional<OraclePoint> best;
    std::size_t n = 0;
    for (double wc : wv)
        for (double wp : wv)
            for (double ws : wv) {
                if (wc == 0 && wp == 0 && ws == 0) continue;
                const SimilarityWeights w(wc, wp, ws);
                for (double t : tv) {
                    ++n;
                    auto r = oracle_evaluate(m, gold, w, t);
                    if (!best || r.f_measure > best->report.f_measure) best = OraclePoint{wc, wp, ws, t, r};
                }
            }
    if (points) *points = n;
    return *best;
}

}  // namespace tnorm::testing
