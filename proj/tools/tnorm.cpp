// tnorm: command-line front end for OOV -> IV text normalization.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tnorm/report_json.hpp"
#include "tnorm/tnorm.hpp"

namespace {

using namespace tnorm;

void warn(const std::string& msg) { std::cerr << "tnorm: warning: " << msg << '\n'; }

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path + "'");
    return in;
}

// Writes to `path`, or to stdout when path is empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    fn(out);
    if (!out) throw IoError("write failed for '" + path + "'");
}

EmbeddingStore read_embeddings(const std::string& path) {
    auto in = open_input(path);
    auto load = load_embeddings(in, path);
    if (load.duplicates) warn(path + ": " + std::to_string(load.duplicates) + " duplicate word(s) ignored");
    if (load.zero_norm) warn(path + ": " + std::to_string(load.zero_norm) + " zero vector(s) skipped");
    return std::move(load.store);
}

GoldDataset read_gold(const std::string& path) {
    auto in = open_input(path);
    auto load = load_gold(in, path);
    if (load.self_mappings) warn(path + ": " + std::to_string(load.self_mappings) + " self-mapping(s) skipped");
    if (load.multi_token) warn(path + ": " + std::to_string(load.multi_token) + " multi-token mapping(s) skipped");
    if (load.duplicates) warn(path + ": " + std::to_string(load.duplicates) + " duplicate OOV key(s) skipped");
    if (load.gold.empty()) throw FormatError(path, 0, "no usable gold mappings");
    return std::move(load.gold);
}

// OOV list: one word per line; only the first tab-separated column is read.
std::vector<Word> read_oov_list(const std::string& path, const WordSet& lexicon) {
    auto in = open_input(path);
    WordSet seen;
    std::vector<Word> out;
    std::size_t in_lexicon = 0;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view v(line);
        if (auto tab = v.find('\t'); tab != std::string_view::npos) v = v.substr(0, tab);
        while (!v.empty() && (v.back() == '\r' || v.back() == ' ')) v.remove_suffix(1);
        while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
        if (v.empty() || v.front() == '#') continue;
        Word w = Word::from_utf8(v);
        if (lexicon.contains(w)) {
            ++in_lexicon;
            continue;
        }
        if (seen.insert(w).second) out.push_back(std::move(w));
    }
    if (in_lexicon) warn(path + ": " + std::to_string(in_lexicon) + " word(s) already in the lexicon skipped");
    if (out.empty()) throw FormatError(path, 0, "no OOV words");
    return out;
}

SimilarityWeights parse_weights(const std::string& text) {
    std::vector<double> v;
    std::string_view s(text);
    while (true) {
        const auto comma = s.find(',');
        const std::string_view part = s.substr(0, comma);
        double x = 0.0;
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), x);
        if (ec != std::errc() || p != part.data() + part.size())
            throw CLI::ValidationError("--weights", "expected three comma-separated numbers, got '" + text + "'");
        v.push_back(x);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    if (v.size() != 3) throw CLI::ValidationError("--weights", "expected three comma-separated numbers, got '" + text + "'");
    try {
        return {v[0], v[1], v[2]};
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError("--weights", e.what());
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "undefined"; }

void print_json(std::ostream& out, const nlohmann::ordered_json& j) { out << j.dump(2) << '\n'; }

// Every gold OOV row against the sorted lexicon.
ComponentMatrix gold_matrix(const GoldDataset& gold, const WordSet& lexicon, const EmbeddingStore& store) {
    std::size_t unreachable = 0;
    for (const auto& [oov, iv] : gold.entries()) unreachable += lexicon.contains(iv) ? 0 : 1;
    if (unreachable) warn(std::to_string(unreachable) + " gold target(s) are not in the lexicon and can never match");
    return build_component_matrix(gold.oov_words(), sorted_words(lexicon), store);
}

struct Options {
    std::string word, word2;
    std::size_t max_code_len = default_max_code_len;
    std::string lexicon, oov, embeddings, gold, gold2, pred, params, output;
    std::string weights = "1,1,1";
    double threshold = 0.5;
    std::size_t k = 1;
    double step = 0.1;
    bool refine = false;
    std::uint64_t seed = 0;
    double t_from = 0.1, t_to = 0.9, t_step = 0.1;
    std::string protocol;
};

int cmd_encode(const Options& o) {
    const auto codes = encode(Word::from_utf8(o.word), o.max_code_len);
    std::cout << "primary\t" << codes.primary << "\nalternate\t" << (codes.alternate ? *codes.alternate : "-") << '\n';
    return 0;
}

int cmd_sim(const Options& o) {
    const auto store = read_embeddings(o.embeddings);
    const Word a = Word::from_utf8(o.word);
    const Word b = Word::from_utf8(o.word2);
    const auto w = parse_weights(o.weights);
    const auto triple = component_triple(a, b, store);
    std::cout << "contextual\t" << fmt(triple.contextual()) << "\nphonetic\t" << fmt(triple.phonetic())
              << "\nstring\t" << fmt(triple.string()) << "\ncombined\t" << fmt(combine(triple, w)) << '\n';
    return 0;
}

int cmd_match(const Options& o) {
    const auto lexicon = load_lexicon(o.lexicon);
    const auto store = read_embeddings(o.embeddings);
    const MatchParams params(parse_weights(o.weights), o.threshold, o.k);
    auto oov = read_oov_list(o.oov, lexicon);
    const auto matrix = build_component_matrix(std::move(oov), sorted_words(lexicon), store);
    const auto result = match_all(matrix, params);
    with_output(o.output, [&](std::ostream& out) { write_predictions(out, result); });
    return 0;
}

int cmd_normalize(const Options& o) {
    const auto lexicon = load_lexicon(o.lexicon);
    const auto store = read_embeddings(o.embeddings);
    nlohmann::json pj;
    {
        auto in = open_input(o.params);
        try {
            pj = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError(o.params, 0, e.what());
        }
    }
    const TunedParams tuned = tuned_params_from_json(pj);

    std::vector<std::string> lines;
    VocabularySplit split;
    for (std::string line; std::getline(std::cin, line);) {
        add_line(split, line, lexicon);
        lines.push_back(std::move(line));
    }
    MatchResult result(1);
    if (!split.oov.empty()) result = match_all(build_component_matrix(sorted_words(split.oov), sorted_words(lexicon), store), tuned.match_params());

    for (const auto& line : lines) {
        const std::u32string text = unicode::decode_utf8(line);
        const auto tokens = tokenize(std::u32string_view(text));
        std::vector<Word> words;
        words.reserve(tokens.size());
        for (const auto& t : tokens) words.push_back(t.word);
        const auto normalized = apply_normalization(words, lexicon, result);
        std::u32string out;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            out.append(text, pos, tokens[i].begin - pos);
            if (normalized[i] == tokens[i].word)
                out.append(text, tokens[i].begin, tokens[i].end - tokens[i].begin);
            else
                out.append(normalized[i].text());
            pos = tokens[i].end;
        }
        out.append(text, pos);
        std::cout << unicode::encode_utf8(out) << '\n';
    }
    return 0;
}

int cmd_tune(const Options& o) {
    const auto gold = read_gold(o.gold);
    const auto lexicon = load_lexicon(o.lexicon);
    const auto store = read_embeddings(o.embeddings);
    const auto matrix = gold_matrix(gold, lexicon, store);
    TunedParams tuned = grid_search(matrix, gold, GridSpec::with_step(o.step));
    if (o.refine) tuned = refine(matrix, gold, tuned);
    with_output(o.output, [&](std::ostream& out) { print_json(out, to_json(tuned, o.seed)); });
    return 0;
}

int cmd_eval(const Options& o) {
    const auto gold = read_gold(o.gold);
    auto in = open_input(o.pred);
    const auto result = read_predictions(in, o.pred);
    print_json(std::cout, to_json(evaluate(result, gold)));
    return 0;
}

int cmd_sweep(const Options& o) {
    if (!(o.t_step > 0.0) || o.t_to < o.t_from) throw CLI::ValidationError("sweep", "need --t-step > 0 and --t-from <= --t-to");
    const auto gold = read_gold(o.gold);
    const auto lexicon = load_lexicon(o.lexicon);
    const auto store = read_embeddings(o.embeddings);
    const auto weights = parse_weights(o.weights);
    std::vector<double> ts;
    const auto n = static_cast<long>(std::floor((o.t_to - o.t_from) / o.t_step + 1e-9));
    for (long i = 0; i <= n; ++i) ts.push_back(std::round((o.t_from + static_cast<double>(i) * o.t_step) * 1e12) / 1e12);
    const auto matrix = gold_matrix(gold, lexicon, store);
    const auto points = threshold_sweep(matrix, weights, gold, ts);
    with_output(o.output, [&](std::ostream& out) { write_sweep_csv(out, points); });
    return 0;
}

int cmd_experiment(const Options& o) {
    const Protocol protocol = parse_protocol(o.protocol);
    if (protocol == Protocol::cross && o.gold2.empty()) throw CLI::ValidationError("--gold2", "cross protocol needs --gold2");
    if (protocol != Protocol::cross && !o.gold2.empty())
        throw CLI::ValidationError("--gold2", "only the cross protocol takes --gold2");
    const auto gold = read_gold(o.gold);
    std::optional<GoldDataset> gold2;
    if (!o.gold2.empty()) gold2 = read_gold(o.gold2);
    const auto lexicon = load_lexicon(o.lexicon);
    const auto store = read_embeddings(o.embeddings);

    // one matrix over every gold OOV word; runs take row subsets of it
    std::vector<Word> all = gold.oov_words();
    if (gold2) {
        for (const auto& w : gold2->oov_words())
            if (!gold.target(w)) all.push_back(w);
    }
    const auto full = build_component_matrix(std::move(all), sorted_words(lexicon), store);
    const MatrixBuilder builder = [&](std::span<const Word> words) { return full.select_rows(words); };

    ExperimentOptions opt;
    opt.grid = GridSpec::with_step(o.step);
    opt.refine = o.refine;
    const auto report = run_experiment(protocol, gold, gold2 ? &*gold2 : nullptr, builder, o.seed, opt);
    with_output(o.output, [&](std::ostream& out) { print_json(out, to_json(report)); });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Normalize out-of-vocabulary words by thresholded nearest-neighbour matching"};
    app.require_subcommand(1);
    Options o;

    auto* encode_cmd = app.add_subcommand("encode", "Print Double Metaphone codes of a word");
    encode_cmd->add_option("word", o.word, "Word to encode")->required();
    encode_cmd->add_option("--max-code-len", o.max_code_len, "Code length cap")->check(CLI::PositiveNumber);

    auto* sim_cmd = app.add_subcommand("sim", "Print component and combined similarity of two words");
    sim_cmd->add_option("w1", o.word, "First word")->required();
    sim_cmd->add_option("w2", o.word2, "Second word")->required();
    sim_cmd->add_option("--embeddings", o.embeddings, "Text vector file")->required();
    sim_cmd->add_option("--weights", o.weights, "w_c,w_p,w_s (default 1,1,1)");

    auto* match_cmd = app.add_subcommand("match", "Match OOV words to lexicon words; writes a predictions TSV");
    match_cmd->add_option("--lexicon", o.lexicon, "Lexicon, one word per line")->required();
    match_cmd->add_option("--oov", o.oov, "OOV words, one per line")->required();
    match_cmd->add_option("--embeddings", o.embeddings, "Text vector file")->required();
    match_cmd->add_option("--weights", o.weights, "w_c,w_p,w_s")->required();
    match_cmd->add_option("-t,--threshold", o.threshold, "Minimum combined similarity, 0 < t < 1")->required();
    match_cmd->add_option("-k", o.k, "Neighbours per OOV word")->check(CLI::PositiveNumber);
    match_cmd->add_option("-o,--output", o.output, "Output TSV (default stdout)");

    auto* norm_cmd = app.add_subcommand("normalize", "Replace matched OOV tokens of stdin text with lexicon words");
    norm_cmd->add_option("--lexicon", o.lexicon, "Lexicon, one word per line")->required();
    norm_cmd->add_option("--embeddings", o.embeddings, "Text vector file")->required();
    norm_cmd->add_option("--params", o.params, "Tuned parameters JSON")->required();

    auto* tune_cmd = app.add_subcommand("tune", "Grid-search weights and threshold on a gold dataset");
    tune_cmd->add_option("--gold", o.gold, "Gold TSV: oov<TAB>iv")->required();
    tune_cmd->add_option("--lexicon", o.lexicon, "Lexicon, one word per line")->required();
    tune_cmd->add_option("--embeddings", o.embeddings, "Text vector file")->required();
    tune_cmd->add_option("--step", o.step, "Grid step (default 0.1)");
    tune_cmd->add_flag("--refine", o.refine, "Add a 0.01 pass around the coarse optimum");
    tune_cmd->add_option("--seed", o.seed, "Recorded in the output");
    tune_cmd->add_option("-o,--output", o.output, "Output JSON (default stdout)");

    auto* eval_cmd = app.add_subcommand("eval", "Score a predictions TSV against a gold TSV");
    eval_cmd->add_option("--gold", o.gold, "Gold TSV: oov<TAB>iv")->required();
    eval_cmd->add_option("--pred", o.pred, "Predictions TSV")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "Precision/recall/F over a range of thresholds");
    sweep_cmd->add_option("--gold", o.gold, "Gold TSV: oov<TAB>iv")->required();
    sweep_cmd->add_option("--lexicon", o.lexicon, "Lexicon, one word per line")->required();
    sweep_cmd->add_option("--embeddings", o.embeddings, "Text vector file")->required();
    sweep_cmd->add_option("--weights", o.weights, "w_c,w_p,w_s")->required();
    sweep_cmd->add_option("--t-from", o.t_from, "First threshold")->required();
    sweep_cmd->add_option("--t-to", o.t_to, "Last threshold")->required();
    sweep_cmd->add_option("--t-step", o.t_step, "Threshold step")->required();
    sweep_cmd->add_option("-o,--output", o.output, "Output CSV")->required();

    auto* exp_cmd = app.add_subcommand("experiment", "Run a tuning/evaluation protocol");
    exp_cmd->add_option("--protocol", o.protocol, "cv2, split20 or cross")
        ->required()
        ->check(CLI::IsMember({"cv2", "split20", "cross"}));
    exp_cmd->add_option("--gold", o.gold, "Gold TSV evaluated on")->required();
    exp_cmd->add_option("--gold2", o.gold2, "Gold TSV tuned on (cross protocol)");
    exp_cmd->add_option("--lexicon", o.lexicon, "Lexicon, one word per line")->required();
    exp_cmd->add_option("--embeddings", o.embeddings, "Text vector file")->required();
    exp_cmd->add_option("--seed", o.seed, "Shuffle seed")->required();
    exp_cmd->add_option("--step", o.step, "Grid step (default 0.1)");
    exp_cmd->add_flag("--refine", o.refine, "Add a 0.01 pass around each coarse optimum");
    exp_cmd->add_option("-o,--output", o.output, "Output JSON (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*encode_cmd) return cmd_encode(o);
        if (*sim_cmd) return cmd_sim(o);
        if (*match_cmd) return cmd_match(o);
        if (*norm_cmd) return cmd_normalize(o);
        if (*tune_cmd) return cmd_tune(o);
        if (*eval_cmd) return cmd_eval(o);
        if (*sweep_cmd) return cmd_sweep(o);
        if (*exp_cmd) return cmd_experiment(o);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "tnorm: usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "tnorm: error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
