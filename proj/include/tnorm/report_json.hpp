#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "tnorm/evaluation.hpp"
#include "tnorm/tuner.hpp"

// JSON documents written and read by the tnorm tool.

namespace tnorm {

inline nlohmann::ordered_json to_json(const EvalReport& r) {
    return {{"precision", r.precision}, {"recall", r.recall},   {"f_measure", r.f_measure},
            {"predicted", r.predicted}, {"correct", r.correct}, {"gold_total", r.gold_total}};
}

/// TunedParams document. `evaluated_points` counts every searched (w_c, w_p, w_s, t)
/// point; all-zero weight triples are not searched.
inline nlohmann::ordered_json to_json(const TunedParams& p, std::optional<std::uint64_t> seed = std::nullopt) {
    nlohmann::ordered_json j;
    j["w_c"] = p.weights.contextual();
    j["w_p"] = p.weights.phonetic();
    j["w_s"] = p.weights.string();
    j["t"] = p.t;
    j["f_measure"] = p.training_f;
    j["evaluated_points"] = p.evaluated_points;
    j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
    j["precision"] = p.training_report.precision;
    j["recall"] = p.training_report.recall;
    j["predicted"] = p.training_report.predicted;
    j["correct"] = p.training_report.correct;
    j["gold_total"] = p.training_report.gold_total;
    j["refined"] = p.refined;
    j["component_recomputations"] = p.component_recomputations;
    return j;
}

/// Reads the weights and threshold back; counts are optional.
inline TunedParams tuned_params_from_json(const nlohmann::json& j) {
    auto number = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_number()) throw std::invalid_argument(std::string("params: missing numeric '") + key + "'");
        return j[key].get<double>();
    };
    TunedParams p;
    p.weights = SimilarityWeights(number("w_c"), number("w_p"), number("w_s"));
    p.t = number("t");
    if (!(p.t > 0.0 && p.t < 1.0)) throw std::invalid_argument("params: t must satisfy 0 < t < 1");
    if (j.contains("f_measure") && j["f_measure"].is_number()) p.training_f = j["f_measure"].get<double>();
    if (j.contains("evaluated_points") && j["evaluated_points"].is_number_unsigned())
        p.evaluated_points = j["evaluated_points"].get<std::size_t>();
    return p;
}

namespace detail {

inline double round_to(double v, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(v * scale) / scale;
}

}  // namespace detail

/// Experiment document: one results-table row (parameters to two decimals,
/// P/R/F as percentages to one decimal) plus every run in full.
inline nlohmann::ordered_json to_json(const ExperimentReport& rep) {
    using detail::round_to;
    nlohmann::ordered_json row;
    row["experiment"] = experiment_id(rep.protocol);
    row["params"] = nlohmann::ordered_json::array(
        {round_to(rep.w_c, 2), round_to(rep.w_p, 2), round_to(rep.w_s, 2), round_to(rep.t, 2)});
    row["pre"] = round_to(100.0 * rep.precision, 1);
    row["rec"] = round_to(100.0 * rep.recall, 1);
    row["fme"] = round_to(100.0 * rep.f_measure, 1);

    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const auto& run : rep.runs) {
        nlohmann::ordered_json r;
        r["train_size"] = run.train_oov.size();
        r["test_size"] = run.test_oov.size();
        r["tuned"] = to_json(run.tuned);
        r["test"] = to_json(run.test_report);
        runs.push_back(std::move(r));
    }

    nlohmann::ordered_json j;
    j["protocol"] = std::string(protocol_name(rep.protocol));
    j["seed"] = rep.seed;
    j["row"] = std::move(row);
    j["mean"] = {{"w_c", rep.w_c},           {"w_p", rep.w_p},       {"w_s", rep.w_s},          {"t", rep.t},
                 {"precision", rep.precision}, {"recall", rep.recall}, {"f_measure", rep.f_measure}};
    j["runs"] = std::move(runs);
    return j;
}

}  // namespace tnorm
