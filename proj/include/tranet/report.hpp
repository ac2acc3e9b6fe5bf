#pragma once

// JSON form of experiment reports:
// {task, mode, preset, epochs, batch_size, adam, seeds[],
//  repeats:[{seed, history:[{phase, epoch, loss}],
//            eval:{exact_match, char_accuracy, mean_levenshtein, n_test, exact_match_snapped}}],
//  aggregate:{mean_exact, std_exact}}

#include <string>

#include "json.hpp"
#include "tranet/harness.hpp"

namespace tranet {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const EvalMetrics& m) {
  ordered_json j;
  j["exact_match"] = m.exact_match;
  j["char_accuracy"] = m.char_accuracy;
  j["mean_levenshtein"] = m.mean_levenshtein;
  j["n_test"] = m.n_test;
  j["exact_match_snapped"] = m.exact_match_snapped;
  return j;
}

inline ordered_json to_json(const TrainHistory& h) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : h) arr.push_back({{"phase", to_string(e.phase)}, {"epoch", e.epoch}, {"loss", e.loss}});
  return arr;
}

inline ordered_json to_json(const ExperimentReport& r) {
  ordered_json j;
  j["task"] = to_string(r.task);
  j["mode"] = to_string(r.mode);
  j["preset"] = to_string(r.preset);
  j["epochs"] = r.epochs;
  j["batch_size"] = r.batch_size;
  j["adam"] = {{"learning_rate", r.adam.learning_rate},
               {"beta1", r.adam.beta1},
               {"beta2", r.adam.beta2},
               {"epsilon", r.adam.epsilon}};
  j["seeds"] = r.seeds;
  j["repeats"] = ordered_json::array();
  for (const auto& rep : r.repeats)
    j["repeats"].push_back({{"seed", rep.seed}, {"history", to_json(rep.history)}, {"eval", to_json(rep.eval)}});
  j["aggregate"] = {{"mean_exact", r.mean_exact}, {"std_exact", r.std_exact}};
  return j;
}

inline std::string report_to_string(const ExperimentReport& r) { return to_json(r).dump(2) + "\n"; }

inline EvalMetrics eval_from_json(const ordered_json& j) {
  EvalMetrics m;
  m.exact_match = j.at("exact_match").get<double>();
  m.char_accuracy = j.at("char_accuracy").get<double>();
  m.mean_levenshtein = j.at("mean_levenshtein").get<double>();
  m.n_test = j.value("n_test", std::size_t{0});
  m.exact_match_snapped = j.value("exact_match_snapped", 0.0);
  return m;
}

inline ExperimentReport report_from_json(const ordered_json& j) {
  try {
    ExperimentReport r;
    r.task = task_from_string(j.at("task").get<std::string>());
    r.mode = mode_from_string(j.at("mode").get<std::string>());
    r.preset = preset_from_string(j.at("preset").get<std::string>());
    r.epochs = j.value("epochs", 0);
    r.batch_size = j.value("batch_size", 0);
    if (j.contains("adam")) {
      const auto& a = j["adam"];
      r.adam = {a.at("learning_rate").get<double>(), a.at("beta1").get<double>(), a.at("beta2").get<double>(),
                a.at("epsilon").get<double>()};
    }
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    for (const auto& rep : j.at("repeats")) {
      RepeatResult rr;
      rr.seed = rep.at("seed").get<std::uint64_t>();
      for (const auto& e : rep.at("history"))
        rr.history.push_back(
            {phase_from_string(e.at("phase").get<std::string>()), e.at("epoch").get<int>(), e.at("loss").get<double>()});
      rr.eval = eval_from_json(rep.at("eval"));
      r.repeats.push_back(std::move(rr));
    }
    r.mean_exact = j.at("aggregate").at("mean_exact").get<double>();
    r.std_exact = j.at("aggregate").at("std_exact").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataError::Kind::Format, std::string("malformed report: ") + e.what());
  }
}

inline ExperimentReport report_from_string(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataError::Kind::Format, std::string("report is not JSON: ") + e.what());
  }
  return report_from_json(j);
}

}  // namespace tranet
