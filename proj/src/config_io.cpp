// Copyright 2026 The regmarket Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "regmarket/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace regmarket {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "n_agents",        "tau",              "theta_true",
      "noise_var",       "corr",             "alpha",
      "beta",            "gamma",            "psi",
      "phi",             "C",                "eps_l",
      "eps_u",           "eps_ref",          "zeta_ref",
      "p_max",           "seed",             "feature_owner",
      "extra_noise_std", "clip_bound",       "leakage_correlation",
      "valuation_form",  "performance_form", "max_iterations",
      "shapley_permutations", "departures"};
  return keys;
}

template <typename T>
void read(const nlohmann::json& doc, const char* key, T& out) {
  auto it = doc.find(key);
  if (it == doc.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for ") + key + ": " + e.what());
  }
}

}  // namespace

nlohmann::ordered_json config_to_json(const MarketConfig& cfg) {
  nlohmann::ordered_json j;
  j["n_agents"] = cfg.n_agents;
  j["tau"] = cfg.tau;
  j["theta_true"] = cfg.theta_true;
  j["noise_var"] = cfg.noise_var;
  j["corr"] = cfg.corr;
  j["alpha"] = cfg.alpha;
  j["beta"] = cfg.beta;
  j["gamma"] = cfg.gamma;
  j["psi"] = cfg.psi;
  j["phi"] = cfg.phi;
  j["C"] = cfg.C;
  j["eps_l"] = cfg.eps_l;
  j["eps_u"] = cfg.eps_u;
  j["eps_ref"] = cfg.eps_ref;
  j["zeta_ref"] = cfg.zeta_ref;
  j["p_max"] = cfg.p_max;
  j["seed"] = cfg.seed;
  j["feature_owner"] = cfg.feature_owner;
  j["extra_noise_std"] = cfg.extra_noise_std;
  j["clip_bound"] = cfg.clip_bound;
  j["leakage_correlation"] = cfg.leakage_correlation;
  j["valuation_form"] = to_string(cfg.valuation_form);
  j["performance_form"] = to_string(cfg.performance_form);
  j["max_iterations"] = cfg.max_iterations;
  j["shapley_permutations"] = cfg.shapley_permutations;
  auto deps = nlohmann::ordered_json::array();
  for (const auto& d : cfg.departures) {
    deps.push_back({{"agent", d.agent}, {"iteration", d.iteration}});
  }
  j["departures"] = deps;
  return j;
}

MarketConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key: " + key);
  }
  MarketConfig cfg;
  read(doc, "n_agents", cfg.n_agents);
  read(doc, "tau", cfg.tau);
  read(doc, "theta_true", cfg.theta_true);
  read(doc, "noise_var", cfg.noise_var);
  read(doc, "corr", cfg.corr);
  read(doc, "alpha", cfg.alpha);
  read(doc, "beta", cfg.beta);
  read(doc, "gamma", cfg.gamma);
  read(doc, "psi", cfg.psi);
  read(doc, "phi", cfg.phi);
  read(doc, "C", cfg.C);
  read(doc, "eps_l", cfg.eps_l);
  read(doc, "eps_u", cfg.eps_u);
  read(doc, "eps_ref", cfg.eps_ref);
  read(doc, "zeta_ref", cfg.zeta_ref);
  read(doc, "p_max", cfg.p_max);
  read(doc, "seed", cfg.seed);
  read(doc, "feature_owner", cfg.feature_owner);
  read(doc, "extra_noise_std", cfg.extra_noise_std);
  read(doc, "clip_bound", cfg.clip_bound);
  read(doc, "leakage_correlation", cfg.leakage_correlation);
  read(doc, "max_iterations", cfg.max_iterations);
  read(doc, "shapley_permutations", cfg.shapley_permutations);

  std::string form;
  if (doc.contains("valuation_form")) {
    read(doc, "valuation_form", form);
    if (form == "log") {
      cfg.valuation_form = ValuationForm::kLog;
    } else if (form == "power") {
      cfg.valuation_form = ValuationForm::kPower;
    } else {
      throw ConfigError("valuation_form must be \"log\" or \"power\"");
    }
  }
  if (doc.contains("performance_form")) {
    read(doc, "performance_form", form);
    if (form == "reciprocal") {
      cfg.performance_form = PerformanceForm::kReciprocal;
    } else if (form == "gap") {
      cfg.performance_form = PerformanceForm::kGap;
    } else {
      throw ConfigError("performance_form must be \"reciprocal\" or \"gap\"");
    }
  }
  if (doc.contains("departures")) {
    const auto& deps = doc.at("departures");
    if (!deps.is_array()) throw ConfigError("departures must be an array");
    for (const auto& d : deps) {
      if (!d.is_object()) throw ConfigError("departures entries must be objects");
      for (const auto& [key, value] : d.items()) {
        if (key != "agent" && key != "iteration") {
          throw ConfigError("unknown departures key: " + key);
        }
      }
      Departure dep;
      read(d, "agent", dep.agent);
      read(d, "iteration", dep.iteration);
      cfg.departures.push_back(dep);
    }
  }
  return cfg;
}

std::string serialize_config(const MarketConfig& cfg) {
  return config_to_json(cfg).dump(2);
}

MarketConfig parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  return config_from_json(doc);
}

MarketConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return validate_config(parse_config(ss.str()));
}

void save_config(const MarketConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << serialize_config(cfg) << "\n";
}

}  // namespace regmarket
