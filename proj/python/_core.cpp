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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "regmarket/config_io.hpp"
#include "regmarket/datagen.hpp"
#include "regmarket/experiments.hpp"
#include "regmarket/mechanism.hpp"
#include "regmarket/valuation.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace regmarket;

namespace {

MarketMode parse_mode(const std::string& name) {
  for (MarketMode m : {MarketMode::kAlgorithm1, MarketMode::kCaseI, MarketMode::kCaseII}) {
    if (name == to_string(m)) return m;
  }
  throw py::value_error("unknown mode '" + name + "'; expected algorithm1, case1 or case2");
}

// JSON text to Python objects through the json module.
py::object from_json_text(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Regression data market simulator";

  py::class_<MarketConfig>(m, "MarketConfig")
      .def(py::init(&default_config))
      .def_static("from_json", &parse_config, "text"_a)
      .def_static("load", &load_config, "path"_a)
      .def("to_json", &serialize_config)
      .def("validate", [](const MarketConfig& c) { validate_config(c); })
      .def_readwrite("n_agents", &MarketConfig::n_agents)
      .def_readwrite("tau", &MarketConfig::tau)
      .def_readwrite("theta_true", &MarketConfig::theta_true)
      .def_readwrite("noise_var", &MarketConfig::noise_var)
      .def_readwrite("corr", &MarketConfig::corr)
      .def_readwrite("alpha", &MarketConfig::alpha)
      .def_readwrite("beta", &MarketConfig::beta)
      .def_readwrite("gamma", &MarketConfig::gamma)
      .def_readwrite("psi", &MarketConfig::psi)
      .def_readwrite("phi", &MarketConfig::phi)
      .def_readwrite("C", &MarketConfig::C)
      .def_readwrite("eps_l", &MarketConfig::eps_l)
      .def_readwrite("eps_u", &MarketConfig::eps_u)
      .def_readwrite("eps_ref", &MarketConfig::eps_ref)
      .def_readwrite("zeta_ref", &MarketConfig::zeta_ref)
      .def_readwrite("p_max", &MarketConfig::p_max)
      .def_readwrite("seed", &MarketConfig::seed)
      .def_readwrite("max_iterations", &MarketConfig::max_iterations)
      .def("__eq__", [](const MarketConfig& a, const MarketConfig& b) { return a == b; })
      .def("__repr__", [](const MarketConfig& c) {
        return "MarketConfig(" + serialize_config(c) + ")";
      });

  py::enum_<ValuationForm>(m, "ValuationForm")
      .value("LOG", ValuationForm::kLog)
      .value("POWER", ValuationForm::kPower);
  m.def("learner_valuation", &learner_valuation, "eps"_a, "p"_a, "alpha"_a, "beta"_a,
        "form"_a = ValuationForm::kLog);

  m.def(
      "shapley",
      [](std::size_t n, const std::function<double(Coalition)>& value) {
        return shapley_exact(n, value).shapley;
      },
      "n"_a, "value"_a,
      "Exact Shapley values of an n-player game given as a function of a "
      "coalition bitmask.");
  m.def(
      "contributions",
      [](const MarketConfig& cfg) {
        const FeaturePanel panel = apply_configured_noise(generate_panel(cfg), cfg);
        std::vector<std::size_t> agents;
        for (std::size_t a = 1; a < cfg.n_agents; ++a) agents.push_back(a);
        const ContributionReport r = shapley_exact(panel, agents);
        return py::dict("agents"_a = r.agents, "shapley"_a = r.shapley,
                        "normalized"_a = r.normalized);
      },
      "cfg"_a, "Shapley contributions of the supporting agents on a generated panel.");

  m.def(
      "run_market",
      [](const MarketConfig& cfg, const std::string& mode) {
        const MarketMode mm = parse_mode(mode);
        MarketTrace trace;
        {
          py::gil_scoped_release release;
          trace = run_market(cfg, mm);
        }
        py::object doc = from_json_text(trace_to_json(trace, cfg, mm).dump());
        const StackelbergReport s = check_stackelberg(trace.final_record().state, cfg);
        doc["stackelberg_violation"] = s.max_violation();
        return doc;
      },
      "cfg"_a, "mode"_a = "algorithm1",
      "Runs the market and returns the trace as a dict.");

  m.def("scenario_names", &scenario_names);
  m.def(
      "run_scenario",
      [](const std::string& name, const MarketConfig& cfg, const std::string& out_dir,
         std::optional<std::uint64_t> seed, std::size_t seeds, std::size_t jobs) {
        ScenarioOptions opts;
        opts.out_dir = out_dir;
        opts.seed = seed;
        opts.seeds = seeds;
        opts.jobs = jobs;
        ScenarioResult r;
        {
          py::gil_scoped_release release;
          r = run_scenario(name, cfg, opts);
        }
        return py::dict("summary"_a = r.summary, "artifacts"_a = r.artifacts);
      },
      "name"_a, "cfg"_a, "out_dir"_a, "seed"_a = py::none(), "seeds"_a = 10,
      "jobs"_a = 0);
}
