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

#include "regmarket/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "regmarket/config_io.hpp"
#include "regmarket/datagen.hpp"
#include "regmarket/format.hpp"
#include "regmarket/logging.hpp"
#include "regmarket/regression.hpp"
#include "regmarket/valuation.hpp"

namespace regmarket {
namespace {

namespace fs = std::filesystem;

// Features of the correlated pair in the convergence experiment (the third
// and fourth agents' features).
constexpr std::size_t kPairA = 2;
constexpr std::size_t kPairB = 3;

const std::vector<double>& eps_ref_grid() {
  static const std::vector<double> grid = {std::log(10.0), std::log(20.0),
                                           std::log(30.0), std::log(40.0),
                                           std::log(50.0), std::log(60.0)};
  return grid;
}

std::string write_artifact(const std::string& dir, const std::string& name,
                           const std::string& content) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
  return path.string();
}

std::string fmt(double v) { return format_number(v); }

MarketConfig seeded(const MarketConfig& cfg, std::size_t offset) {
  MarketConfig c = cfg;
  c.seed = cfg.seed + offset;
  return c;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::size_t resolve_jobs(std::size_t jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

ScenarioResult fig1_heatmap(const MarketConfig& cfg,
                            const ScenarioOptions& opts) {
  DistortionOptions d;
  d.seeds = opts.seeds;
  if (cfg.num_features() <= d.correlated_b || cfg.n_agents <= d.noisy_agent) {
    throw ConfigError("fig1_heatmap needs at least four features and agents");
  }
  const DistortionGrid grid = contributions_under_distortion(cfg, d);
  std::ostringstream csv;
  write_heatmap_csv(grid, csv);
  ScenarioResult res;
  res.artifacts.push_back(
      write_artifact(opts.out_dir, "fig1_heatmap.csv", csv.str()));
  const std::size_t last = grid.agents.size() - 1;
  res.summary = "fig1_heatmap: a" + std::to_string(grid.agents[last] + 1) +
                " contribution " + fmt(grid.value.front().front()[last]) +
                " (clean) -> " + fmt(grid.value.back().back()[last]) +
                " (rho=1, sigma=1)";
  return res;
}

ScenarioResult fig2_valuation(const MarketConfig& cfg,
                              const ScenarioOptions& opts) {
  struct Pair {
    double alpha, beta;
  };
  const Pair pairs[] = {{0.3, -0.2}, {0.45, -0.4}, {0.45, -0.6}, {0.8, -0.8}};
  std::ostringstream csv;
  csv << "eps,alpha,beta,valuation\n";
  std::size_t rows = 0;
  for (const Pair& pr : pairs) {
    for (int i = 0; i < 100; ++i) {
      const double eps = i / 10.0;
      csv << fmt(eps) << "," << fmt(pr.alpha) << "," << fmt(pr.beta) << ","
          << fmt(learner_valuation(eps, 1.0, pr.alpha, pr.beta,
                                   cfg.valuation_form))
          << "\n";
      ++rows;
    }
  }
  ScenarioResult res;
  res.artifacts.push_back(
      write_artifact(opts.out_dir, "fig2_valuation.csv", csv.str()));
  res.summary = "fig2_valuation: " + std::to_string(rows) +
                " points, U(1; 0.3, -0.2) = " +
                fmt(learner_valuation(1.0, 1.0, 0.3, -0.2, cfg.valuation_form));
  return res;
}

const MarketMode kModes[] = {MarketMode::kAlgorithm1, MarketMode::kCaseII,
                             MarketMode::kCaseI};

// Normalized payment: an agent's share of the offered price.
void payment_rows(std::ostringstream& csv, const MarketTrace& trace,
                  MarketMode mode) {
  for (const auto& r : trace.iterations) {
    for (std::size_t a = 1; a < r.state.allocation.size(); ++a) {
      const double p = r.state.price_offered;
      csv << to_string(mode) << "," << r.iteration << "," << (a + 1) << ","
          << fmt(r.state.allocation[a]) << ","
          << fmt(p > 0.0 ? r.state.allocation[a] / p : 0.0) << "\n";
    }
  }
}

ScenarioResult fig3_payments(const MarketConfig& cfg,
                             const ScenarioOptions& opts) {
  std::ostringstream csv;
  csv << "mode,iter,agent,payment,normalized_payment\n";
  std::string summary = "fig3_payments:";
  for (MarketMode mode : kModes) {
    const MarketTrace trace = run_market(cfg, mode);
    payment_rows(csv, trace, mode);
    // Largest relative swing of any agent's payment over the run.
    double swing = 0.0;
    for (std::size_t a = 1; a < cfg.n_agents; ++a) {
      double lo = INFINITY, hi = 0.0;
      for (const auto& r : trace.iterations) {
        lo = std::min(lo, r.state.allocation[a]);
        hi = std::max(hi, r.state.allocation[a]);
      }
      if (hi > 0.0) swing = std::max(swing, (hi - lo) / hi);
    }
    summary += std::string(" ") + to_string(mode) + " swing " +
               fmt(100.0 * swing) + "%";
  }
  ScenarioResult res;
  res.artifacts.push_back(
      write_artifact(opts.out_dir, "fig3_payments.csv", csv.str()));
  res.summary = summary;
  return res;
}

ScenarioResult fig4_params(const MarketConfig& cfg,
                           const ScenarioOptions& opts) {
  const FeaturePanel panel = apply_configured_noise(generate_panel(cfg), cfg);
  FeatureSet all;
  for (std::size_t k = 0; k < panel.num_features(); ++k) all.push_back(k);
  const Matrix x = design_matrix(panel, all);
  RlsState st = rls_prior(static_cast<std::size_t>(x.cols()));
  constexpr std::size_t kStep = 100;
  std::ostringstream csv;
  csv << "t";
  for (Eigen::Index j = 0; j < x.cols(); ++j) csv << ",theta" << j;
  csv << "\n";
  for (std::size_t t = 0; t < panel.tau(); ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    rls_update_in_place(st, x.row(row).transpose(), panel.y(row));
    if ((t + 1) % kStep == 0 || t + 1 == panel.tau()) {
      csv << (t + 1);
      for (Eigen::Index j = 0; j < st.theta.size(); ++j) csv << "," << fmt(st.theta(j));
      csv << "\n";
    }
  }
  double err = 0.0;
  for (Eigen::Index j = 0; j < st.theta.size(); ++j) {
    err = std::max(err, std::abs(st.theta(j) -
                                 cfg.theta_true[static_cast<std::size_t>(j)]));
  }
  ScenarioResult res;
  res.artifacts.push_back(
      write_artifact(opts.out_dir, "fig4_params.csv", csv.str()));
  res.summary = "fig4_params: final max |theta_hat - theta| = " + fmt(err);
  return res;
}

ScenarioResult fig5_losses(const MarketConfig& cfg,
                           const ScenarioOptions& opts) {
  if (cfg.n_agents < 3) {
    throw ConfigError("fig5_losses needs the learner and two supporting agents");
  }
  const FeaturePanel panel = apply_configured_noise(generate_panel(cfg), cfg);
  FeatureSet central = panel.features_of(0), partial, full;
  for (std::size_t a = 0; a < cfg.n_agents; ++a) {
    const auto f = panel.features_of(a);
    if (a + 1 < cfg.n_agents) partial.insert(partial.end(), f.begin(), f.end());
    full.insert(full.end(), f.begin(), f.end());
  }
  std::sort(partial.begin(), partial.end());
  std::sort(full.begin(), full.end());
  const LossSeries series = scenario_losses(
      panel, {central, partial, full}, {"central", "partial", "full"},
      std::max<std::size_t>(1, panel.tau() / 10));
  std::ostringstream csv;
  write_loss_csv(series, csv);
  ScenarioResult res;
  res.artifacts.push_back(
      write_artifact(opts.out_dir, "fig5_losses.csv", csv.str()));
  res.summary = "fig5_losses: final normalized loss central " +
                fmt(series.normalized[0].back()) + ", partial " +
                fmt(series.normalized[1].back()) + ", full " +
                fmt(series.normalized[2].back());
  return res;
}

ScenarioResult fig6_dynamic(const MarketConfig& base,
                            const ScenarioOptions& opts) {
  MarketConfig cfg = base;
  if (cfg.departures.empty() && cfg.n_agents >= 2) {
    cfg.departures.push_back({cfg.n_agents - 1, 3});
  }
  validate_config(cfg);
  ScenarioResult res;
  std::ostringstream csv;
  csv << "mode,iter,agent,payment,normalized_payment\n";
  std::string summary = "fig6_dynamic: payment to departed agents after leaving";
  for (MarketMode mode : kModes) {
    const MarketTrace trace = run_market(cfg, mode);
    payment_rows(csv, trace, mode);
    std::ostringstream trace_csv;
    write_trace_csv(trace, trace_csv);
    const std::string stem = std::string("fig6_") + to_string(mode);
    res.artifacts.push_back(
        write_artifact(opts.out_dir, stem + ".csv", trace_csv.str()));
    res.artifacts.push_back(write_artifact(
        opts.out_dir, stem + ".json",
        trace_to_json(trace, cfg, mode).dump(2) + "\n"));
    double unearned = 0.0;
    for (const auto& r : trace.iterations) {
      for (const auto& d : cfg.departures) {
        if (r.iteration >= d.iteration) unearned += r.state.allocation[d.agent];
      }
    }
    summary += std::string(" ") + to_string(mode) + " " + fmt(unearned);
  }
  res.artifacts.insert(res.artifacts.begin(),
                       write_artifact(opts.out_dir, "fig6_dynamic.csv", csv.str()));
  res.summary = summary;
  return res;
}

std::string run_row(const RunSummary& s) {
  return std::to_string(s.iterations) + "," + to_string(s.stop) + "," +
         fmt(s.eps_asked) + "," + fmt(s.price) + "," + fmt(s.utility);
}

ScenarioResult fig7_convergence(const MarketConfig& cfg,
                                const ScenarioOptions& opts) {
  if (cfg.num_features() <= kPairB) {
    throw ConfigError("fig7_convergence needs at least four features");
  }
  const std::vector<double> rhos = {0.0, 0.5, 1.0};
  const auto& refs = eps_ref_grid();
  const std::size_t seeds = std::max<std::size_t>(1, opts.seeds);
  const std::size_t count = rhos.size() * refs.size() * seeds;
  std::vector<RunSummary> runs(count);
  parallel_map(count, opts.jobs, [&](std::size_t i) {
    const std::size_t s = i % seeds;
    const std::size_t e = (i / seeds) % refs.size();
    const std::size_t r = i / (seeds * refs.size());
    MarketConfig c = with_pair_correlation(seeded(cfg, s), kPairA, kPairB, rhos[r]);
    c.eps_ref = refs[e];
    runs[i] = summarize_run(c, MarketMode::kAlgorithm1);
    return std::string();
  });
  std::ostringstream csv, detail;
  csv << "rho,eps_ref,iterations\n";
  detail << "rho,eps_ref,seed,iterations,stop_reason,eps_asked,price,utility\n";
  std::map<std::pair<std::size_t, std::size_t>, double> avg;
  for (std::size_t r = 0; r < rhos.size(); ++r) {
    for (std::size_t e = 0; e < refs.size(); ++e) {
      std::vector<double> iters;
      for (std::size_t s = 0; s < seeds; ++s) {
        const RunSummary& run = runs[(r * refs.size() + e) * seeds + s];
        iters.push_back(static_cast<double>(run.iterations));
        detail << fmt(rhos[r]) << "," << fmt(refs[e]) << "," << (cfg.seed + s)
               << "," << run_row(run) << "\n";
      }
      avg[{r, e}] = mean(iters);
      csv << fmt(rhos[r]) << "," << fmt(refs[e]) << "," << fmt(avg[{r, e}])
          << "\n";
    }
  }
  ScenarioResult res;
  res.artifacts.push_back(
      write_artifact(opts.out_dir, "fig7_convergence.csv", csv.str()));
  res.artifacts.push_back(
      write_artifact(opts.out_dir, "fig7_convergence_runs.csv", detail.str()));
  res.summary = "fig7_convergence: mean iterations at eps_ref=ln10: rho=0 " +
                fmt(avg[{0, 0}]) + ", rho=0.5 " + fmt(avg[{1, 0}]) +
                ", rho=1 " + fmt(avg[{2, 0}]);
  return res;
}

ScenarioResult market_utility(const MarketConfig& cfg,
                              const ScenarioOptions& opts) {
  const std::vector<double> refs = {std::log(10.0), std::log(60.0)};
  const std::size_t seeds = std::max<std::size_t>(1, opts.seeds);
  const std::size_t nm = std::size(kModes);
  const std::size_t count = refs.size() * nm * seeds;
  std::vector<RunSummary> runs(count);
  parallel_map(count, opts.jobs, [&](std::size_t i) {
    const std::size_t s = i % seeds;
    const std::size_t m = (i / seeds) % nm;
    const std::size_t e = i / (seeds * nm);
    MarketConfig c = seeded(cfg, s);
    c.eps_ref = refs[e];
    runs[i] = summarize_run(c, kModes[m]);
    return std::string();
  });
  std::ostringstream csv, detail;
  csv << "eps_ref,mode,utility\n";
  detail << "eps_ref,mode,seed,iterations,stop_reason,eps_asked,price,utility\n";
  std::string summary = "market_utility:";
  for (std::size_t e = 0; e < refs.size(); ++e) {
    summary += e == 0 ? " ln10" : "; ln60";
    for (std::size_t m = 0; m < nm; ++m) {
      std::vector<double> u;
      for (std::size_t s = 0; s < seeds; ++s) {
        const RunSummary& run = runs[(e * nm + m) * seeds + s];
        u.push_back(run.utility);
        detail << fmt(refs[e]) << "," << to_string(kModes[m]) << ","
               << (cfg.seed + s) << "," << run_row(run) << "\n";
      }
      csv << fmt(refs[e]) << "," << to_string(kModes[m]) << "," << fmt(mean(u))
          << "\n";
      summary += std::string(" ") + to_string(kModes[m]) + " " + fmt(mean(u));
    }
  }
  ScenarioResult res;
  res.artifacts.push_back(
      write_artifact(opts.out_dir, "market_utility.csv", csv.str()));
  res.artifacts.push_back(
      write_artifact(opts.out_dir, "market_utility_runs.csv", detail.str()));
  res.summary = summary;
  return res;
}

using ScenarioFn = ScenarioResult (*)(const MarketConfig&,
                                      const ScenarioOptions&);

const std::vector<std::pair<std::string, ScenarioFn>>& registry() {
  static const std::vector<std::pair<std::string, ScenarioFn>> r = {
      {"fig1_heatmap", fig1_heatmap},       {"fig2_valuation", fig2_valuation},
      {"fig3_payments", fig3_payments},     {"fig4_params", fig4_params},
      {"fig5_losses", fig5_losses},         {"fig6_dynamic", fig6_dynamic},
      {"fig7_convergence", fig7_convergence}, {"market_utility", market_utility},
  };
  return r;
}

std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows[i].push_back(m(i, j));
  }
  return rows;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

ScenarioResult run_scenario(const std::string& name, const MarketConfig& cfg_in,
                            const ScenarioOptions& opts) {
  ScenarioFn fn = nullptr;
  for (const auto& [n, f] : registry()) {
    if (n == name) fn = f;
  }
  if (fn == nullptr) throw UnknownScenarioError("unknown scenario: " + name);
  MarketConfig cfg = cfg_in;
  if (opts.seed) cfg.seed = *opts.seed;
  validate_config(cfg);
  logger().info("scenario {} seed {}", name, cfg.seed);
  return fn(cfg, opts);
}

std::vector<std::string> parallel_map(
    std::size_t count, std::size_t jobs,
    const std::function<std::string(std::size_t)>& fn) {
  std::vector<std::string> out(count);
  const std::size_t workers = std::min(resolve_jobs(jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

MarketConfig with_pair_correlation(MarketConfig cfg, std::size_t a,
                                   std::size_t b, double rho) {
  Matrix corr = cfg.correlation();
  const auto ia = static_cast<Eigen::Index>(a);
  const auto ib = static_cast<Eigen::Index>(b);
  if (ia >= corr.rows() || ib >= corr.rows()) {
    throw ConfigError("correlated pair outside the feature range");
  }
  corr(ia, ib) = corr(ib, ia) = rho;
  cfg.corr = to_rows(corr);
  return cfg;
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names = {
      "tau",    "noise_var", "alpha", "beta",  "gamma",      "eps_l",
      "eps_u",  "eps_ref",   "zeta_ref", "p_max", "clip_bound", "max_iterations",
      "rho",    "C",         "psi",   "phi"};
  return names;
}

MarketConfig apply_parameter(MarketConfig cfg, const std::string& name,
                             double v) {
  auto count = [](double x, const std::string& what) {
    if (!(x >= 0.0) || x != std::floor(x)) {
      throw ConfigError(what + " must be a non-negative integer");
    }
    return static_cast<std::size_t>(x);
  };
  if (name == "tau") {
    cfg.tau = count(v, name);
  } else if (name == "noise_var") {
    cfg.noise_var = v;
  } else if (name == "alpha") {
    cfg.alpha = v;
  } else if (name == "beta") {
    cfg.beta = v;
  } else if (name == "gamma") {
    cfg.gamma = v;
  } else if (name == "eps_l") {
    cfg.eps_l = v;
  } else if (name == "eps_u") {
    cfg.eps_u = v;
  } else if (name == "eps_ref") {
    cfg.eps_ref = v;
  } else if (name == "zeta_ref") {
    cfg.zeta_ref = v;
  } else if (name == "p_max") {
    cfg.p_max = v;
  } else if (name == "clip_bound") {
    cfg.clip_bound = v;
  } else if (name == "max_iterations") {
    cfg.max_iterations = count(v, name);
  } else if (name == "rho") {
    cfg = with_pair_correlation(cfg, kPairA, kPairB, v);
  } else if (name == "C") {
    cfg.C.assign(cfg.n_agents, v);
  } else if (name == "psi") {
    cfg.psi.assign(cfg.n_agents, v);
  } else if (name == "phi") {
    cfg.phi.assign(cfg.n_agents, v);
  } else {
    throw ConfigError("unknown sweep parameter: " + name);
  }
  return cfg;
}

std::vector<GridAxis> parse_grid(const std::string& spec) {
  std::vector<GridAxis> grid;
  if (trim(spec).empty()) return grid;
  const auto& known = sweep_parameters();
  for (const std::string& raw : split(spec, ';')) {
    const std::string part = trim(raw);
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("grid axis without '=': " + part);
    }
    GridAxis axis;
    axis.name = trim(part.substr(0, eq));
    if (std::find(known.begin(), known.end(), axis.name) == known.end()) {
      throw ConfigError("unknown sweep parameter: " + axis.name);
    }
    for (const auto& a : grid) {
      if (a.name == axis.name) throw ConfigError("duplicate grid axis: " + axis.name);
    }
    for (const std::string& tok : split(part.substr(eq + 1), ',')) {
      const std::string t = trim(tok);
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(t, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (t.empty() || used != t.size()) {
        throw ConfigError("bad value '" + t + "' for " + axis.name);
      }
      axis.values.push_back(v);
    }
    if (axis.values.empty()) throw ConfigError("no values for " + axis.name);
    grid.push_back(std::move(axis));
  }
  return grid;
}

ScenarioResult run_sweep(const MarketConfig& cfg_in,
                         const std::vector<GridAxis>& grid,
                         const ScenarioOptions& opts) {
  MarketConfig base = cfg_in;
  if (opts.seed) base.seed = *opts.seed;
  validate_config(base);
  std::size_t points = 1;
  for (const auto& a : grid) points *= a.values.size();
  const std::size_t seeds = std::max<std::size_t>(1, opts.seeds);

  // Point configs are built and validated up front so that a bad value fails
  // before any run starts.
  std::vector<std::vector<double>> values(points);
  std::vector<MarketConfig> configs(points);
  for (std::size_t p = 0; p < points; ++p) {
    std::size_t rest = p;
    MarketConfig c = base;
    values[p].resize(grid.size());
    for (std::size_t k = grid.size(); k-- > 0;) {
      const auto& axis = grid[k];
      values[p][k] = axis.values[rest % axis.values.size()];
      rest /= axis.values.size();
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      c = apply_parameter(c, grid[k].name, values[p][k]);
    }
    configs[p] = validate_config(c);
  }

  const std::vector<std::string> rows =
      parallel_map(points * seeds, opts.jobs, [&](std::size_t i) {
        const std::size_t p = i / seeds, s = i % seeds;
        const MarketConfig c = seeded(configs[p], s);
        std::string row;
        for (double v : values[p]) row += fmt(v) + ",";
        return row + std::to_string(c.seed) + "," +
               run_row(summarize_run(c, MarketMode::kAlgorithm1)) + "\n";
      });
  std::string csv;
  for (const auto& a : grid) csv += a.name + ",";
  csv += "seed,iterations,stop_reason,eps_asked,price,utility\n";
  for (const auto& r : rows) csv += r;
  ScenarioResult res;
  res.artifacts.push_back(write_artifact(opts.out_dir, "sweep.csv", csv));
  res.summary = "sweep: " + std::to_string(rows.size()) + " runs over " +
                std::to_string(points) + " grid points";
  return res;
}

RunSummary summarize_run(const MarketConfig& cfg, MarketMode mode) {
  const MarketTrace trace = run_market(cfg, mode);
  RunSummary s;
  s.iterations = trace.iterations_to_convergence();
  s.stop = trace.stop_reason;
  const IterationRecord& last = trace.final_record();
  s.utility = last.central_utility;
  s.eps_asked = last.state.eps_asked;
  s.price = last.state.price_offered;
  return s;
}

}  // namespace regmarket
