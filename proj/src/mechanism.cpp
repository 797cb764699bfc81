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

#include "regmarket/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "regmarket/config_io.hpp"
#include "regmarket/datagen.hpp"
#include "regmarket/format.hpp"
#include "regmarket/logging.hpp"
#include "regmarket/rng.hpp"
#include "regmarket/valuation.hpp"

namespace regmarket {

double learner_valuation(double eps, double p, double alpha, double beta,
                         ValuationForm form) {
  const double base = std::log1p(alpha * eps * p);
  if (form == ValuationForm::kPower) return std::pow(base, -beta);
  return -beta * base;
}

UtilityParams UtilityParams::from_config(const MarketConfig& cfg) {
  return UtilityParams{cfg.alpha, cfg.beta, cfg.eps_l, cfg.eps_u,
                       cfg.valuation_form};
}

double central_utility(double p, double eps, double performance,
                       double payment_weight, const UtilityParams& params) {
  if (eps == 0.0) return -p * payment_weight;
  if (eps < params.eps_l || eps > params.eps_u) return 0.0;
  return performance *
             learner_valuation(eps, p, params.alpha, params.beta, params.form) -
         p * payment_weight;
}

PerformanceReport performance_improvement(double loss_central,
                                          double loss_with, double zeta_ref,
                                          PerformanceForm form) {
  PerformanceReport r;
  r.gap = loss_central - loss_with;
  const double mag = std::abs(r.gap);
  r.degenerate = mag < kPerformanceFloor;
  if (form == PerformanceForm::kReciprocal) {
    r.value = 1.0 / std::max(kPerformanceFloor, mag);
  } else {
    r.value = loss_central > 0.0 ? mag / loss_central : 0.0;
  }
  r.meets_reference = r.value > zeta_ref;
  return r;
}

PerformanceReport performance_improvement(
    const FeaturePanel& panel, const std::vector<std::size_t>& participants,
    const std::vector<PrivacySpec>& specs, const Matrix& unit_noise,
    double zeta_ref, PerformanceForm form) {
  std::vector<double> eps(panel.ownership.size() + 1, 0.0);
  std::size_t n_agents = 1;
  for (std::size_t o : panel.ownership) n_agents = std::max(n_agents, o + 1);
  eps.assign(n_agents, 0.0);
  double clip_bound = 3.0;
  for (std::size_t i = 0; i < participants.size(); ++i) {
    eps.at(participants[i]) = specs.at(i).epsilon;
    clip_bound = specs.at(i).clip_bound;
  }
  const FeaturePanel traded =
      participants.empty() ? panel
                           : perturb_panel(panel, eps, clip_bound, unit_noise);
  const GramLoss gram = GramLoss::from_panel(traded);
  FeatureSet central = panel.features_of(0);
  FeatureSet with = central;
  for (std::size_t a : participants) {
    const auto f = panel.features_of(a);
    with.insert(with.end(), f.begin(), f.end());
  }
  std::sort(with.begin(), with.end());
  const double tau = static_cast<double>(panel.tau());
  return performance_improvement(gram.loss(central) / tau, gram.loss(with) / tau,
                                 zeta_ref, form);
}

std::vector<double> allocate_prices(double p,
                                    const std::vector<double>& contributions) {
  std::vector<double> out(contributions.size(), 0.0);
  double total = 0.0;
  for (double c : contributions) total += std::max(c, 0.0);
  if (total <= 0.0) return out;
  for (std::size_t i = 0; i < contributions.size(); ++i) {
    out[i] = p * (std::max(contributions[i], 0.0) / total);
  }
  return out;
}

double asked_epsilon_update(const std::vector<double>& eps_responses,
                            double eps_ref) {
  double e = eps_ref;
  for (double r : eps_responses) e = std::max(e, r);
  return e;
}

PriceSolution optimize_price(const PriceProblem& pr) {
  auto f = [&](double p) {
    const double w = pr.weight_at ? pr.weight_at(p) : pr.payment_weight;
    return central_utility(p, pr.eps, pr.performance, w, pr.params);
  };
  PriceSolution sol;
  if (pr.p_floor >= pr.p_max) {
    logger().warn("empty price bracket ({}, {}]; offering p_max", pr.p_floor,
                  pr.p_max);
    sol.price = pr.p_max;
    sol.utility = f(pr.p_max);
    sol.empty_bracket = true;
    return sol;
  }
  constexpr double kInvPhi = 0.6180339887498949;
  constexpr double kTol = 1e-6;
  double a = std::max(pr.p_floor, 0.0), b = pr.p_max;
  if (pr.weight_at) {
    // The anticipated weight can make S non-concave; bracket the best point
    // of a coarse scan first.
    constexpr int kScan = 64;
    const double h = (b - a) / kScan;
    int best = 1;
    double best_f = f(a + h);
    for (int i = 2; i <= kScan; ++i) {
      const double v = f(a + i * h);
      if (v > best_f) {
        best_f = v;
        best = i;
      }
    }
    const double lo = a + (best - 1) * h;
    b = std::min(b, a + (best + 1) * h);
    a = lo;
  }
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > kTol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  sol.price = 0.5 * (a + b);
  sol.utility = f(sol.price);
  const double top = f(pr.p_max);
  if (top >= sol.utility) {
    sol.price = pr.p_max;
    sol.utility = top;
  }
  return sol;
}

const char* to_string(MarketMode mode) {
  switch (mode) {
    case MarketMode::kAlgorithm1:
      return "algorithm1";
    case MarketMode::kCaseI:
      return "case1";
    case MarketMode::kCaseII:
      return "case2";
  }
  return "unknown";
}

namespace {

// Gram matrix of [1, clip(x) + h D, y] for per-column noise scales h, built
// from blocks computed once per run.
class PerturbedGram {
 public:
  PerturbedGram(const FeaturePanel& panel, const Matrix& unit_noise,
                double clip_bound)
      : k_(panel.x.cols()), tau_(panel.tau()) {
    const Eigen::Index n = panel.x.rows();
    Matrix a0(n, k_ + 2), a1 = Matrix::Zero(n, k_ + 2);
    a0.col(0).setOnes();
    for (Eigen::Index j = 0; j < k_; ++j) {
      const bool central = panel.ownership[static_cast<std::size_t>(j)] == 0;
      a0.col(j + 1) = central ? Vector(panel.x.col(j))
                              : Vector(panel.x.col(j).array().max(-clip_bound).min(
                                    clip_bound));
      if (!central) a1.col(j + 1) = unit_noise.col(j);
    }
    a0.col(k_ + 1) = panel.y;
    g00_ = a0.transpose() * a0;
    g01_ = a0.transpose() * a1;
    g11_ = a1.transpose() * a1;
  }

  GramLoss at(const Vector& scale) const {
    Vector h = Vector::Zero(k_ + 2);
    h.segment(1, k_) = scale;
    Matrix g = g00_;
    g += g01_ * h.asDiagonal();
    g += h.asDiagonal() * g01_.transpose();
    g += h.asDiagonal() * g11_ * h.asDiagonal();
    return GramLoss(std::move(g), tau_);
  }

 private:
  Eigen::Index k_;
  std::size_t tau_;
  Matrix g00_, g01_, g11_;
};

double effective_phi(const MarketConfig& cfg, std::size_t n) {
  if (!cfg.leakage_correlation) return cfg.phi_of(n);
  const Matrix corr = cfg.correlation();
  double extra = 0.0;
  for (std::size_t m = 0; m < cfg.n_agents; ++m) {
    if (m == n) continue;
    double rho = 0.0;
    for (std::size_t a : cfg.features_of(n)) {
      for (std::size_t b : cfg.features_of(m)) {
        rho = std::max(rho, std::abs(corr(static_cast<Eigen::Index>(a),
                                          static_cast<Eigen::Index>(b))));
      }
    }
    extra += rho;
  }
  return cfg.phi_of(n) * (1.0 + extra);
}

ResponseModel make_response_model(const MarketConfig& cfg, double eps,
                                  const std::vector<double>& price,
                                  const std::vector<bool>& eligible) {
  ResponseModel m = ResponseModel::from_config(cfg, eps, price, eligible);
  for (std::size_t n = 0; n < cfg.n_agents; ++n) m.phi[n] = effective_phi(cfg, n);
  return m;
}

bool departed(const MarketConfig& cfg, std::size_t agent, std::size_t iter) {
  for (const auto& d : cfg.departures) {
    if (d.agent == agent && iter >= d.iteration) return true;
  }
  return false;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

double anticipated_weight(const EquilibriumState& state,
                          const MarketConfig& cfg, double p) {
  if (!state.anticipated) return state.payment_weight;
  const ResponseModel model = make_response_model(
      cfg, state.eps_asked, allocate_prices(p, state.contributions),
      state.eligible);
  const FixedPointResult fp = solve_fixed_point(model);
  double w = state.unearned_weight;
  for (std::size_t a = 0; a < fp.q.size(); ++a) {
    if (state.counted[a]) w += fp.q[a];
  }
  return w;
}

MarketTrace run_market(const MarketConfig& cfg_in, MarketMode mode) {
  const MarketConfig cfg = validate_config(cfg_in);
  const std::size_t n = cfg.n_agents;
  const double sensitivity = 2.0 * cfg.clip_bound;
  const UtilityParams params = UtilityParams::from_config(cfg);

  MarketTrace trace;
  Rng pref_rng = make_rng(cfg.seed, Stream::kPreferences);
  trace.eps_types = sample_preferences(cfg, pref_rng);
  Rng ask_rng = make_rng(cfg.seed, Stream::kInitialAsk);
  double eps = uniform(ask_rng, cfg.eps_ref, cfg.eps_u);

  std::vector<std::size_t> active;
  for (std::size_t a = 1; a < n; ++a) active.push_back(a);
  if (active.empty()) {
    IterationRecord rec;
    rec.iteration = 1;
    rec.state.eps_asked = eps;
    rec.state.q_star.assign(n, 0.0);
    rec.state.eps_response.assign(n, 0.0);
    rec.state.allocation.assign(n, 0.0);
    rec.state.contributions.assign(n, 0.0);
    rec.agent_utility.assign(n, 0.0);
    rec.agent_excluded.assign(n, false);
    trace.iterations.push_back(rec);
    trace.stop_reason = StopReason::kEmptyActiveSet;
    return trace;
  }

  const FeaturePanel panel = apply_configured_noise(generate_panel(cfg), cfg);
  const Matrix unit_noise =
      unit_laplace_field(panel.tau(), panel.num_features(), cfg.seed);
  const PerturbedGram blocks(panel, unit_noise, cfg.clip_bound);
  const double tau = static_cast<double>(panel.tau());

  std::vector<double> q(n, 1.0);
  q[0] = 0.0;
  double p_floor = 0.0;
  std::vector<double> prev_alloc;
  std::size_t stable = 0;
  std::vector<std::size_t> all_supporting = active;

  for (std::size_t iter = 1; iter <= cfg.max_iterations; ++iter) {
    // Agents that have left stop trading in every mode.
    std::vector<std::size_t> connected;
    for (std::size_t a : active) {
      if (!departed(cfg, a, iter)) connected.push_back(a);
    }
    if (mode == MarketMode::kAlgorithm1) active = connected;

    const std::vector<std::size_t>& valued =
        mode == MarketMode::kAlgorithm1 ? active : all_supporting;
    std::vector<std::size_t> suppliers;
    for (std::size_t a : valued) {
      if (!departed(cfg, a, iter)) suppliers.push_back(a);
    }

    // Everyone who is valued trades at the asked factor.
    Vector scale = Vector::Zero(panel.num_features());
    for (std::size_t f = 0; f < panel.num_features(); ++f) {
      if (panel.ownership[f] != 0) scale(f) = sensitivity / eps;
    }
    const GramLoss gram = blocks.at(scale);
    std::vector<FeatureSet> player_features;
    for (std::size_t a : valued) player_features.push_back(panel.features_of(a));
    const CoalitionScorer scorer(gram, panel.features_of(0), player_features);

    FeatureSet traded = panel.features_of(0);
    for (std::size_t a : suppliers) {
      const auto f = panel.features_of(a);
      traded.insert(traded.end(), f.begin(), f.end());
    }
    std::sort(traded.begin(), traded.end());
    const double loss_central = scorer.loss_central() / tau;
    const double loss_traded = gram.loss(traded) / tau;
    const PerformanceReport perf = performance_improvement(
        loss_central, loss_traded, cfg.zeta_ref, cfg.performance_form);
    const double performance =
        suppliers.empty() ? 0.0 : perf.value;

    std::vector<double> contributions(n, 0.0);
    if (!valued.empty()) {
      Rng shapley_rng = make_rng(cfg.seed, Stream::kShapley, iter);
      const ContributionReport rep =
          cfg.shapley_permutations == 0
              ? shapley_exact(valued.size(), scorer.as_value())
              : shapley_mc(valued.size(), scorer.as_value(),
                           cfg.shapley_permutations, shapley_rng);
      for (std::size_t i = 0; i < valued.size(); ++i) {
        contributions[valued[i]] = rep.shapley[i];
      }
    }

    EquilibriumState state;
    state.eps_asked = eps;
    state.contributions = contributions;
    state.performance = performance;
    state.price_floor = p_floor;
    state.eligible.assign(n, false);
    state.counted.assign(n, false);
    for (std::size_t a : valued) state.eligible[a] = !departed(cfg, a, iter);
    for (std::size_t a : active) state.counted[a] = state.eligible[a];
    // Valued agents that have left or dropped out are still paid their share.
    for (std::size_t a : valued) {
      if (!state.counted[a]) state.unearned_weight += 1.0;
    }
    if (mode == MarketMode::kCaseI) {
      state.payment_weight = static_cast<double>(all_supporting.size());
    } else {
      state.anticipated = true;
    }
    const std::vector<bool>& eligible = state.eligible;

    PriceProblem problem;
    problem.performance = performance;
    problem.eps = eps;
    problem.payment_weight = state.payment_weight;
    problem.p_floor = p_floor;
    problem.p_max = cfg.p_max;
    problem.params = params;
    if (state.anticipated) {
      problem.weight_at = [&](double p) {
        return anticipated_weight(state, cfg, p);
      };
    }
    const PriceSolution price = optimize_price(problem);
    const double weight = state.anticipated
                              ? anticipated_weight(state, cfg, price.price)
                              : state.payment_weight;
    const std::vector<double> allocation =
        allocate_prices(price.price, contributions);

    const ResponseModel model = make_response_model(cfg, eps, allocation, eligible);
    const FixedPointResult fp = solve_fixed_point(model);
    const auto responses = evaluate_responses(model, fp.q, trace.eps_types);

    IterationRecord rec;
    rec.iteration = iter;
    rec.active = active;
    rec.state = state;
    rec.state.q_star = fp.q;
    rec.state.price_offered = price.price;
    rec.state.allocation = allocation;
    rec.state.performance_degenerate = suppliers.empty() || perf.degenerate;
    rec.state.meets_reference = perf.meets_reference;
    rec.state.payment_weight = weight;
    rec.state.eps_response.resize(n);
    rec.agent_utility.assign(n, 0.0);
    rec.agent_excluded.assign(n, false);
    for (std::size_t a = 0; a < n; ++a) {
      rec.state.eps_response[a] = responses[a].eps_response;
      if (a == 0 || !eligible[a]) continue;
      const double type = trace.eps_types[a];
      if (responses[a].excluded) {
        rec.agent_excluded[a] = true;
      } else if (type <= responses[a].eps_response) {
        rec.agent_utility[a] = responses[a].utility;
      }
    }
    rec.central_utility = price.utility;
    rec.loss_central = loss_central;
    rec.loss_traded = loss_traded;
    rec.loss_all = scorer.loss_all() / tau;
    trace.iterations.push_back(rec);

    // Bookkeeping for the next round.
    for (double a : allocation) p_floor = std::max(p_floor, a);
    if (mode != MarketMode::kCaseI) q = fp.q;
    std::vector<std::size_t> next_active;
    for (std::size_t a : active) {
      if (departed(cfg, a, iter + 1)) continue;
      if (mode != MarketMode::kCaseI && fp.q[a] < kMinParticipation) continue;
      next_active.push_back(a);
    }
    std::vector<double> next_resp;
    for (std::size_t a : next_active) next_resp.push_back(responses[a].eps_response);
    const double next_eps =
        std::min(cfg.eps_u, asked_epsilon_update(next_resp, cfg.eps_ref));

    if (next_active.empty()) {
      trace.stop_reason = StopReason::kEmptyActiveSet;
      return trace;
    }
    const bool same_set = next_active == active;
    if (!prev_alloc.empty() && same_set &&
        max_abs_diff(allocation, prev_alloc) < 1e-6 &&
        std::abs(next_eps - eps) < 1e-6) {
      ++stable;
    } else {
      stable = 0;
    }
    if (stable >= 2) {
      trace.stop_reason = StopReason::kConverged;
      return trace;
    }
    prev_alloc = allocation;
    active = std::move(next_active);
    eps = next_eps;
  }
  trace.stop_reason = StopReason::kIterationLimit;
  return trace;
}

MarketTrace run_algorithm1(const MarketConfig& cfg) {
  return run_market(cfg, MarketMode::kAlgorithm1);
}

MarketTrace run_baseline(const MarketConfig& cfg, MarketMode mode) {
  return run_market(cfg, mode);
}

StackelbergReport check_stackelberg(const EquilibriumState& state,
                                    const MarketConfig& cfg,
                                    std::size_t leader_points,
                                    std::size_t follower_points) {
  StackelbergReport rep;
  const UtilityParams params = UtilityParams::from_config(cfg);
  const double s_star = central_utility(state.price_offered, state.eps_asked,
                                        state.performance, state.payment_weight,
                                        params);
  for (std::size_t i = 1; i <= leader_points; ++i) {
    const double p = cfg.p_max * static_cast<double>(i) /
                     static_cast<double>(leader_points);
    if (p <= state.price_floor && state.price_floor < cfg.p_max) continue;
    const double s =
        central_utility(p, state.eps_asked, state.performance,
                        anticipated_weight(state, cfg, p), params);
    rep.leader_violation = std::max(rep.leader_violation, s - s_star);
  }

  const std::size_t n = state.q_star.size();
  std::vector<bool> eligible(n, false);
  for (std::size_t a = 1; a < n; ++a) {
    eligible[a] = state.eligible.empty() ? state.allocation[a] > 0.0
                                         : state.eligible[a];
  }
  const ResponseModel model =
      make_response_model(cfg, state.eps_asked, state.allocation, eligible);
  for (std::size_t a = 1; a < n; ++a) {
    if (!eligible[a]) continue;
    const double gain = model.numerator(a);
    const double leak =
        std::max(leakage_expectation(state.q_star, model.phi[a]), kLeakFloor);
    const double u_star = cutoff_utility(model.response(state.q_star, a), gain,
                                         leak, cfg.eps_l, cfg.eps_u);
    std::vector<double> q = state.q_star;
    for (std::size_t j = 0; j < follower_points; ++j) {
      q[a] = static_cast<double>(j) / static_cast<double>(follower_points - 1);
      const double u = cutoff_utility(model.response(q, a), gain, leak,
                                      cfg.eps_l, cfg.eps_u);
      rep.follower_violation = std::max(rep.follower_violation, u - u_star);
    }
  }
  return rep;
}

IncentiveReport check_incentives(const EquilibriumState& state,
                                 const MarketConfig& cfg,
                                 const std::vector<double>& eps_types,
                                 std::size_t misreports, std::uint64_t seed) {
  IncentiveReport rep;
  const std::size_t n = state.q_star.size();
  std::vector<bool> eligible(n, false);
  for (std::size_t a = 1; a < n; ++a) {
    eligible[a] = state.eligible.empty() ? state.allocation[a] > 0.0
                                         : state.eligible[a];
  }
  const ResponseModel model =
      make_response_model(cfg, state.eps_asked, state.allocation, eligible);
  const auto responses = evaluate_responses(model, state.q_star, eps_types);
  Rng rng = make_rng(seed, Stream::kMisreport);
  bool any = false;
  for (std::size_t a = 1; a < n; ++a) {
    if (!eligible[a]) continue;
    const double threshold = responses[a].eps_response;
    auto joins = [&](double type) {
      return type >= state.eps_asked && type <= threshold;
    };
    // Realized utility at the true type given a join decision.
    auto realized = [&](bool join) {
      if (!join) return Utility{0.0, false};
      return agent_utility(UtilityInputs{
          model.gamma, agent_valuation(1.0, model.price[a], model.eps_asked),
          eps_types[a], responses[a].leak, model.psi[a], model.cost_rate[a],
          model.eps_asked});
    };
    const bool truthful_join = joins(eps_types[a]);
    const Utility truthful = realized(truthful_join);
    if (truthful_join) {
      const double u = truthful.excluded ? -1.0 : truthful.value;
      rep.min_participant_utility =
          any ? std::min(rep.min_participant_utility, u) : u;
      any = true;
      ++rep.participants;
      if (truthful.excluded || truthful.value < 0.0) {
        rep.individually_rational = false;
      }
    }
    for (std::size_t m = 0; m < misreports; ++m) {
      const double report = uniform(rng, cfg.eps_l, cfg.eps_u);
      const Utility lie = realized(joins(report));
      if (truthful < lie) {
        rep.incentive_compatible = false;
        rep.max_misreport_gain =
            std::max(rep.max_misreport_gain, lie.value - truthful.value);
      }
    }
  }
  return rep;
}

nlohmann::ordered_json trace_to_json(const MarketTrace& trace,
                                     const MarketConfig& cfg, MarketMode mode) {
  nlohmann::ordered_json doc;
  doc["config"] = config_to_json(cfg);
  doc["mode"] = to_string(mode);
  doc["stop_reason"] = to_string(trace.stop_reason);
  doc["iterations_to_convergence"] = trace.iterations_to_convergence();
  doc["eps_types"] = trace.eps_types;
  auto iters = nlohmann::ordered_json::array();
  for (const auto& r : trace.iterations) {
    nlohmann::ordered_json j;
    j["iteration"] = r.iteration;
    j["active"] = r.active;
    j["eps_asked"] = r.state.eps_asked;
    j["price_offered"] = r.state.price_offered;
    j["performance"] = r.state.performance;
    j["performance_degenerate"] = r.state.performance_degenerate;
    j["meets_reference"] = r.state.meets_reference;
    j["payment_weight"] = r.state.payment_weight;
    j["central_utility"] = r.central_utility;
    j["q_star"] = r.state.q_star;
    j["eps_response"] = r.state.eps_response;
    j["allocation"] = r.state.allocation;
    j["contributions"] = r.state.contributions;
    j["agent_utility"] = r.agent_utility;
    j["agent_excluded"] = r.agent_excluded;
    j["loss_central"] = r.loss_central;
    j["loss_traded"] = r.loss_traded;
    j["loss_all"] = r.loss_all;
    iters.push_back(std::move(j));
  }
  doc["iterations"] = std::move(iters);
  return doc;
}

void write_trace_csv(const MarketTrace& trace, std::ostream& out) {
  out << "iter,agent,q,eps_response,price,contribution,utility\n";
  for (const auto& r : trace.iterations) {
    for (std::size_t a = 1; a < r.state.q_star.size(); ++a) {
      out << r.iteration << "," << (a + 1) << ","
          << format_number(r.state.q_star[a]) << ","
          << format_number(r.state.eps_response[a]) << ","
          << format_number(r.state.allocation[a]) << ","
          << format_number(r.state.contributions[a]) << ","
          << (r.agent_excluded[a] ? std::string("excluded")
                                  : format_number(r.agent_utility[a]))
          << "\n";
    }
  }
}

}  // namespace regmarket
