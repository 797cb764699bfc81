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

// Batch least squares, recursive least squares, and loss estimates for
// participation scenarios. Feature sets are lists of panel column indices; the
// design always carries a leading unit column.

#ifndef REGMARKET_REGRESSION_HPP_
#define REGMARKET_REGRESSION_HPP_

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "regmarket/market_model.hpp"

namespace regmarket {

using FeatureSet = std::vector<std::size_t>;

class SingularDesignError : public std::runtime_error {
 public:
  SingularDesignError(const std::string& msg, FeatureSet columns)
      : std::runtime_error(msg), columns_(std::move(columns)) {}
  // Panel columns found to be linearly dependent on earlier ones.
  const FeatureSet& columns() const { return columns_; }

 private:
  FeatureSet columns_;
};

struct RegressionFit {
  Vector theta_hat;  // bias first
  double loss = 0.0;  // sum of squared residuals
  FeatureSet feature_set;
  bool ridge_used = false;
};

struct FitOptions {
  bool allow_ridge = true;
};

// Ridge penalty used when the design is rank deficient, relative to
// trace(X^T X) / d.
inline constexpr double kRidgeScale = 1e-8;

// [1, x_f...] over the first `rows` rows (all rows when rows == 0).
Matrix design_matrix(const FeaturePanel& panel, const FeatureSet& features,
                     std::size_t rows = 0);

RegressionFit fit_batch(const FeaturePanel& panel, const FeatureSet& features,
                        const FitOptions& options = {});

// Sum of squared residuals of theta on the selected columns.
double quadratic_loss(const FeaturePanel& panel, const FeatureSet& features,
                      const Vector& theta);

struct RlsState {
  Vector theta;
  Matrix P;
  double lambda = 1.0;
};

RlsState rls_prior(std::size_t dim, double kappa = 1e6, double lambda = 1.0);
// Starts from a batch fit: theta = theta_hat, P = (X^T X)^-1.
RlsState rls_from_fit(const RegressionFit& fit, const Matrix& design,
                      double lambda = 1.0);
// x_t includes the leading 1 when the model has a bias.
RlsState rls_update(const RlsState& state, const Vector& x_t, double y_t);
void rls_update_in_place(RlsState& state, const Vector& x_t, double y_t);
bool is_positive_definite(const Matrix& p);

// Least-squares losses for many feature subsets of one data set, computed
// from the Gram matrix of [1, x_1..x_K, y].
class GramLoss {
 public:
  GramLoss(Matrix gram, std::size_t tau);
  static GramLoss from_panel(const FeaturePanel& panel);

  // Minimum sum of squared residuals over the subset.
  double loss(const FeatureSet& features) const;
  Vector theta(const FeatureSet& features, bool* ridge_used = nullptr) const;
  std::size_t tau() const { return tau_; }
  const Matrix& gram() const { return gram_; }

 private:
  Matrix gram_;
  std::size_t tau_;
  Eigen::Index k_;
};

struct LossSeries {
  std::vector<std::string> names;
  std::vector<std::size_t> checkpoints;
  // raw[s][c]: mean squared residual of scenario s's current RLS estimate over
  // the window of \`step\` samples ending at checkpoints[c].
  std::vector<std::vector<double>> raw;
  std::vector<std::vector<double>> normalized;
};

// Runs an RLS learner per scenario over the panel in time order and reports
// the windowed loss at t = step, 2*step, ..., normalized by the largest value
// across scenarios and checkpoints.
LossSeries scenario_losses(const FeaturePanel& panel,
                           const std::vector<FeatureSet>& scenarios,
                           const std::vector<std::string>& names = {},
                           std::size_t step = 1000);

// CSV: t,scenario,normalized_loss
void write_loss_csv(const LossSeries& series, std::ostream& out);

}  // namespace regmarket

#endif  // REGMARKET_REGRESSION_HPP_
