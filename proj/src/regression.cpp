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

#include "regmarket/regression.hpp"

#include <algorithm>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "regmarket/format.hpp"

namespace regmarket {
namespace {

Vector ridge_solve(const Matrix& a, const Vector& b) {
  const double d = static_cast<double>(a.rows());
  const double penalty = kRidgeScale * a.trace() / d;
  Matrix reg = a;
  reg.diagonal().array() += penalty > 0.0 ? penalty : kRidgeScale;
  return reg.ldlt().solve(b);
}

}  // namespace

Matrix design_matrix(const FeaturePanel& panel, const FeatureSet& features,
                     std::size_t rows) {
  const Eigen::Index n =
      rows == 0 ? panel.x.rows() : static_cast<Eigen::Index>(rows);
  Matrix d(n, static_cast<Eigen::Index>(features.size()) + 1);
  d.col(0).setOnes();
  for (std::size_t i = 0; i < features.size(); ++i) {
    d.col(static_cast<Eigen::Index>(i) + 1) =
        panel.x.col(static_cast<Eigen::Index>(features[i])).head(n);
  }
  return d;
}

double quadratic_loss(const FeaturePanel& panel, const FeatureSet& features,
                      const Vector& theta) {
  return (panel.y - design_matrix(panel, features) * theta).squaredNorm();
}

RegressionFit fit_batch(const FeaturePanel& panel, const FeatureSet& features,
                        const FitOptions& options) {
  const Matrix x = design_matrix(panel, features);
  RegressionFit fit;
  fit.feature_set = features;
  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  if (qr.rank() == x.cols()) {
    fit.theta_hat = qr.solve(panel.y);
  } else {
    if (!options.allow_ridge) {
      FeatureSet bad;
      const auto& perm = qr.colsPermutation().indices();
      for (Eigen::Index i = qr.rank(); i < x.cols(); ++i) {
        // Column 0 of the design is the bias.
        if (perm(i) > 0) bad.push_back(features[perm(i) - 1]);
      }
      std::sort(bad.begin(), bad.end());
      std::string msg = "rank-deficient design; dependent columns:";
      for (std::size_t c : bad) msg += " x" + std::to_string(c + 1);
      throw SingularDesignError(msg, bad);
    }
    fit.theta_hat = ridge_solve(x.transpose() * x, x.transpose() * panel.y);
    fit.ridge_used = true;
  }
  fit.loss = (panel.y - x * fit.theta_hat).squaredNorm();
  return fit;
}

RlsState rls_prior(std::size_t dim, double kappa, double lambda) {
  const auto d = static_cast<Eigen::Index>(dim);
  return RlsState{Vector::Zero(d), kappa * Matrix::Identity(d, d), lambda};
}

RlsState rls_from_fit(const RegressionFit& fit, const Matrix& design,
                      double lambda) {
  const Matrix g = design.transpose() * design;
  const auto d = g.rows();
  return RlsState{fit.theta_hat, g.ldlt().solve(Matrix::Identity(d, d)),
                  lambda};
}

void rls_update_in_place(RlsState& s, const Vector& x_t, double y_t) {
  const Vector px = s.P * x_t;
  const double denom = s.lambda + x_t.dot(px);
  const Vector k = px / denom;
  s.theta += k * (y_t - x_t.dot(s.theta));
  s.P -= k * px.transpose();
  s.P = 0.5 * (s.P + s.P.transpose()).eval();
  if (s.lambda != 1.0) s.P /= s.lambda;
}

RlsState rls_update(const RlsState& state, const Vector& x_t, double y_t) {
  RlsState next = state;
  rls_update_in_place(next, x_t, y_t);
  return next;
}

bool is_positive_definite(const Matrix& p) {
  return p.llt().info() == Eigen::Success;
}

GramLoss::GramLoss(Matrix gram, std::size_t tau)
    : gram_(std::move(gram)), tau_(tau), k_(gram_.rows() - 2) {}

GramLoss GramLoss::from_panel(const FeaturePanel& panel) {
  const Eigen::Index n = panel.x.rows();
  const Eigen::Index k = panel.x.cols();
  Matrix a(n, k + 2);
  a.col(0).setOnes();
  a.middleCols(1, k) = panel.x;
  a.col(k + 1) = panel.y;
  Matrix g = Matrix::Zero(k + 2, k + 2);
  g.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
  g = g.selfadjointView<Eigen::Lower>();
  return GramLoss(std::move(g), static_cast<std::size_t>(n));
}

Vector GramLoss::theta(const FeatureSet& features, bool* ridge_used) const {
  const auto d = static_cast<Eigen::Index>(features.size()) + 1;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d));
  idx[0] = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    idx[i + 1] = static_cast<Eigen::Index>(features[i]) + 1;
  }
  Matrix a(d, d);
  Vector b(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    b(i) = gram_(idx[i], k_ + 1);
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = gram_(idx[i], idx[j]);
  }
  Eigen::LDLT<Matrix> ldlt(a);
  const bool singular = ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-13;
  if (ridge_used) *ridge_used = singular;
  return singular ? ridge_solve(a, b) : Vector(ldlt.solve(b));
}

double GramLoss::loss(const FeatureSet& features) const {
  const Vector th = theta(features);
  const auto d = th.size();
  double quad = gram_(k_ + 1, k_ + 1);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d));
  idx[0] = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    idx[i + 1] = static_cast<Eigen::Index>(features[i]) + 1;
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    quad -= 2.0 * th(i) * gram_(idx[i], k_ + 1);
    for (Eigen::Index j = 0; j < d; ++j) {
      quad += th(i) * th(j) * gram_(idx[i], idx[j]);
    }
  }
  return std::max(quad, 0.0);
}

LossSeries scenario_losses(const FeaturePanel& panel,
                           const std::vector<FeatureSet>& scenarios,
                           const std::vector<std::string>& names,
                           std::size_t step) {
  LossSeries out;
  const std::size_t tau = panel.tau();
  for (std::size_t t = step; t <= tau; t += step) out.checkpoints.push_back(t);
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    out.names.push_back(s < names.size() ? names[s]
                                         : "scenario" + std::to_string(s + 1));
  }
  out.raw.assign(scenarios.size(), std::vector<double>(out.checkpoints.size()));

  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const Matrix x = design_matrix(panel, scenarios[s]);
    RlsState rls = rls_prior(static_cast<std::size_t>(x.cols()));
    std::size_t c = 0;
    for (std::size_t t = 0; t < tau && c < out.checkpoints.size(); ++t) {
      const auto row = static_cast<Eigen::Index>(t);
      rls_update_in_place(rls, x.row(row).transpose(), panel.y(row));
      if (t + 1 == out.checkpoints[c]) {
        const auto start = static_cast<Eigen::Index>(t + 1 - step);
        const auto len = static_cast<Eigen::Index>(step);
        const Vector r =
            panel.y.segment(start, len) - x.middleRows(start, len) * rls.theta;
        out.raw[s][c] = r.squaredNorm() / static_cast<double>(step);
        ++c;
      }
    }
  }

  double peak = 0.0;
  for (const auto& row : out.raw) {
    for (double v : row) peak = std::max(peak, v);
  }
  out.normalized = out.raw;
  if (peak > 0.0) {
    for (auto& row : out.normalized) {
      for (double& v : row) v /= peak;
    }
  }
  return out;
}

void write_loss_csv(const LossSeries& series, std::ostream& out) {
  out << "t,scenario,normalized_loss\n";
  for (std::size_t c = 0; c < series.checkpoints.size(); ++c) {
    for (std::size_t s = 0; s < series.names.size(); ++s) {
      out << series.checkpoints[c] << "," << series.names[s] << ","
          << format_number(series.normalized[s][c]) << "\n";
    }
  }
}

}  // namespace regmarket
