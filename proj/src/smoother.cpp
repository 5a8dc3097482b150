#include "predinfer/smoother.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "predinfer/stats.hpp"

namespace predinfer::smoother {

namespace {

constexpr int kDegree = 3;

// Knot span index i with T[i] <= x < T[i+1], restricted to the active range.
int find_span(const std::vector<double>& T, int n_basis, double x) {
  const int p = kDegree;
  if (x >= T[n_basis]) return n_basis - 1;
  if (x <= T[p]) return p;
  int lo = p, hi = n_basis;
  int mid = (lo + hi) / 2;
  while (x < T[mid] || x >= T[mid + 1]) {
    if (x < T[mid]) {
      hi = mid;
    } else {
      lo = mid;
    }
    mid = (lo + hi) / 2;
  }
  return mid;
}

// Cox-de Boor values of the p+1 cubic basis functions that are nonzero on the
// span; N[r] is the value of basis function (span - p + r).
void basis_funs(const std::vector<double>& T, int span, double x, std::array<double, 4>& N) {
  const int p = kDegree;
  std::array<double, 4> left{}, right{};
  N[0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - T[span + 1 - j];
    right[j] = T[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
}

// Values and first derivatives of the nonzero basis functions (NURBS-book
// derivative recursion specialized to first order).
void basis_funs_and_derivs(const std::vector<double>& T, int span, double x,
                           std::array<double, 4>& N, std::array<double, 4>& dN) {
  const int p = kDegree;
  double ndu[4][4];
  std::array<double, 4> left{}, right{};
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - T[span + 1 - j];
    right[j] = T[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int j = 0; j <= p; ++j) N[j] = ndu[j][p];

  for (int r = 0; r <= p; ++r) {
    double a_prev[4] = {1.0, 0.0, 0.0, 0.0};
    double a_cur[4] = {0.0, 0.0, 0.0, 0.0};
    // first derivative only (k = 1)
    const int k = 1;
    const int rk = r - k;
    const int pk = p - k;
    double d = 0.0;
    if (r >= k) {
      a_cur[0] = a_prev[0] / ndu[pk + 1][rk];
      d = a_cur[0] * ndu[rk][pk];
    }
    const int j1 = (rk >= -1) ? 1 : -rk;
    const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
    for (int j = j1; j <= j2; ++j) {
      a_cur[j] = (a_prev[j] - a_prev[j - 1]) / ndu[pk + 1][rk + j];
      d += a_cur[j] * ndu[rk + j][pk];
    }
    if (r <= pk) {
      a_cur[k] = -a_prev[k - 1] / ndu[pk + 1][r];
      d += a_cur[k] * ndu[r][pk];
    }
    dN[r] = d * p;
  }
}

std::vector<double> clamped_knot_vector(const std::vector<double>& interior, double a, double b) {
  std::vector<double> T;
  T.reserve(interior.size() + 8);
  for (int i = 0; i < 4; ++i) T.push_back(a);
  T.insert(T.end(), interior.begin(), interior.end());
  for (int i = 0; i < 4; ++i) T.push_back(b);
  return T;
}

std::vector<double> quantile_knots(const Eigen::VectorXd& x, int count, double a, double b) {
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> interior;
  interior.reserve(count);
  const double span = b - a;
  for (int i = 1; i <= count; ++i) {
    const double p = static_cast<double>(i) / (count + 1);
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double w = h - static_cast<double>(lo);
    const double q = (1.0 - w) * sorted[lo] + w * sorted[hi];
    // keep knots strictly increasing and strictly inside (a, b)
    if (q <= a + 1e-12 * span || q >= b - 1e-12 * span) continue;
    if (!interior.empty() && q <= interior.back() + 1e-12 * span) continue;
    interior.push_back(q);
  }
  return interior;
}

Eigen::MatrixXd second_difference_penalty(int m) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(std::max(m - 2, 0), m);
  for (int i = 0; i + 2 < m; ++i) {
    D(i, i) = 1.0;
    D(i, i + 1) = -2.0;
    D(i, i + 2) = 1.0;
  }
  return D.transpose() * D;
}

struct GcvPoint {
  double log10_lambda = 0.0;
  double gcv = std::numeric_limits<double>::infinity();
  double rss = 0.0;
  double edf = 0.0;
  Eigen::VectorXd coefs;
};

GcvPoint evaluate_lambda(double log10_lambda, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& BtB, const Eigen::VectorXd& Bty,
                         const Eigen::MatrixXd& P, const Eigen::VectorXd& y) {
  GcvPoint pt;
  pt.log10_lambda = log10_lambda;
  const double lambda = std::pow(10.0, log10_lambda);
  const Eigen::MatrixXd M = BtB + lambda * P;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  if (ldlt.info() != Eigen::Success) return pt;
  pt.coefs = ldlt.solve(Bty);
  pt.rss = (y - B * pt.coefs).squaredNorm();
  pt.edf = ldlt.solve(BtB).trace();
  const double n = static_cast<double>(y.size());
  const double denom = n - pt.edf;
  if (!std::isfinite(pt.rss) || !std::isfinite(pt.edf) || denom < 1e-8) return pt;
  pt.gcv = n * pt.rss / (denom * denom);
  return pt;
}

}  // namespace

SplineSmoother fit_spline(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                          const SmootherConfig& config) {
  const Eigen::Index n = x.size();
  if (y.size() != n) {
    throw DimensionMismatch("fit_spline: x and y lengths differ (" + std::to_string(n) +
                            " vs " + std::to_string(y.size()) + ")");
  }
  if (n < 10) throw TooFewPoints("fit_spline: need at least 10 points, got " + std::to_string(n));
  if (!x.allFinite() || !y.allFinite()) throw DegenerateInput("fit_spline: non-finite input");

  const double a = x.minCoeff();
  const double b = x.maxCoeff();
  if (!(b > a)) throw DegenerateInput("fit_spline: x has zero variance");

  SplineSmoother s;
  s.x_min_ = a;
  s.x_max_ = b;
  s.knots_ = clamped_knot_vector(quantile_knots(x, config.interior_knots, a, b), a, b);
  const int m = static_cast<int>(s.knots_.size()) - kDegree - 1;

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, m);
  std::array<double, 4> N;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int span = find_span(s.knots_, m, x[i]);
    basis_funs(s.knots_, span, x[i], N);
    for (int r = 0; r <= kDegree; ++r) B(i, span - kDegree + r) = N[r];
  }
  const Eigen::MatrixXd BtB = B.transpose() * B;
  const Eigen::VectorXd Bty = B.transpose() * y;
  const Eigen::MatrixXd P = second_difference_penalty(m);

  const double step = (config.lambda_grid_points > 1)
                          ? (config.log10_lambda_max - config.log10_lambda_min) /
                                (config.lambda_grid_points - 1)
                          : 1.0;
  double lo = config.log10_lambda_min;
  double hi = config.log10_lambda_max;
  int widenings = 0;
  GcvPoint best;
  while (true) {
    best = GcvPoint{};
    double best_gcv = std::numeric_limits<double>::infinity();
    bool at_low_edge = false, at_high_edge = false;
    const int points = static_cast<int>(std::lround((hi - lo) / step)) + 1;
    for (int i = 0; i < points; ++i) {
      const double e = lo + i * step;
      GcvPoint pt = evaluate_lambda(e, B, BtB, Bty, P, y);
      if (pt.gcv < best_gcv) {
        best_gcv = pt.gcv;
        best = std::move(pt);
        at_low_edge = (i == 0);
        at_high_edge = (i == points - 1);
      }
    }
    if (!std::isfinite(best_gcv)) {
      // every lambda degenerate (e.g. rss identically 0 with n ~ edf); take the
      // largest lambda for a maximally smooth fallback
      best = evaluate_lambda(hi, B, BtB, Bty, P, y);
      s.gcv_at_grid_edge_ = true;
      break;
    }
    if ((at_low_edge || at_high_edge) && widenings < config.max_grid_widenings) {
      ++widenings;
      if (at_low_edge) lo -= 3.0;
      if (at_high_edge) hi += 3.0;
      continue;
    }
    s.gcv_at_grid_edge_ = at_low_edge || at_high_edge;
    break;
  }

  s.coefs_ = best.coefs;
  s.lambda_ = std::pow(10.0, best.log10_lambda);
  s.edf_ = best.edf;
  s.resid_sd_ = std::sqrt(best.rss / std::max(static_cast<double>(n) - best.edf, 1.0));
  return s;
}

double SplineSmoother::predict_one(double x) const {
  if (x < x_min_) return predict_one(x_min_) + derivative_at(x_min_) * (x - x_min_);
  if (x > x_max_) return predict_one(x_max_) + derivative_at(x_max_) * (x - x_max_);
  const int m = static_cast<int>(coefs_.size());
  const int span = find_span(knots_, m, x);
  std::array<double, 4> N;
  basis_funs(knots_, span, x, N);
  double v = 0.0;
  for (int r = 0; r <= kDegree; ++r) v += N[r] * coefs_[span - kDegree + r];
  return v;
}

double SplineSmoother::derivative_at(double x) const {
  const double xc = std::clamp(x, x_min_, x_max_);
  const int m = static_cast<int>(coefs_.size());
  const int span = find_span(knots_, m, xc);
  std::array<double, 4> N, dN;
  basis_funs_and_derivs(knots_, span, xc, N, dN);
  double v = 0.0;
  for (int r = 0; r <= kDegree; ++r) v += dN[r] * coefs_[span - kDegree + r];
  return v;
}

Eigen::VectorXd SplineSmoother::predict(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = predict_one(x[i]);
  return out;
}

AdditiveModel fit_additive(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y,
                           const AdditiveConfig& config) {
  const Eigen::Index n = Z.rows();
  const Eigen::Index d = Z.cols();
  if (d < 1) throw DimensionMismatch("fit_additive: need at least one predictor column");
  if (y.size() != n) throw DimensionMismatch("fit_additive: y length does not match Z rows");
  if (n < 30) throw TooFewPoints("fit_additive: need at least 30 rows, got " + std::to_string(n));

  AdditiveModel model;
  model.intercept = y.mean();
  const double sd_y = std::sqrt((y.array() - model.intercept).square().sum() /
                                std::max<double>(static_cast<double>(n) - 1.0, 1.0));
  const double tol = config.tol_factor * sd_y;

  Eigen::MatrixXd component_fits = Eigen::MatrixXd::Zero(n, d);
  model.components.resize(d);

  for (int iter = 1; iter <= config.max_backfit_iters; ++iter) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      Eigen::VectorXd partial = (y.array() - model.intercept).matrix() -
                                component_fits.rowwise().sum() + component_fits.col(j);
      SplineSmoother s = fit_spline(Z.col(j), partial, config.smoother);
      Eigen::VectorXd vals = s.predict(Z.col(j));
      const double center = vals.mean();
      s.shift(-center);
      vals.array() -= center;
      max_change = std::max(max_change, (vals - component_fits.col(j)).cwiseAbs().maxCoeff());
      component_fits.col(j) = vals;
      model.components[static_cast<std::size_t>(j)] = std::move(s);
    }
    const double rss =
        (y.array() - model.intercept - component_fits.rowwise().sum().array()).square().sum();
    model.rss_trace.push_back(rss);
    model.n_backfit_iters = iter;
    if (max_change <= tol) {
      model.converged = true;
      break;
    }
  }
  return model;
}

Eigen::VectorXd predict_additive(const AdditiveModel& m, const Eigen::MatrixXd& Z) {
  if (Z.cols() != static_cast<Eigen::Index>(m.components.size())) {
    throw DimensionMismatch("predict_additive: column count mismatch");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Constant(Z.rows(), m.intercept);
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    out += m.components[static_cast<std::size_t>(j)].predict(Z.col(j));
  }
  return out;
}

}  // namespace predinfer::smoother
