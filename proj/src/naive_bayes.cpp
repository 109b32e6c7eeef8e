#include <cmath>
#include <numbers>

#include "rsclf/classifiers.hpp"
#include "rsclf/error.hpp"
#include "rsclf/math.hpp"
#include "fit_util.hpp"

namespace rsclf {

using detail::check_width;
using detail::threshold_scores;

MultinomialNb fit_multinomial_nb(const SparseMatrix& x, std::span<const Label> y, const MultinomialNbConfig& cfg) {
  if (!(cfg.alpha > 0.0)) throw UsageError("multinomial NB: alpha must be > 0");
  std::size_t n_class[2];
  detail::count_labels(x, y, n_class, "multinomial NB", true);

  const std::size_t v = x.cols();
  std::vector<double> feature_count[2] = {std::vector<double>(v, 0.0), std::vector<double>(v, 0.0)};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      if (r.vals[k] < 0.0) throw DataError("multinomial NB: negative feature value");
      feature_count[y[i]][r.cols[k]] += r.vals[k];
    }
  }

  MultinomialNb m;
  m.alpha = cfg.alpha;
  const double n = static_cast<double>(x.rows());
  for (int c = 0; c < 2; ++c) {
    m.log_prior[c] = std::log(static_cast<double>(n_class[c]) / n);
    double total = 0.0;
    for (double f : feature_count[c]) total += f;
    const double log_denom = std::log(total + cfg.alpha * static_cast<double>(v));
    m.log_likelihood[c].resize(v);
    for (std::size_t j = 0; j < v; ++j) m.log_likelihood[c][j] = std::log(feature_count[c][j] + cfg.alpha) - log_denom;
  }
  return m;
}

std::vector<double> MultinomialNb::scores(const SparseMatrix& x) const {
  check_width(x, n_features());
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    const double jll0 = log_prior[0] + r.dot(log_likelihood[0]);
    const double jll1 = log_prior[1] + r.dot(log_likelihood[1]);
    out[i] = sigmoid(jll1 - jll0);
  }
  return out;
}

std::vector<Label> MultinomialNb::predict(const SparseMatrix& x, double threshold) const {
  return threshold_scores(scores(x), threshold);
}

GaussianNb fit_gaussian_nb(const SparseMatrix& x, std::span<const Label> y, const GaussianNbConfig& cfg) {
  if (!(cfg.var_smoothing >= 0.0)) throw UsageError("gaussian NB: var_smoothing must be >= 0");
  std::size_t n_class[2];
  detail::count_labels(x, y, n_class, "gaussian NB", true);

  const std::size_t d = x.cols();
  // Per class (index 0, 1) and pooled (index 2).
  std::vector<double> sum[3], nnz[3], sq[3];
  for (int c = 0; c < 3; ++c) {
    sum[c].assign(d, 0.0);
    nnz[c].assign(d, 0.0);
    sq[c].assign(d, 0.0);
  }
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      sum[y[i]][r.cols[k]] += r.vals[k];
      nnz[y[i]][r.cols[k]] += 1.0;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    sum[2][j] = sum[0][j] + sum[1][j];
    nnz[2][j] = nnz[0][j] + nnz[1][j];
  }
  const double count[3] = {static_cast<double>(n_class[0]), static_cast<double>(n_class[1]),
                           static_cast<double>(x.rows())};
  std::vector<double> mean[3];
  for (int c = 0; c < 3; ++c) {
    mean[c].resize(d);
    for (std::size_t j = 0; j < d; ++j) mean[c][j] = sum[c][j] / count[c];
  }
  // Second pass: squared deviations of the stored entries, then the implicit
  // zeros contribute mean^2 each.
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      const auto j = r.cols[k];
      const double dc = r.vals[k] - mean[y[i]][j];
      const double dp = r.vals[k] - mean[2][j];
      sq[y[i]][j] += dc * dc;
      sq[2][j] += dp * dp;
    }
  }
  std::vector<double> var[3];
  double max_var = 0.0;
  for (int c = 0; c < 3; ++c) {
    var[c].resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double zeros = count[c] - nnz[c][j];
      var[c][j] = (sq[c][j] + zeros * mean[c][j] * mean[c][j]) / count[c];
    }
  }
  for (double v : var[2]) max_var = std::max(max_var, v);

  GaussianNb m;
  m.var_floor = max_var > 0.0 ? cfg.var_smoothing * max_var : cfg.var_smoothing;
  if (!(m.var_floor > 0.0)) m.var_floor = 1e-300;
  for (int c = 0; c < 2; ++c) {
    m.prior[c] = count[c] / count[2];
    m.mean[c] = std::move(mean[c]);
    m.var[c] = std::move(var[c]);
    for (double& v : m.var[c]) v += m.var_floor;
  }
  return m;
}

std::vector<double> GaussianNb::scores(const SparseMatrix& x) const {
  check_width(x, n_features());
  const std::size_t d = n_features();
  double log_norm[2];
  for (int c = 0; c < 2; ++c) {
    double s = std::log(prior[c]);
    for (std::size_t j = 0; j < d; ++j) s -= 0.5 * std::log(2.0 * std::numbers::pi * var[c][j]);
    log_norm[c] = s;
  }
  // Quadratic terms are summed feature by feature: expanding them around the
  // zero row cancels catastrophically when variances sit at the floor.
  std::vector<double> row(d, 0.0);
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < r.nnz(); ++k) row[r.cols[k]] = r.vals[k];
    double jll[2] = {log_norm[0], log_norm[1]};
    for (int c = 0; c < 2; ++c) {
      double q = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = row[j] - mean[c][j];
        q += diff * diff / var[c][j];
      }
      jll[c] -= 0.5 * q;
    }
    for (std::size_t k = 0; k < r.nnz(); ++k) row[r.cols[k]] = 0.0;
    out[i] = sigmoid(jll[1] - jll[0]);
  }
  return out;
}

std::vector<Label> GaussianNb::predict(const SparseMatrix& x, double threshold) const {
  return threshold_scores(scores(x), threshold);
}

}  // namespace rsclf
