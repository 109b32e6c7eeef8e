#include <algorithm>
#include <cmath>
#include <numeric>

#include "fit_util.hpp"
#include "rsclf/classifiers.hpp"
#include "rsclf/math.hpp"
#include "rsclf/random.hpp"

namespace rsclf {

std::vector<double> LinearModel::scores(const SparseMatrix& x) const {
  detail::check_width(x, n_features());
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double z = decision(x.row(i));
    out[i] = kind == LinearKind::logistic ? sigmoid(z) : z;
  }
  return out;
}

std::vector<Label> LinearModel::predict(const SparseMatrix& x, double threshold) const {
  auto s = scores(x);
  // SVM margins are not probabilities: the decision is the sign.
  return detail::threshold_scores(s, kind == LinearKind::svm ? 0.0 : threshold);
}

namespace {

double logistic_objective(const SparseMatrix& x, std::span<const Label> y, const LinearModel& m, double l2) {
  constexpr double kClamp = 1e-12;
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double p = std::clamp(sigmoid(m.decision(x.row(i))), kClamp, 1.0 - kClamp);
    loss -= y[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  double wn = 0.0;
  for (double w : m.weights) wn += w * w;
  return loss / static_cast<double>(x.rows()) + 0.5 * l2 * wn;
}

}  // namespace

LinearModel fit_logistic(const SparseMatrix& x, std::span<const Label> y, const LogisticConfig& cfg) {
  if (!(cfg.lr > 0.0)) throw UsageError("logistic regression: lr must be > 0");
  if (cfg.l2 < 0.0) throw UsageError("logistic regression: l2 must be >= 0");
  if (cfg.epochs < 0 || cfg.batch_size < 1) throw UsageError("logistic regression: bad epochs/batch_size");
  std::size_t n_class[2];
  detail::count_labels(x, y, n_class, "logistic regression", true);

  const std::size_t n = x.rows(), d = x.cols();
  LinearModel m;
  m.kind = LinearKind::logistic;
  m.weights.assign(d, 0.0);

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(d);
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      double grad_b = 0.0;
      for (std::size_t b = start; b < end; ++b) {
        const auto r = x.row(order[b]);
        const double g = sigmoid(m.decision(r)) - static_cast<double>(y[order[b]]);
        for (std::size_t k = 0; k < r.nnz(); ++k) grad[r.cols[k]] += g * r.vals[k];
        grad_b += g;
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (std::size_t j = 0; j < d; ++j) m.weights[j] -= cfg.lr * (grad[j] * inv + cfg.l2 * m.weights[j]);
      m.bias -= cfg.lr * grad_b * inv;
    }
    const double obj = logistic_objective(x, y, m, cfg.l2);
    if (!std::isfinite(obj))
      throw NumericError("logistic regression diverged at epoch " + std::to_string(epoch));
  }
  return m;
}

LinearModel fit_linear_svm(const SparseMatrix& x, std::span<const Label> y, const SvmConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw UsageError("linear SVM: lambda must be > 0");
  if (cfg.epochs < 0) throw UsageError("linear SVM: epochs must be >= 0");
  std::size_t n_class[2];
  detail::count_labels(x, y, n_class, "linear SVM", true);

  const std::size_t n = x.rows(), d = x.cols();
  // w = scale * v, so the shrink step is O(1) instead of O(d).
  std::vector<double> v(d, 0.0);
  double vb = 0.0;
  double scale = 1.0;

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t t = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle(order, rng);
    for (auto i : order) {
      ++t;
      const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
      const auto r = x.row(i);
      const double yi = y[i] == 1 ? 1.0 : -1.0;
      const double margin = yi * scale * (r.dot(v) + vb);
      const double shrink = 1.0 - eta * cfg.lambda;
      if (shrink <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        vb = 0.0;
        scale = 1.0;
      } else {
        scale *= shrink;
      }
      if (margin < 1.0) {
        const double step = eta * yi / scale;
        for (std::size_t k = 0; k < r.nnz(); ++k) v[r.cols[k]] += step * r.vals[k];
        vb += step;
      }
      if (scale < 1e-100) {
        for (double& e : v) e *= scale;
        vb *= scale;
        scale = 1.0;
      }
    }

    double wn = (vb * scale) * (vb * scale), hinge = 0.0;
    for (double e : v) wn += (e * scale) * (e * scale);
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = y[i] == 1 ? 1.0 : -1.0;
      hinge += std::max(0.0, 1.0 - yi * scale * (x.row(i).dot(v) + vb));
    }
    const double obj = 0.5 * cfg.lambda * wn + hinge / static_cast<double>(n);
    if (!std::isfinite(obj)) throw NumericError("linear SVM diverged at epoch " + std::to_string(epoch));
  }

  LinearModel m;
  m.kind = LinearKind::svm;
  m.weights.resize(d);
  for (std::size_t j = 0; j < d; ++j) m.weights[j] = v[j] * scale;
  m.bias = vb * scale;
  return m;
}

}  // namespace rsclf
