#include "rsclf/neural.hpp"

#include <algorithm>
#include <array>
#include <utility>
#include <cmath>
#include <limits>
#include <numeric>

#include "fit_util.hpp"
#include "rsclf/error.hpp"
#include "rsclf/math.hpp"

namespace rsclf {

namespace {

constexpr double kLogClamp = 1e-12;

// Keeps the network output strictly inside (0, 1) even when the logit
// saturates in double precision.
double squash(double z) {
  return std::clamp(sigmoid(z), std::numeric_limits<double>::min(), 1.0 - std::numeric_limits<double>::epsilon() / 2);
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), 0);
  return r;
}

std::array<std::span<double>, 4> blocks(MlpParams& p) {
  return {std::span<double>(p.w1), std::span<double>(p.b1), std::span<double>(p.w2), std::span<double>(&p.b2, 1)};
}

std::array<std::span<const double>, 4> blocks(const MlpParams& p) {
  return {std::span<const double>(p.w1), std::span<const double>(p.b1), std::span<const double>(p.w2),
          std::span<const double>(&p.b2, 1)};
}

}  // namespace

MlpParams MlpParams::zeros(std::size_t input_dim, std::size_t hidden) {
  MlpParams p;
  p.input_dim = input_dim;
  p.hidden = hidden;
  p.w1.assign(input_dim * hidden, 0.0);
  p.b1.assign(hidden, 0.0);
  p.w2.assign(hidden, 0.0);
  p.b2 = 0.0;
  return p;
}

bool MlpParams::all_finite() const {
  const auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
  };
  return finite(w1) && finite(b1) && finite(w2) && std::isfinite(b2);
}

MlpParams init_params(std::size_t input_dim, std::uint64_t seed, std::size_t hidden) {
  if (input_dim < 1 || hidden < 1) throw UsageError("init_params: dimensions must be >= 1");
  MlpParams p = MlpParams::zeros(input_dim, hidden);
  Rng rng(seed);
  const double a1 = std::sqrt(6.0 / static_cast<double>(input_dim));
  for (double& w : p.w1) w = a1 * (2.0 * uniform01(rng) - 1.0);
  const double a2 = std::sqrt(6.0 / static_cast<double>(hidden));
  for (double& w : p.w2) w = a2 * (2.0 * uniform01(rng) - 1.0);
  return p;
}

ForwardCache forward(const MlpParams& params, const SparseMatrix& x, std::span<const std::size_t> rows, Mode mode,
                     double rate, Rng* rng) {
  if (x.cols() != params.input_dim)
    throw DataError("MLP input dimension mismatch: expected " + std::to_string(params.input_dim) + ", got " +
                    std::to_string(x.cols()));
  const std::size_t h = params.hidden, b = rows.size();
  const bool drop = mode == Mode::train && rate > 0.0;
  if (drop && !rng) throw UsageError("forward: dropout needs an Rng");

  ForwardCache c;
  c.rows.assign(rows.begin(), rows.end());
  c.pre.resize(b * h);
  c.act.resize(b * h);
  c.p.resize(b);
  if (drop) c.mask.resize(b * h);
  const double keep_scale = drop ? 1.0 / (1.0 - rate) : 1.0;

  for (std::size_t i = 0; i < b; ++i) {
    double* pre = &c.pre[i * h];
    std::copy(params.b1.begin(), params.b1.end(), pre);
    const auto r = x.row(rows[i]);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      const double xv = r.vals[k];
      const double* col = &params.w1[static_cast<std::size_t>(r.cols[k]) * h];
      for (std::size_t u = 0; u < h; ++u) pre[u] += col[u] * xv;
    }
    double* act = &c.act[i * h];
    double z = params.b2;
    for (std::size_t u = 0; u < h; ++u) {
      double a = pre[u] > 0.0 ? pre[u] : 0.0;
      if (drop) {
        const double m = uniform01(*rng) < rate ? 0.0 : keep_scale;
        c.mask[i * h + u] = m;
        a *= m;
      }
      act[u] = a;
      z += params.w2[u] * a;
    }
    c.p[i] = squash(z);
  }
  return c;
}

double forward_one(const MlpParams& params, const SparseMatrix::RowView& row) {
  const std::size_t h = params.hidden;
  std::vector<double> pre(params.b1);
  for (std::size_t k = 0; k < row.nnz(); ++k) {
    const double* col = &params.w1[static_cast<std::size_t>(row.cols[k]) * h];
    for (std::size_t u = 0; u < h; ++u) pre[u] += col[u] * row.vals[k];
  }
  double z = params.b2;
  for (std::size_t u = 0; u < h; ++u)
    if (pre[u] > 0.0) z += params.w2[u] * pre[u];
  return squash(z);
}

double bce_loss(double p, Label y) {
  const double q = std::clamp(p, kLogClamp, 1.0 - kLogClamp);
  return y == 1 ? -std::log(q) : -std::log(1.0 - q);
}

double bce_loss(std::span<const double> p, std::span<const Label> y) {
  if (p.size() != y.size() || p.empty()) throw UsageError("bce_loss: size mismatch or empty batch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += bce_loss(p[i], y[i]);
  return s / static_cast<double>(p.size());
}

MlpGrads backward(const MlpParams& params, const SparseMatrix& x, std::span<const Label> y,
                  const ForwardCache& cache) {
  const std::size_t h = params.hidden, b = cache.rows.size();
  MlpGrads g = MlpParams::zeros(params.input_dim, h);
  const double inv_b = 1.0 / static_cast<double>(b);
  std::vector<double> dpre(h);
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t row = cache.rows[i];
    // Sigmoid + BCE: d loss / d logit = p - y.
    const double dz = (cache.p[i] - static_cast<double>(y[row])) * inv_b;
    g.b2 += dz;
    const double* act = &cache.act[i * h];
    const double* pre = &cache.pre[i * h];
    for (std::size_t u = 0; u < h; ++u) {
      g.w2[u] += dz * act[u];
      double d = pre[u] > 0.0 ? dz * params.w2[u] : 0.0;
      if (!cache.mask.empty()) d *= cache.mask[i * h + u];
      dpre[u] = d;
      g.b1[u] += d;
    }
    const auto r = x.row(row);
    for (std::size_t k = 0; k < r.nnz(); ++k) {
      double* col = &g.w1[static_cast<std::size_t>(r.cols[k]) * h];
      const double xv = r.vals[k];
      for (std::size_t u = 0; u < h; ++u) col[u] += dpre[u] * xv;
    }
  }
  return g;
}

void adam_update(std::span<double> theta, std::span<const double> grad, std::span<double> m, std::span<double> v,
                 std::uint64_t t, const AdamConfig& cfg) {
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double gi = grad[i];
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    theta[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
}

void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state, const AdamConfig& cfg) {
  if (!(cfg.lr > 0.0) || cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0)
    throw UsageError("adam: need lr > 0 and 0 <= beta1, beta2 < 1");
  if (!grads.all_finite()) throw NumericError("adam: non-finite gradient");
  if (state.m.w1.size() != params.w1.size()) state = AdamState::for_params(params);
  ++state.t;
  const auto th = blocks(params);
  const auto gr = blocks(grads);
  const auto ms = blocks(state.m);
  const auto vs = blocks(state.v);
  for (std::size_t k = 0; k < th.size(); ++k) adam_update(th[k], gr[k], ms[k], vs[k], state.t, cfg);
}

void MlpTrainConfig::validate() const {
  if (!(adam.lr > 0.0)) throw UsageError("nn: lr must be > 0");
  if (adam.beta1 < 0.0 || adam.beta1 >= 1.0 || adam.beta2 < 0.0 || adam.beta2 >= 1.0)
    throw UsageError("nn: betas must lie in [0, 1)");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw UsageError("nn: dropout must lie in [0, 1)");
  if (epochs < 0 || batch_size < 1 || hidden < 1) throw UsageError("nn: bad epochs/batch_size/hidden");
}

MlpTrainResult train_mlp_from(MlpParams init, const SparseMatrix& x, std::span<const Label> y,
                              const MlpTrainConfig& cfg) {
  cfg.validate();
  std::size_t counts[2];
  detail::count_labels(x, y, counts, "nn", false);
  if (x.rows() < static_cast<std::size_t>(cfg.batch_size))
    throw DataError("nn: " + std::to_string(x.rows()) + " training rows is fewer than batch_size " +
                    std::to_string(cfg.batch_size));
  if (init.input_dim != x.cols()) throw DataError("nn: parameter input width does not match features");

  MlpTrainResult out;
  out.params = std::move(init);
  AdamState state = AdamState::for_params(out.params);
  // Shuffling and dropout draw from separate streams.
  Rng order_rng(cfg.seed ^ 0x9E3779B97F4A7C15ull);
  Rng drop_rng(cfg.seed + 1);
  auto order = all_rows(x.rows());
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle(order, order_rng);
    double loss_sum = 0.0, correct = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const std::span<const std::size_t> rows(order.data() + start, end - start);
      const ForwardCache cache = forward(out.params, x, rows, Mode::train, cfg.dropout, &drop_rng);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        loss_sum += bce_loss(cache.p[i], y[rows[i]]);
        correct += ((cache.p[i] >= 0.5 ? 1 : 0) == y[rows[i]]) ? 1.0 : 0.0;
      }
      const MlpGrads g = backward(out.params, x, y, cache);
      if (!g.all_finite()) throw NumericError("nn diverged at epoch " + std::to_string(epoch));
      adam_step(out.params, g, state, cfg.adam);
    }
    const double n = static_cast<double>(order.size());
    const EpochStats stats{loss_sum / n, correct / n};
    if (!std::isfinite(stats.loss) || !out.params.all_finite())
      throw NumericError("nn diverged at epoch " + std::to_string(epoch));
    out.history.push_back(stats);
  }
  return out;
}

MlpTrainResult train_mlp(const SparseMatrix& x, std::span<const Label> y, const MlpTrainConfig& cfg) {
  cfg.validate();
  return train_mlp_from(init_params(x.cols(), cfg.seed, cfg.hidden), x, y, cfg);
}

GradCheckReport gradient_check(const MlpParams& params, const SparseMatrix& x, std::span<const Label> y,
                               const GradCheckOptions& opts) {
  if (!(opts.delta >= 1e-6 && opts.delta <= 1e-4)) throw UsageError("gradient_check: delta must lie in [1e-6, 1e-4]");
  if (y.size() != x.rows() || x.rows() == 0) throw UsageError("gradient_check: bad batch");
  const auto rows = all_rows(x.rows());
  const std::size_t h = params.hidden, b = rows.size();

  const ForwardCache base = forward(params, x, rows, Mode::infer);
  MlpGrads analytic = backward(params, x, y, base);
  if (opts.mutate) opts.mutate(analytic);

  // Loss with one parameter replaced. A single coordinate touches at most one
  // hidden unit, so only that unit is recomputed; every sum runs in the same
  // order as forward() and the result equals a full forward pass.
  MlpParams probe = params;
  bool kink = false;
  auto loss_at = [&](std::size_t blk, std::size_t coord) {
    const bool first_layer = blk < 2;
    const std::size_t unit = blk == 0 ? coord % h : coord;
    double total = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      const double* act = &base.act[i * h];
      double changed_act = 0.0;
      if (first_layer) {
        double pre = probe.b1[unit];
        const auto r = x.row(i);
        for (std::size_t k = 0; k < r.nnz(); ++k) pre += probe.w1_at(unit, r.cols[k]) * r.vals[k];
        if ((pre > 0.0) != (base.pre[i * h + unit] > 0.0)) kink = true;
        changed_act = pre > 0.0 ? pre : 0.0;
      }
      double z = probe.b2;
      for (std::size_t u = 0; u < h; ++u) z += probe.w2[u] * (first_layer && u == unit ? changed_act : act[u]);
      total += bce_loss(squash(z), y[i]);
    }
    return total / static_cast<double>(b);
  };

  GradCheckReport report;
  Rng rng(opts.seed);
  const auto probe_blocks = blocks(probe);
  const auto grad_blocks = blocks(std::as_const(analytic));

  for (std::size_t blk = 0; blk < probe_blocks.size(); ++blk) {
    auto theta = probe_blocks[blk];
    std::vector<std::size_t> coords = all_rows(theta.size());
    const std::size_t take = std::min(opts.coords_per_block, coords.size());
    for (std::size_t t = 0; t < take; ++t)
      std::swap(coords[t], coords[t + static_cast<std::size_t>(uniform_index(rng, coords.size() - t))]);
    for (std::size_t t = 0; t < take; ++t) {
      const std::size_t c = coords[t];
      const double saved = theta[c];
      kink = false;
      theta[c] = saved + opts.delta;
      const double plus = loss_at(blk, c);
      theta[c] = saved - opts.delta;
      const double minus = loss_at(blk, c);
      theta[c] = saved;
      if (kink) {
        ++report.skipped_kinks;
        continue;
      }
      const double numeric = (plus - minus) / (2.0 * opts.delta);
      const double a = grad_blocks[blk][c];
      const double err = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      report.max_rel_error = std::max(report.max_rel_error, err);
      ++report.checked;
    }
  }
  return report;
}

std::vector<double> MlpModel::scores(const SparseMatrix& x) const {
  detail::check_width(x, n_features());
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = forward_one(params, x.row(i));
  return out;
}

std::vector<Label> MlpModel::predict(const SparseMatrix& x, double threshold) const {
  return detail::threshold_scores(scores(x), threshold);
}

}  // namespace rsclf
