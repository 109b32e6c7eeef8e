#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rsclf/corpus.hpp"
#include "rsclf/random.hpp"
#include "rsclf/sparse.hpp"

namespace rsclf {

inline constexpr std::size_t kDefaultHidden = 512;

// Two-layer perceptron: dense(hidden, relu) -> dropout -> dense(1, sigmoid).
// W1 is stored feature-major (all hidden weights of input j are contiguous),
// which makes the sparse forward and backward passes sequential in memory.
struct MlpParams {
  std::size_t input_dim = 0;
  std::size_t hidden = kDefaultHidden;
  std::vector<double> w1;  // input_dim * hidden, index j * hidden + h
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0.0;

  double& w1_at(std::size_t h, std::size_t j) { return w1[j * hidden + h]; }
  double w1_at(std::size_t h, std::size_t j) const { return w1[j * hidden + h]; }

  // Zero-valued parameters of the given shape.
  static MlpParams zeros(std::size_t input_dim, std::size_t hidden = kDefaultHidden);
  bool all_finite() const;

  bool operator==(const MlpParams&) const = default;
};

// Gradients share the parameter layout.
using MlpGrads = MlpParams;

// He-uniform init: W1 ~ U(-a, a) with a = sqrt(6 / k), so Var = 2 / k; W2 the
// same with fan-in `hidden`. Biases start at zero.
MlpParams init_params(std::size_t input_dim, std::uint64_t seed, std::size_t hidden = kDefaultHidden);

enum class Mode { train, infer };

// Activations of one batch, kept for backprop.
struct ForwardCache {
  std::vector<std::size_t> rows;  // rows of X in batch order
  std::vector<double> pre;        // batch * hidden, W1 x + b1
  std::vector<double> act;        // batch * hidden, relu(pre) * mask
  std::vector<double> mask;       // batch * hidden, 0 or 1/(1-rate); empty in infer mode
  std::vector<double> p;          // batch
};

// Forward pass over the given rows. In train mode with rate > 0, inverted
// dropout draws masks from `rng`.
ForwardCache forward(const MlpParams& params, const SparseMatrix& x, std::span<const std::size_t> rows, Mode mode,
                     double rate = 0.0, Rng* rng = nullptr);

// Single-row inference.
double forward_one(const MlpParams& params, const SparseMatrix::RowView& row);

// Mean binary cross-entropy with p clamped to [1e-12, 1 - 1e-12].
double bce_loss(std::span<const double> p, std::span<const Label> y);
double bce_loss(double p, Label y);

// Exact gradients of the mean BCE of the cached batch.
MlpGrads backward(const MlpParams& params, const SparseMatrix& x, std::span<const Label> y,
                  const ForwardCache& cache);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  MlpParams m;
  MlpParams v;
  std::uint64_t t = 0;

  static AdamState for_params(const MlpParams& p) { return {MlpParams::zeros(p.input_dim, p.hidden), MlpParams::zeros(p.input_dim, p.hidden), 0}; }
};

void adam_step(MlpParams& params, const MlpGrads& grads, AdamState& state, const AdamConfig& cfg);

// Elementwise Adam update over flat arrays; exposed for direct testing.
void adam_update(std::span<double> theta, std::span<const double> grad, std::span<double> m, std::span<double> v,
                 std::uint64_t t, const AdamConfig& cfg);

struct MlpTrainConfig {
  AdamConfig adam;
  std::size_t hidden = kDefaultHidden;
  int epochs = 20;
  int batch_size = 32;
  double dropout = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochStats {
  double loss = 0.0;
  double accuracy = 0.0;

  bool operator==(const EpochStats&) const = default;
};

struct MlpTrainResult {
  MlpParams params;
  std::vector<EpochStats> history;
};

MlpTrainResult train_mlp(const SparseMatrix& x, std::span<const Label> y, const MlpTrainConfig& cfg);

// Continues training from given parameters (used by the gradient-check
// harness to verify gradients after some epochs).
MlpTrainResult train_mlp_from(MlpParams init, const SparseMatrix& x, std::span<const Label> y,
                              const MlpTrainConfig& cfg);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  // Coordinates whose +/- delta perturbation moved a relu across its kink;
  // central differences are meaningless there, so they are left out.
  std::size_t skipped_kinks = 0;
};

struct GradCheckOptions {
  double delta = 1e-5;
  std::size_t coords_per_block = 200;
  std::uint64_t seed = 0;
  // Applied to the analytic gradients before comparison. Used to confirm the
  // harness catches broken gradients.
  std::function<void(MlpGrads&)> mutate;
};

// Central-difference verification of backward() on the given rows with
// dropout disabled. Error per coordinate is |a - n| / max(1e-8, |a| + |n|).
GradCheckReport gradient_check(const MlpParams& params, const SparseMatrix& x, std::span<const Label> y,
                               const GradCheckOptions& opts = {});

struct MlpModel {
  MlpParams params;

  std::size_t n_features() const { return params.input_dim; }
  std::vector<double> scores(const SparseMatrix& x) const;
  std::vector<Label> predict(const SparseMatrix& x, double threshold = 0.5) const;
};

}  // namespace rsclf
