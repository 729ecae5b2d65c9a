#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "csm/rng.hpp"

namespace csm {

/// Two hidden layers share one width; dropout applies after each hidden
/// ReLU (inverted convention: scaling happens at train time only).
struct MlpSpec {
  int input_dim = 22;
  int hidden_width = 64;
  double dropout = 0.0;

  int param_count() const {
    return hidden_width * input_dim + hidden_width +
           hidden_width * hidden_width + hidden_width + hidden_width + 1;
  }
};

struct MlpParams {
  Eigen::MatrixXd W1;     // hidden x input
  Eigen::VectorXd b1;     // hidden
  Eigen::MatrixXd W2;     // hidden x hidden
  Eigen::VectorXd b2;     // hidden
  Eigen::RowVectorXd W3;  // 1 x hidden
  double b3 = 0.0;

  Eigen::VectorXd flatten() const;
  static MlpParams from_flat(const MlpSpec& spec, const Eigen::VectorXd& v);
};

/// He-scaled weights (std sqrt(2 / fan_in)), zero biases; deterministic
/// per seed.
MlpParams init_params(const MlpSpec& spec, uint64_t seed);

/// Activations saved by a training-mode forward pass for reuse in backward.
struct ForwardCache {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Z1, H1;  // pre-activation / post-relu-and-dropout
  Eigen::MatrixXd Z2, H2;
  Eigen::MatrixXd mask1, mask2;
  bool train = false;
};

/// Scores for a batch of feature rows. Training mode draws fresh dropout
/// masks from rng; eval mode must not touch it. Throws on non-finite input.
Eigen::VectorXd mlp_forward(const MlpParams& params, const MlpSpec& spec,
                            const Eigen::MatrixXd& X, bool train,
                            Rng* dropout_rng, ForwardCache* cache = nullptr);

/// Exact reverse-mode gradients for the cached forward pass; the dropout
/// masks are replayed from the cache. Returned flat, matching
/// MlpParams::flatten order.
Eigen::VectorXd mlp_backward(const MlpParams& params, const MlpSpec& spec,
                             const ForwardCache& cache,
                             const Eigen::VectorXd& dscores);

struct AdamState {
  Eigen::VectorXd m, v;
  int64_t step = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState create(int n_params, double learning_rate);
};

/// Global-norm clip followed by the standard bias-corrected Adam update,
/// in place on the flat parameter vector.
void adam_step(AdamState& state, Eigen::VectorXd& params,
               Eigen::VectorXd grads, double max_grad_norm);

struct GradCheckReport {
  double max_rel_err = 0.0;
  int coords_checked = 0;
  bool pass = false;
};

/// Central finite differences of f at x against an analytic gradient over
/// sampled coordinates (all of them when max_coords <= 0). Relative error
/// uses max(|fd|, |analytic|, 1e-6) as denominator.
GradCheckReport grad_check(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x,
                           const Eigen::VectorXd& analytic, double tol,
                           int max_coords = 0, uint64_t seed = 0,
                           double step = 1e-5);

}  // namespace csm
