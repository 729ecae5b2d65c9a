#include "csm/nn.hpp"

#include <cmath>

#include "csm/common.hpp"

namespace csm {

Eigen::VectorXd MlpParams::flatten() const {
  const int h = static_cast<int>(W1.rows());
  const int in = static_cast<int>(W1.cols());
  Eigen::VectorXd v(h * in + h + h * h + h + h + 1);
  int off = 0;
  std::copy(W1.data(), W1.data() + h * in, v.data() + off);
  off += h * in;
  std::copy(b1.data(), b1.data() + h, v.data() + off);
  off += h;
  std::copy(W2.data(), W2.data() + h * h, v.data() + off);
  off += h * h;
  std::copy(b2.data(), b2.data() + h, v.data() + off);
  off += h;
  std::copy(W3.data(), W3.data() + h, v.data() + off);
  off += h;
  v[off] = b3;
  return v;
}

MlpParams MlpParams::from_flat(const MlpSpec& spec, const Eigen::VectorXd& v) {
  const int h = spec.hidden_width, in = spec.input_dim;
  MlpParams p;
  p.W1.resize(h, in);
  p.b1.resize(h);
  p.W2.resize(h, h);
  p.b2.resize(h);
  p.W3.resize(h);
  int off = 0;
  std::copy(v.data() + off, v.data() + off + h * in, p.W1.data());
  off += h * in;
  std::copy(v.data() + off, v.data() + off + h, p.b1.data());
  off += h;
  std::copy(v.data() + off, v.data() + off + h * h, p.W2.data());
  off += h * h;
  std::copy(v.data() + off, v.data() + off + h, p.b2.data());
  off += h;
  std::copy(v.data() + off, v.data() + off + h, p.W3.data());
  off += h;
  p.b3 = v[off];
  return p;
}

MlpParams init_params(const MlpSpec& spec, uint64_t seed) {
  Rng rng(seed, "mlp-init");
  const int h = spec.hidden_width, in = spec.input_dim;
  MlpParams p;
  p.W1.resize(h, in);
  p.W2.resize(h, h);
  p.W3.resize(h);
  p.b1 = Eigen::VectorXd::Zero(h);
  p.b2 = Eigen::VectorXd::Zero(h);
  p.b3 = 0.0;
  double s1 = std::sqrt(2.0 / in), s2 = std::sqrt(2.0 / h);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < in; ++j) p.W1(i, j) = s1 * rng.normal();
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < h; ++j) p.W2(i, j) = s2 * rng.normal();
  for (int j = 0; j < h; ++j) p.W3(j) = s2 * rng.normal();
  return p;
}

namespace {

Eigen::MatrixXd dropout_mask(int rows, int cols, double rate, Rng& rng) {
  Eigen::MatrixXd mask(rows, cols);
  const double keep = 1.0 - rate;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      mask(i, j) = rng.uniform() < keep ? 1.0 / keep : 0.0;
  return mask;
}

}  // namespace

Eigen::VectorXd mlp_forward(const MlpParams& params, const MlpSpec& spec,
                            const Eigen::MatrixXd& X, bool train,
                            Rng* dropout_rng, ForwardCache* cache) {
  if (!X.allFinite()) throw ValidationError("mlp_forward: non-finite input");
  if (X.cols() != spec.input_dim)
    throw ValidationError("mlp_forward: input dim mismatch");
  const int n = static_cast<int>(X.rows());
  const bool use_dropout = train && spec.dropout > 0.0;

  Eigen::MatrixXd Z1 =
      (X * params.W1.transpose()).rowwise() + params.b1.transpose();
  Eigen::MatrixXd H1 = Z1.cwiseMax(0.0);
  Eigen::MatrixXd mask1, mask2;
  if (use_dropout) {
    mask1 = dropout_mask(n, spec.hidden_width, spec.dropout, *dropout_rng);
    H1.array() *= mask1.array();
  }
  Eigen::MatrixXd Z2 =
      (H1 * params.W2.transpose()).rowwise() + params.b2.transpose();
  Eigen::MatrixXd H2 = Z2.cwiseMax(0.0);
  if (use_dropout) {
    mask2 = dropout_mask(n, spec.hidden_width, spec.dropout, *dropout_rng);
    H2.array() *= mask2.array();
  }
  Eigen::VectorXd y =
      (H2 * params.W3.transpose()).array() + params.b3;

  if (cache != nullptr) {
    cache->X = X;
    cache->Z1 = std::move(Z1);
    cache->H1 = std::move(H1);
    cache->Z2 = std::move(Z2);
    cache->H2 = std::move(H2);
    cache->mask1 = std::move(mask1);
    cache->mask2 = std::move(mask2);
    cache->train = use_dropout;
  }
  return y;
}

Eigen::VectorXd mlp_backward(const MlpParams& params, const MlpSpec& spec,
                             const ForwardCache& cache,
                             const Eigen::VectorXd& dscores) {
  const int n = static_cast<int>(cache.X.rows());
  if (dscores.size() != n)
    throw ValidationError("mlp_backward: gradient batch size mismatch");

  MlpParams g;
  // dL/dW3 = dscores^T * H2
  g.W3 = dscores.transpose() * cache.H2;
  g.b3 = dscores.sum();

  Eigen::MatrixXd dH2 = dscores * params.W3;  // n x h
  if (cache.train) dH2.array() *= cache.mask2.array();
  Eigen::MatrixXd dZ2 =
      dH2.array() * (cache.Z2.array() > 0.0).cast<double>();
  g.W2 = dZ2.transpose() * cache.H1;
  g.b2 = dZ2.colwise().sum();

  Eigen::MatrixXd dH1 = dZ2 * params.W2;
  if (cache.train) dH1.array() *= cache.mask1.array();
  Eigen::MatrixXd dZ1 =
      dH1.array() * (cache.Z1.array() > 0.0).cast<double>();
  g.W1 = dZ1.transpose() * cache.X;
  g.b1 = dZ1.colwise().sum();

  (void)spec;
  return g.flatten();
}

AdamState AdamState::create(int n_params, double learning_rate) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(n_params);
  s.v = Eigen::VectorXd::Zero(n_params);
  s.learning_rate = learning_rate;
  return s;
}

void adam_step(AdamState& state, Eigen::VectorXd& params,
               Eigen::VectorXd grads, double max_grad_norm) {
  if (grads.size() != params.size() || grads.size() != state.m.size())
    throw ValidationError("adam_step: shape mismatch");
  double norm = grads.norm();
  if (max_grad_norm > 0.0 && norm > max_grad_norm)
    grads *= max_grad_norm / norm;

  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v.array().matrix() +
            (1.0 - state.beta2) * grads.array().square().matrix();
  double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= state.learning_rate * (state.m.array() / bc1) /
                    ((state.v.array() / bc2).sqrt() + state.epsilon);
}

GradCheckReport grad_check(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, const Eigen::VectorXd& analytic, double tol,
    int max_coords, uint64_t seed, double step) {
  GradCheckReport report;
  const int n = static_cast<int>(x.size());
  std::vector<int> coords;
  if (max_coords <= 0 || max_coords >= n) {
    coords.resize(n);
    std::iota(coords.begin(), coords.end(), 0);
  } else {
    Rng rng(seed, "grad-check");
    coords = rng.sample_indices(n, max_coords);
  }
  Eigen::VectorXd probe = x;
  for (int c : coords) {
    probe[c] = x[c] + step;
    double up = f(probe);
    probe[c] = x[c] - step;
    double down = f(probe);
    probe[c] = x[c];
    double fd = (up - down) / (2.0 * step);
    double denom = std::max({std::abs(fd), std::abs(analytic[c]), 1e-6});
    double rel = std::abs(fd - analytic[c]) / denom;
    report.max_rel_err = std::max(report.max_rel_err, rel);
    ++report.coords_checked;
  }
  report.pass = report.max_rel_err <= tol;
  return report;
}

}  // namespace csm
