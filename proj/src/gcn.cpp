#include "fedgl/gcn.hpp"

#include <algorithm>
#include <cmath>

#include "fedgl/errors.hpp"

namespace fedgl {

namespace {

// out = dropped(features) * w, iterating feature nonzeros once.
DenseMatrix scaled_feature_multiply(const SparseMatrix& features, const DenseMatrix& w,
                                    const std::vector<double>& scale) {
  DenseMatrix out(features.rows(), w.cols());
  const bool scaled = !scale.empty();
  for (std::size_t r = 0; r < features.rows(); ++r) {
    double* orow = out.row(r);
    for (std::size_t k = features.row_ptr()[r]; k < features.row_ptr()[r + 1]; ++k) {
      double v = features.values()[k];
      if (scaled) v *= scale[k];
      if (v == 0.0) continue;
      const double* wrow = w.row(features.col_idx()[k]);
      for (std::size_t j = 0; j < w.cols(); ++j) orow[j] += v * wrow[j];
    }
  }
  return out;
}

void check_masks(const Mask& train_mask, const Mask& ssl_mask, std::size_t n) {
  if (train_mask.size() != n) throw ValidationError("loss: train mask length mismatch");
  if (ssl_mask.size() != n) throw ValidationError("loss: ssl mask length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (train_mask[i] && ssl_mask[i]) {
      throw ValidationError("loss: train and ssl masks overlap at node " + std::to_string(i));
    }
  }
}

// Summed cross-entropy of one-hot targets against softmax(embeddings),
// computed with log-sum-exp for stability.
double masked_cross_entropy(const DenseMatrix& embeddings, const DenseMatrix& targets,
                            const Mask& mask) {
  const std::size_t c = embeddings.cols();
  double total = 0.0;
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    if (!mask[i]) continue;
    const double* erow = embeddings.row(i);
    const double* trow = targets.row(i);
    double hit = 0.0;
    bool any = false;
    for (std::size_t j = 0; j < c; ++j) {
      if (trow[j] != 0.0) {
        hit = trow[j] * erow[j];
        any = true;
      }
    }
    if (!any) continue;  // all-zero target row contributes nothing
    double mx = erow[0];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, erow[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) sum += std::exp(erow[j] - mx);
    total += mx + std::log(sum) - hit;
  }
  return total;
}

void add_output_grad(DenseMatrix& d_embeddings, const DenseMatrix& probabilities,
                     const DenseMatrix& targets, const Mask& mask, double scale) {
  const std::size_t c = probabilities.cols();
  for (std::size_t i = 0; i < probabilities.rows(); ++i) {
    if (!mask[i]) continue;
    const double* trow = targets.row(i);
    bool any = false;
    for (std::size_t j = 0; j < c; ++j) any = any || trow[j] != 0.0;
    if (!any) continue;
    const double* prow = probabilities.row(i);
    double* drow = d_embeddings.row(i);
    for (std::size_t j = 0; j < c; ++j) drow[j] += scale * (prow[j] - trow[j]);
  }
}

}  // namespace

ModelWeights init_weights(std::size_t feature_dim, std::size_t hidden_dim,
                          std::size_t num_classes, Rng& rng) {
  ModelWeights w;
  w.w0 = DenseMatrix(feature_dim, hidden_dim);
  w.w1 = DenseMatrix(hidden_dim, num_classes);
  const double lim0 = std::sqrt(6.0 / static_cast<double>(feature_dim + hidden_dim));
  for (double& v : w.w0.data()) v = rng.uniform(-lim0, lim0);
  const double lim1 = std::sqrt(6.0 / static_cast<double>(hidden_dim + num_classes));
  for (double& v : w.w1.data()) v = rng.uniform(-lim1, lim1);
  return w;
}

OptimizerState make_optimizer(const ModelWeights& weights, double learning_rate,
                              double weight_decay) {
  OptimizerState s;
  s.m0 = DenseMatrix(weights.w0.rows(), weights.w0.cols());
  s.v0 = DenseMatrix(weights.w0.rows(), weights.w0.cols());
  s.m1 = DenseMatrix(weights.w1.rows(), weights.w1.cols());
  s.v1 = DenseMatrix(weights.w1.rows(), weights.w1.cols());
  s.learning_rate = learning_rate;
  s.weight_decay = weight_decay;
  return s;
}

ForwardOutput forward(const SparseMatrix& norm_adj, const SparseMatrix& features,
                      const ModelWeights& weights, double dropout_rate, bool training,
                      Rng* rng) {
  const std::size_t n = features.rows();
  if (norm_adj.rows() != n || norm_adj.cols() != n) {
    throw ValidationError("forward: adjacency shape does not match feature rows");
  }
  if (features.cols() != weights.w0.rows()) {
    throw ValidationError("forward: feature dimension does not match w0");
  }
  if (weights.w0.cols() != weights.w1.rows()) {
    throw ValidationError("forward: w0/w1 inner dimension mismatch");
  }
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw ValidationError("forward: dropout rate must be in [0,1)");
  }

  ForwardOutput out;
  const bool drop = training && dropout_rate > 0.0;
  const double keep_scale = drop ? 1.0 / (1.0 - dropout_rate) : 1.0;

  if (drop) {
    if (rng == nullptr) throw ValidationError("forward: rng required for dropout");
    out.dropout.active = true;
    out.dropout.input_scale.resize(features.nnz());
    for (double& s : out.dropout.input_scale) {
      s = rng->bernoulli(dropout_rate) ? 0.0 : keep_scale;
    }
  }

  // First layer: adj * (X~ W0), associativity keeps the sparse work cheap.
  DenseMatrix t0 = scaled_feature_multiply(features, weights.w0, out.dropout.input_scale);
  DenseMatrix pre_hidden = norm_adj.multiply_dense(t0);
  out.hidden = std::move(pre_hidden);
  for (double& v : out.hidden.data()) v = v > 0.0 ? v : 0.0;

  DenseMatrix hidden_dropped = out.hidden;
  if (drop) {
    out.dropout.hidden_scale = DenseMatrix(n, out.hidden.cols());
    for (std::size_t i = 0; i < out.dropout.hidden_scale.data().size(); ++i) {
      const double s = rng->bernoulli(dropout_rate) ? 0.0 : keep_scale;
      out.dropout.hidden_scale.data()[i] = s;
      hidden_dropped.data()[i] *= s;
    }
  }

  DenseMatrix t1 = DenseMatrix::multiply(hidden_dropped, weights.w1);
  out.embeddings = norm_adj.multiply_dense(t1);
  if (!out.embeddings.all_finite()) throw NumericError("forward: non-finite embeddings");

  // Row softmax with max shift.
  out.probabilities = DenseMatrix(n, out.embeddings.cols());
  const std::size_t c = out.embeddings.cols();
  for (std::size_t i = 0; i < n; ++i) {
    const double* erow = out.embeddings.row(i);
    double* prow = out.probabilities.row(i);
    double mx = erow[0];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, erow[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      prow[j] = std::exp(erow[j] - mx);
      sum += prow[j];
    }
    for (std::size_t j = 0; j < c; ++j) prow[j] /= sum;
  }
  return out;
}

double loss(const ForwardOutput& output, const DenseMatrix& labels, const Mask& train_mask,
            const DenseMatrix& pseudo_labels, const Mask& ssl_mask, double alpha) {
  check_masks(train_mask, ssl_mask, output.embeddings.rows());
  double total = masked_cross_entropy(output.embeddings, labels, train_mask);
  bool any_ssl = false;
  for (std::uint8_t b : ssl_mask) any_ssl = any_ssl || b;
  if (any_ssl) {
    if (pseudo_labels.rows() != output.embeddings.rows()) {
      throw ValidationError("loss: ssl mask set but pseudo label shape mismatch");
    }
    total += alpha * masked_cross_entropy(output.embeddings, pseudo_labels, ssl_mask);
  }
  return total;
}

double loss(const ForwardOutput& output, const DenseMatrix& labels, const Mask& train_mask) {
  const Mask empty(output.embeddings.rows(), 0);
  return loss(output, labels, train_mask, DenseMatrix(), empty, 0.0);
}

Gradients gradients(const SparseMatrix& norm_adj, const SparseMatrix& features,
                    const ModelWeights& weights, const ForwardOutput& output,
                    const DenseMatrix& labels, const Mask& train_mask,
                    const DenseMatrix& pseudo_labels, const Mask& ssl_mask, double alpha) {
  const std::size_t n = features.rows();
  check_masks(train_mask, ssl_mask, n);

  // Softmax and cross-entropy fuse: dL/dH = P - Y on masked rows.
  DenseMatrix d_emb(n, output.probabilities.cols());
  add_output_grad(d_emb, output.probabilities, labels, train_mask, 1.0);
  if (pseudo_labels.rows() == n) {
    add_output_grad(d_emb, output.probabilities, pseudo_labels, ssl_mask, alpha);
  }

  DenseMatrix d_t1(n, d_emb.cols());
  norm_adj.add_transpose_multiply(d_emb, d_t1, 1.0);

  // Reconstruct the dropped hidden activations from the cached masks.
  DenseMatrix hidden_dropped = output.hidden;
  if (output.dropout.active) {
    for (std::size_t i = 0; i < hidden_dropped.data().size(); ++i) {
      hidden_dropped.data()[i] *= output.dropout.hidden_scale.data()[i];
    }
  }

  Gradients g;
  g.w1 = DenseMatrix::multiply_at_b(hidden_dropped, d_t1);

  DenseMatrix d_hidden = DenseMatrix::multiply_a_bt(d_t1, weights.w1);
  // Through hidden dropout and the rectifier. hidden > 0 iff pre-activation > 0.
  for (std::size_t i = 0; i < d_hidden.data().size(); ++i) {
    double v = d_hidden.data()[i];
    if (output.dropout.active) v *= output.dropout.hidden_scale.data()[i];
    d_hidden.data()[i] = output.hidden.data()[i] > 0.0 ? v : 0.0;
  }

  DenseMatrix d_t0(n, weights.w0.cols());
  norm_adj.add_transpose_multiply(d_hidden, d_t0, 1.0);

  // dW0 = X~^T d_t0, iterating feature nonzeros with the cached input masks.
  g.w0 = DenseMatrix(weights.w0.rows(), weights.w0.cols());
  const bool scaled = output.dropout.active;
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const double* drow = d_t0.row(r);
    for (std::size_t k = features.row_ptr()[r]; k < features.row_ptr()[r + 1]; ++k) {
      double v = features.values()[k];
      if (scaled) v *= output.dropout.input_scale[k];
      if (v == 0.0) continue;
      double* grow = g.w0.row(features.col_idx()[k]);
      for (std::size_t j = 0; j < d_t0.cols(); ++j) grow[j] += v * drow[j];
    }
  }
  return g;
}

void adam_step(ModelWeights& weights, OptimizerState& state, const Gradients& grads) {
  if (!grads.w0.same_shape(weights.w0) || !grads.w1.same_shape(weights.w1)) {
    throw ValidationError("adam_step: gradient shape mismatch");
  }
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(kBeta1, t);
  const double bc2 = 1.0 - std::pow(kBeta2, t);

  auto update = [&](DenseMatrix& w, DenseMatrix& m, DenseMatrix& v, const DenseMatrix& grad,
                    double decay) {
    for (std::size_t i = 0; i < w.data().size(); ++i) {
      const double g = grad.data()[i] + decay * w.data()[i];
      m.data()[i] = kBeta1 * m.data()[i] + (1.0 - kBeta1) * g;
      v.data()[i] = kBeta2 * v.data()[i] + (1.0 - kBeta2) * g * g;
      const double mhat = m.data()[i] / bc1;
      const double vhat = v.data()[i] / bc2;
      w.data()[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + kEps);
    }
  };
  update(weights.w0, state.m0, state.v0, grads.w0, state.weight_decay);
  update(weights.w1, state.m1, state.v1, grads.w1, 0.0);
}

std::size_t argmax_row(const double* row, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

double accuracy(const DenseMatrix& probabilities, const DenseMatrix& labels, const Mask& mask) {
  if (mask.size() != probabilities.rows()) {
    throw ValidationError("accuracy: mask length mismatch");
  }
  std::size_t total = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < probabilities.rows(); ++i) {
    if (!mask[i]) continue;
    total += 1;
    if (argmax_row(probabilities.row(i), probabilities.cols()) ==
        argmax_row(labels.row(i), labels.cols())) {
      correct += 1;
    }
  }
  if (total == 0) throw ValidationError("accuracy: empty mask");
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace fedgl
