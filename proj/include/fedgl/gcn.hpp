#pragma once

#include <cstdint>
#include <vector>

#include "fedgl/graph.hpp"
#include "fedgl/matrix.hpp"
#include "fedgl/rng.hpp"

namespace fedgl {

// Two-layer GCN: adj * relu(adj * X * W0) * W1 with a softmax head.
struct ModelWeights {
  DenseMatrix w0;  // d x h
  DenseMatrix w1;  // h x C

  bool same_shape(const ModelWeights& other) const {
    return w0.same_shape(other.w0) && w1.same_shape(other.w1);
  }
};

struct Gradients {
  DenseMatrix w0;
  DenseMatrix w1;
};

// Adaptive-moment optimizer state. Weight decay is applied as an additive
// L2-gradient term on w0 only, matching the convention of the baseline GCN.
struct OptimizerState {
  DenseMatrix m0, v0;  // first/second moments for w0
  DenseMatrix m1, v1;  // first/second moments for w1
  std::size_t step = 0;
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
};

// Inverted-dropout scaling factors captured by a training-mode forward pass
// so the matching backward pass reuses the same masks. Entries are either 0
// (dropped) or 1/(1-p) (kept). Empty when dropout was inactive.
struct DropoutCache {
  std::vector<double> input_scale;  // aligned with the feature matrix nnz
  DenseMatrix hidden_scale;         // N x h
  bool active = false;
};

struct ForwardOutput {
  DenseMatrix hidden;         // N x h, post-activation first layer (pre-dropout)
  DenseMatrix embeddings;     // N x C, final layer output before softmax
  DenseMatrix probabilities;  // N x C, row-stochastic
  DropoutCache dropout;
};

ModelWeights init_weights(std::size_t feature_dim, std::size_t hidden_dim,
                          std::size_t num_classes, Rng& rng);

OptimizerState make_optimizer(const ModelWeights& weights, double learning_rate,
                              double weight_decay);

// norm_adj may be any non-negative propagation matrix of matching shape
// (the pseudo-graph complement is not necessarily symmetric).
// `rng` is only consumed when training && dropout_rate > 0.
ForwardOutput forward(const SparseMatrix& norm_adj, const SparseMatrix& features,
                      const ModelWeights& weights, double dropout_rate, bool training,
                      Rng* rng);

// Summed cross-entropy over the train mask plus alpha times the summed
// cross-entropy against pseudo labels over the ssl mask. Masks must be disjoint.
double loss(const ForwardOutput& output, const DenseMatrix& labels, const Mask& train_mask,
            const DenseMatrix& pseudo_labels, const Mask& ssl_mask, double alpha);
double loss(const ForwardOutput& output, const DenseMatrix& labels, const Mask& train_mask);

// Exact gradients of the combined loss w.r.t. both weight matrices, reusing
// the forward pass's dropout masks. Weight decay is excluded (see adam_step).
Gradients gradients(const SparseMatrix& norm_adj, const SparseMatrix& features,
                    const ModelWeights& weights, const ForwardOutput& output,
                    const DenseMatrix& labels, const Mask& train_mask,
                    const DenseMatrix& pseudo_labels, const Mask& ssl_mask, double alpha);

void adam_step(ModelWeights& weights, OptimizerState& state, const Gradients& grads);

// Fraction of masked rows whose probability argmax matches the label argmax;
// ties resolve to the lowest class index.
double accuracy(const DenseMatrix& probabilities, const DenseMatrix& labels, const Mask& mask);

std::size_t argmax_row(const double* row, std::size_t n);

}  // namespace fedgl
