#include "fedgl/fedclient.hpp"

#include <cmath>
#include <string>

#include "fedgl/errors.hpp"

namespace fedgl {

SparseMatrix complement_adjacency(const NormalizedAdjacency& base,
                                  const SparseMatrix& pseudo_graph_slice, double beta) {
  if (beta < 0.0) throw ValidationError("complement_adjacency: beta must be non-negative");
  const std::size_t n = base.matrix.rows();
  if (pseudo_graph_slice.rows() != n || pseudo_graph_slice.cols() != n) {
    throw ValidationError("complement_adjacency: slice shape does not match base");
  }
  if (beta == 0.0 || pseudo_graph_slice.nnz() == 0) return base.matrix;

  const std::vector<double> degree = pseudo_graph_slice.row_sums();
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (degree[i] > 0.0) inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);
  }

  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(base.matrix.nnz() + pseudo_graph_slice.nnz());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = base.matrix.row_ptr()[r]; k < base.matrix.row_ptr()[r + 1]; ++k) {
      triplets.push_back({r, base.matrix.col_idx()[k], base.matrix.values()[k]});
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = pseudo_graph_slice.row_ptr()[r];
         k < pseudo_graph_slice.row_ptr()[r + 1]; ++k) {
      const std::size_t c = pseudo_graph_slice.col_idx()[k];
      const double v =
          beta * inv_sqrt[r] * pseudo_graph_slice.values()[k] * inv_sqrt[c];
      if (v != 0.0) triplets.push_back({r, c, v});
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(triplets), SparseMatrix::Combine::kSum);
}

SslTargets prepare_ssl_targets(const DenseMatrix& pseudo_label_slice, const Mask& train_mask) {
  if (train_mask.size() != pseudo_label_slice.rows()) {
    throw ValidationError("prepare_ssl_targets: mask length does not match slice rows");
  }
  SslTargets out;
  out.targets = pseudo_label_slice;
  out.mask.assign(pseudo_label_slice.rows(), 0);
  for (std::size_t i = 0; i < pseudo_label_slice.rows(); ++i) {
    if (train_mask[i]) {
      double* row = out.targets.row(i);
      for (std::size_t j = 0; j < out.targets.cols(); ++j) row[j] = 0.0;
      continue;
    }
    const double* row = out.targets.row(i);
    for (std::size_t j = 0; j < out.targets.cols(); ++j) {
      if (row[j] != 0.0) {
        out.mask[i] = 1;
        break;
      }
    }
  }
  return out;
}

RoundUpload local_train(ClientState& state, const TrainHyper& hyper, std::size_t round) {
  if (hyper.epochs == 0) throw ValidationError("local_train: epochs must be >= 1");
  const Graph& g = state.graph;

  const SparseMatrix adj =
      complement_adjacency(state.norm_adj_base, state.pseudo_graph_slice, hyper.beta);
  const SslTargets ssl = prepare_ssl_targets(state.pseudo_label_slice, g.train_mask);

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    ForwardOutput out =
        forward(adj, g.features, state.weights, hyper.dropout, /*training=*/true, &state.rng);
    const double value =
        loss(out, g.labels, g.train_mask, ssl.targets, ssl.mask, hyper.alpha);
    if (!std::isfinite(value)) {
      throw NumericError("client " + std::to_string(state.client_id) + ": non-finite loss at round " +
                         std::to_string(round) + ", epoch " + std::to_string(epoch));
    }
    const Gradients grads = gradients(adj, g.features, state.weights, out, g.labels,
                                      g.train_mask, ssl.targets, ssl.mask, hyper.alpha);
    adam_step(state.weights, state.optimizer, grads);
  }

  // Uploads are computed without dropout so the server's pseudo artifacts do
  // not inherit stochastic noise.
  ForwardOutput eval =
      forward(adj, g.features, state.weights, hyper.dropout, /*training=*/false, nullptr);

  RoundUpload upload;
  upload.weights = state.weights;
  upload.predictions = std::move(eval.probabilities);
  upload.embeddings = hyper.embedding_source == EmbeddingSource::kFinalLayer
                          ? std::move(eval.embeddings)
                          : std::move(eval.hidden);
  upload.node_count = g.num_nodes;
  upload.rows = state.fusion_rows;
  return upload;
}

}  // namespace fedgl
