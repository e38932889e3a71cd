#pragma once

#include <cstdint>
#include <vector>

#include "fedgl/gcn.hpp"
#include "fedgl/graph.hpp"
#include "fedgl/matrix.hpp"
#include "fedgl/rng.hpp"

namespace fedgl {

enum class EmbeddingSource { kFinalLayer, kHiddenLayer };

// One client's upload at the end of a round.
struct RoundUpload {
  ModelWeights weights;
  DenseMatrix predictions;  // N_k x C, row-stochastic (evaluation mode)
  DenseMatrix embeddings;   // N_k x C (final layer) or N_k x h (hidden)
  std::size_t node_count = 0;
  std::vector<std::size_t> rows;  // fusion rows identifying the client's nodes
};

// Everything a client owns across rounds. The base normalized adjacency is
// immutable; the pseudo-artifact slices hold whatever the client last
// received and persist across rounds it does not participate in.
struct ClientState {
  Graph graph;
  NormalizedAdjacency norm_adj_base;
  ModelWeights weights;
  OptimizerState optimizer;
  Rng rng;
  std::size_t client_id = 0;
  std::vector<std::size_t> fusion_rows;

  DenseMatrix pseudo_label_slice;   // N_k x C
  SparseMatrix pseudo_graph_slice;  // N_k x N_k

  ClientState() : rng(0) {}
};

struct TrainHyper {
  std::size_t epochs = 10;
  double alpha = 0.2;
  double beta = 1.0;
  double dropout = 0.5;
  EmbeddingSource embedding_source = EmbeddingSource::kFinalLayer;
};

// base + beta * D^{-1/2} slice D^{-1/2}, with D the degree matrix of the
// projected slice and zero degrees mapping to zero. The base is never
// modified; the complement is rebuilt from it every round.
SparseMatrix complement_adjacency(const NormalizedAdjacency& base,
                                  const SparseMatrix& pseudo_graph_slice, double beta);

struct SslTargets {
  DenseMatrix targets;  // N_k x C with training rows zeroed
  Mask mask;            // rows still carrying a pseudo label
};

SslTargets prepare_ssl_targets(const DenseMatrix& pseudo_label_slice, const Mask& train_mask);

// Rebuild the complemented adjacency, run `epochs` full-batch updates of the
// combined loss, then compute the upload in evaluation mode. Weights must
// already hold the distributed global model. `round` only labels errors.
RoundUpload local_train(ClientState& state, const TrainHyper& hyper, std::size_t round);

}  // namespace fedgl
