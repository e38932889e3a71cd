#pragma once

#include <cstdint>
#include <vector>

#include "fedgl/gcn.hpp"
#include "fedgl/graph.hpp"
#include "fedgl/matrix.hpp"

namespace fedgl {

// Server-side state produced each round.
struct GlobalArtifacts {
  ModelWeights weights;
  DenseMatrix pseudo_labels;   // M_u x C, rows all-zero or one-hot
  SparseMatrix pseudo_graph;   // M_u x M_u, row-normalized, <= s nonzeros per row
  std::size_t round = 0;
};

struct WeightUpload {
  std::size_t node_count;
  const ModelWeights* weights;
};

struct MatrixUpload {
  std::size_t node_count;
  const DenseMatrix* matrix;           // N_k x c
  const std::vector<std::size_t>* rows;  // fusion rows for this client's nodes
};

// Node-count-weighted average over the participating uploads; weights are
// renormalized over the participants so they always sum to 1.
ModelWeights aggregate_weights(const std::vector<WeightUpload>& uploads);

// P_bar = sum_k (N_k / M) scatter(P_k) over the participants, M = sum of
// participating node counts. With renormalize, each fused row is divided by
// the total weight of the clients that contain that node, so covered rows
// stay row-stochastic under partial coverage.
DenseMatrix fuse_client_matrices(const std::vector<MatrixUpload>& uploads,
                                 std::size_t union_size, bool renormalize);

// One-hot pseudo labels: class j is selected for row i iff j is the argmax
// (lowest index on ties) and fused(i,j) > lambda strictly, and i is not a
// training row.
DenseMatrix discover_pseudo_labels(const DenseMatrix& fused, double lambda,
                                   const std::vector<std::size_t>& train_rows);

// relu(H H^T) with zeroed diagonal, top-s positive entries per row (ties keep
// the lower column), rows normalized to sum 1. Rows with no positive
// off-diagonal similarity stay empty.
SparseMatrix build_pseudo_graph(const DenseMatrix& embeddings, std::size_t neighbor_cap);

std::size_t count_pseudo_labels(const DenseMatrix& pseudo_labels);

}  // namespace fedgl
