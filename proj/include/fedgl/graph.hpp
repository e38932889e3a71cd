#pragma once

#include <cstdint>
#include <vector>

#include "fedgl/matrix.hpp"

namespace fedgl {

using Mask = std::vector<std::uint8_t>;  // 0/1 per node

// One party's graph data. Feature rows are stored compressed because the
// bag-of-words datasets this targets are overwhelmingly sparse; the matrix
// is still logically dense N x d.
struct Graph {
  std::size_t num_nodes = 0;
  SparseMatrix adjacency;     // symmetric, non-negative edge weights
  SparseMatrix features;      // N x d
  DenseMatrix labels;         // N x C one-hot
  Mask train_mask;
  Mask val_mask;
  Mask test_mask;
  std::vector<std::size_t> global_ids;  // local row -> global node id

  std::size_t feature_dim() const { return features.cols(); }
  std::size_t num_classes() const { return labels.cols(); }

  // Throws ValidationError if any structural invariant is broken.
  void validate() const;
};

// D^{-1/2} (A + I) D^{-1/2}; symmetric, entries in [0,1], positive diagonal.
struct NormalizedAdjacency {
  SparseMatrix matrix;
};

// Bookkeeping for the union index space the server fuses over.
class GlobalRegistry {
 public:
  GlobalRegistry() = default;
  explicit GlobalRegistry(const std::vector<std::vector<std::size_t>>& per_client_ids);

  std::size_t union_size() const { return ids_.size(); }
  std::size_t total_multiplicity() const { return total_multiplicity_; }
  const std::vector<std::size_t>& per_client_counts() const { return per_client_counts_; }
  const std::vector<std::size_t>& ids() const { return ids_; }  // sorted distinct global ids

  // Dense fusion row for a global node id. Throws on unknown id.
  std::size_t row_of(std::size_t global_id) const;
  // Translate a client's global-id list into fusion rows.
  std::vector<std::size_t> rows_of(const std::vector<std::size_t>& global_ids) const;

 private:
  std::vector<std::size_t> ids_;
  std::vector<std::size_t> per_client_counts_;
  std::size_t total_multiplicity_ = 0;
};

NormalizedAdjacency normalize_adjacency(const SparseMatrix& adjacency);

// Gather rows of an M_u x c matrix into client order; ids index rows directly.
DenseMatrix project_rows(const DenseMatrix& global_matrix,
                         const std::vector<std::size_t>& ids);

// Inverse of project_rows: place client rows into an M_u x c matrix, zeros elsewhere.
DenseMatrix scatter_rows(const DenseMatrix& client_matrix,
                         const std::vector<std::size_t>& ids, std::size_t union_size);

// Union of graphs by global node id. Duplicate edges collapse to weight 1,
// masks are OR-ed, features/labels of shared nodes must agree exactly.
Graph merge_graphs(const std::vector<Graph>& graphs);

}  // namespace fedgl
