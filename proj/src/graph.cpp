#include "fedgl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "fedgl/errors.hpp"

namespace fedgl {

void Graph::validate() const {
  if (adjacency.rows() != num_nodes || adjacency.cols() != num_nodes) {
    throw ValidationError("graph: adjacency shape does not match node count");
  }
  if (features.rows() != num_nodes) {
    throw ValidationError("graph: feature row count does not match node count");
  }
  if (labels.rows() != num_nodes) {
    throw ValidationError("graph: label row count does not match node count");
  }
  if (!adjacency.is_symmetric()) throw ValidationError("graph: adjacency not symmetric");
  if (!adjacency.all_non_negative()) {
    throw ValidationError("graph: adjacency has negative weights");
  }
  if (train_mask.size() != num_nodes || val_mask.size() != num_nodes ||
      test_mask.size() != num_nodes) {
    throw ValidationError("graph: mask length does not match node count");
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    if (train_mask[i] + val_mask[i] + test_mask[i] > 1) {
      throw ValidationError("graph: masks overlap at node " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    int ones = 0;
    for (std::size_t c = 0; c < labels.cols(); ++c) {
      const double v = labels.at(i, c);
      if (v == 1.0) ones += 1;
      else if (v != 0.0) throw ValidationError("graph: label matrix is not 0/1");
    }
    if (ones > 1) throw ValidationError("graph: node " + std::to_string(i) + " has multiple labels");
  }
  if (global_ids.size() != num_nodes) {
    throw ValidationError("graph: global id list length does not match node count");
  }
  std::unordered_set<std::size_t> seen;
  for (std::size_t id : global_ids) {
    if (!seen.insert(id).second) {
      throw ValidationError("graph: duplicate global id " + std::to_string(id));
    }
  }
}

GlobalRegistry::GlobalRegistry(const std::vector<std::vector<std::size_t>>& per_client_ids) {
  for (const auto& ids : per_client_ids) {
    per_client_counts_.push_back(ids.size());
    total_multiplicity_ += ids.size();
    ids_.insert(ids_.end(), ids.begin(), ids.end());
  }
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

std::size_t GlobalRegistry::row_of(std::size_t global_id) const {
  const auto it = std::lower_bound(ids_.begin(), ids_.end(), global_id);
  if (it == ids_.end() || *it != global_id) {
    throw ValidationError("registry: unknown global id " + std::to_string(global_id));
  }
  return static_cast<std::size_t>(it - ids_.begin());
}

std::vector<std::size_t> GlobalRegistry::rows_of(
    const std::vector<std::size_t>& global_ids) const {
  std::vector<std::size_t> rows(global_ids.size());
  for (std::size_t i = 0; i < global_ids.size(); ++i) rows[i] = row_of(global_ids[i]);
  return rows;
}

NormalizedAdjacency normalize_adjacency(const SparseMatrix& adjacency) {
  if (adjacency.rows() != adjacency.cols() || adjacency.rows() == 0) {
    throw ValidationError("normalize_adjacency: matrix must be square and non-empty");
  }
  if (!adjacency.is_symmetric()) {
    throw ValidationError("normalize_adjacency: adjacency must be symmetric");
  }
  if (!adjacency.all_non_negative()) {
    throw ValidationError("normalize_adjacency: adjacency must be non-negative");
  }
  const std::size_t n = adjacency.rows();

  // A + I, then degrees of the self-looped matrix.
  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(adjacency.nnz() + n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = adjacency.row_ptr()[r]; k < adjacency.row_ptr()[r + 1]; ++k) {
      triplets.push_back({r, adjacency.col_idx()[k], adjacency.values()[k]});
    }
    triplets.push_back({r, r, 1.0});
  }
  SparseMatrix with_loops =
      SparseMatrix::from_triplets(n, n, std::move(triplets), SparseMatrix::Combine::kSum);

  const std::vector<double> degree = with_loops.row_sums();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);

  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = with_loops.row_ptr()[r]; k < with_loops.row_ptr()[r + 1]; ++k) {
      with_loops.values()[k] *= inv_sqrt[r] * inv_sqrt[with_loops.col_idx()[k]];
    }
  }
  return NormalizedAdjacency{std::move(with_loops)};
}

DenseMatrix project_rows(const DenseMatrix& global_matrix,
                         const std::vector<std::size_t>& ids) {
  DenseMatrix out(ids.size(), global_matrix.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= global_matrix.rows()) {
      throw ValidationError("project_rows: id " + std::to_string(ids[i]) +
                            " outside the global index space");
    }
    std::copy_n(global_matrix.row(ids[i]), global_matrix.cols(), out.row(i));
  }
  return out;
}

DenseMatrix scatter_rows(const DenseMatrix& client_matrix,
                         const std::vector<std::size_t>& ids, std::size_t union_size) {
  if (ids.size() != client_matrix.rows()) {
    throw ValidationError("scatter_rows: id count does not match matrix rows");
  }
  std::unordered_set<std::size_t> seen;
  for (std::size_t id : ids) {
    if (id >= union_size) {
      throw ValidationError("scatter_rows: id " + std::to_string(id) + " >= union size");
    }
    if (!seen.insert(id).second) {
      throw ValidationError("scatter_rows: duplicate id " + std::to_string(id));
    }
  }
  DenseMatrix out(union_size, client_matrix.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::copy_n(client_matrix.row(i), client_matrix.cols(), out.row(ids[i]));
  }
  return out;
}

Graph merge_graphs(const std::vector<Graph>& graphs) {
  if (graphs.empty()) throw ValidationError("merge_graphs: no graphs given");
  const std::size_t d = graphs.front().feature_dim();
  const std::size_t c = graphs.front().num_classes();
  for (const Graph& g : graphs) {
    if (g.feature_dim() != d || g.num_classes() != c) {
      throw ValidationError("merge_graphs: feature or class dimensions differ");
    }
  }

  std::vector<std::size_t> union_ids;
  for (const Graph& g : graphs) {
    union_ids.insert(union_ids.end(), g.global_ids.begin(), g.global_ids.end());
  }
  std::sort(union_ids.begin(), union_ids.end());
  union_ids.erase(std::unique(union_ids.begin(), union_ids.end()), union_ids.end());

  std::unordered_map<std::size_t, std::size_t> row_of;
  row_of.reserve(union_ids.size());
  for (std::size_t i = 0; i < union_ids.size(); ++i) row_of.emplace(union_ids[i], i);
  const std::size_t n = union_ids.size();

  Graph merged;
  merged.num_nodes = n;
  merged.labels = DenseMatrix(n, c);
  merged.train_mask.assign(n, 0);
  merged.val_mask.assign(n, 0);
  merged.test_mask.assign(n, 0);
  merged.global_ids = union_ids;

  std::vector<SparseMatrix::Triplet> feat_triplets;
  std::vector<SparseMatrix::Triplet> edge_triplets;
  std::vector<std::uint8_t> filled(n, 0);

  for (const Graph& g : graphs) {
    std::vector<std::size_t> to_merged(g.num_nodes);
    for (std::size_t i = 0; i < g.num_nodes; ++i) to_merged[i] = row_of.at(g.global_ids[i]);

    for (std::size_t i = 0; i < g.num_nodes; ++i) {
      const std::size_t m = to_merged[i];
      if (filled[m]) {
        // Shared node: inputs sample one master graph, so labels must agree.
        // Feature agreement is verified after the merged matrix is assembled.
        for (std::size_t j = 0; j < c; ++j) {
          if (merged.labels.at(m, j) != g.labels.at(i, j)) {
            throw ValidationError("merge_graphs: conflicting labels for global id " +
                                  std::to_string(g.global_ids[i]));
          }
        }
      } else {
        for (std::size_t k = g.features.row_ptr()[i]; k < g.features.row_ptr()[i + 1]; ++k) {
          feat_triplets.push_back({m, g.features.col_idx()[k], g.features.values()[k]});
        }
        for (std::size_t j = 0; j < c; ++j) merged.labels.at(m, j) = g.labels.at(i, j);
        filled[m] = 1;
      }
      merged.train_mask[m] |= g.train_mask[i];
      merged.val_mask[m] |= g.val_mask[i];
      merged.test_mask[m] |= g.test_mask[i];
    }
    for (std::size_t i = 0; i < g.num_nodes; ++i) {
      for (std::size_t k = g.adjacency.row_ptr()[i]; k < g.adjacency.row_ptr()[i + 1]; ++k) {
        edge_triplets.push_back({to_merged[i], to_merged[g.adjacency.col_idx()[k]], 1.0});
      }
    }
  }

  merged.features = SparseMatrix::from_triplets(n, d, std::move(feat_triplets));
  merged.adjacency = SparseMatrix::from_triplets(n, n, std::move(edge_triplets));

  // Feature agreement check for shared nodes, done against the merged matrix.
  for (const Graph& g : graphs) {
    for (std::size_t i = 0; i < g.num_nodes; ++i) {
      const std::size_t m = row_of.at(g.global_ids[i]);
      std::size_t ka = g.features.row_ptr()[i];
      const std::size_t ka_end = g.features.row_ptr()[i + 1];
      std::size_t kb = merged.features.row_ptr()[m];
      const std::size_t kb_end = merged.features.row_ptr()[m + 1];
      bool equal = (ka_end - ka) == (kb_end - kb);
      for (; equal && ka < ka_end; ++ka, ++kb) {
        equal = g.features.col_idx()[ka] == merged.features.col_idx()[kb] &&
                g.features.values()[ka] == merged.features.values()[kb];
      }
      if (!equal) {
        throw ValidationError("merge_graphs: conflicting features for global id " +
                              std::to_string(g.global_ids[i]));
      }
    }
  }
  return merged;
}

}  // namespace fedgl
