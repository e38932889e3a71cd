#include "fedgl/fedserver.hpp"

#include <algorithm>
#include <cmath>

#include "fedgl/errors.hpp"

namespace fedgl {

ModelWeights aggregate_weights(const std::vector<WeightUpload>& uploads) {
  if (uploads.empty()) throw ValidationError("aggregate_weights: no uploads");
  double total = 0.0;
  for (const WeightUpload& u : uploads) {
    if (!u.weights->same_shape(*uploads.front().weights)) {
      throw ValidationError("aggregate_weights: weight shape mismatch");
    }
    total += static_cast<double>(u.node_count);
  }
  if (total == 0.0) throw ValidationError("aggregate_weights: zero total node count");

  ModelWeights out;
  out.w0 = DenseMatrix(uploads.front().weights->w0.rows(), uploads.front().weights->w0.cols());
  out.w1 = DenseMatrix(uploads.front().weights->w1.rows(), uploads.front().weights->w1.cols());
  for (const WeightUpload& u : uploads) {
    const double w = static_cast<double>(u.node_count) / total;
    out.w0.add_scaled(u.weights->w0, w);
    out.w1.add_scaled(u.weights->w1, w);
  }
  return out;
}

DenseMatrix fuse_client_matrices(const std::vector<MatrixUpload>& uploads,
                                 std::size_t union_size, bool renormalize) {
  if (uploads.empty()) throw ValidationError("fuse: no uploads");
  const std::size_t cols = uploads.front().matrix->cols();
  double total = 0.0;
  for (const MatrixUpload& u : uploads) total += static_cast<double>(u.node_count);

  DenseMatrix fused(union_size, cols);
  std::vector<double> coverage(union_size, 0.0);
  for (const MatrixUpload& u : uploads) {
    if (u.matrix->cols() != cols) throw ValidationError("fuse: column count mismatch");
    if (u.rows->size() != u.matrix->rows()) {
      throw ValidationError("fuse: row index count does not match matrix rows");
    }
    const double w = static_cast<double>(u.node_count) / total;
    for (std::size_t i = 0; i < u.rows->size(); ++i) {
      const std::size_t r = (*u.rows)[i];
      if (r >= union_size) throw ValidationError("fuse: row outside the registry");
      double* frow = fused.row(r);
      const double* mrow = u.matrix->row(i);
      for (std::size_t j = 0; j < cols; ++j) frow[j] += w * mrow[j];
      coverage[r] += w;
    }
  }
  if (renormalize) {
    for (std::size_t r = 0; r < union_size; ++r) {
      if (coverage[r] > 0.0) {
        double* frow = fused.row(r);
        for (std::size_t j = 0; j < cols; ++j) frow[j] /= coverage[r];
      }
    }
  }
  return fused;
}

DenseMatrix discover_pseudo_labels(const DenseMatrix& fused, double lambda,
                                   const std::vector<std::size_t>& train_rows) {
  if (lambda < 0.0 || lambda >= 1.0) {
    throw ValidationError("discover_pseudo_labels: lambda must be in [0,1)");
  }
  DenseMatrix out(fused.rows(), fused.cols());
  std::vector<std::uint8_t> is_train(fused.rows(), 0);
  for (std::size_t r : train_rows) {
    if (r >= fused.rows()) throw ValidationError("discover_pseudo_labels: train row out of range");
    is_train[r] = 1;
  }
  for (std::size_t i = 0; i < fused.rows(); ++i) {
    if (is_train[i]) continue;
    const double* row = fused.row(i);
    const std::size_t j = argmax_row(row, fused.cols());
    if (row[j] > lambda) out.at(i, j) = 1.0;
  }
  return out;
}

SparseMatrix build_pseudo_graph(const DenseMatrix& embeddings, std::size_t neighbor_cap) {
  if (neighbor_cap == 0) throw ValidationError("build_pseudo_graph: neighbor cap must be >= 1");
  const std::size_t n = embeddings.rows();
  const std::size_t c = embeddings.cols();

  // Column-major copy so each similarity row is c contiguous axpy sweeps.
  std::vector<double> transposed(c * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < c; ++k) transposed[k * n + i] = embeddings.at(i, k);
  }

  std::vector<SparseMatrix::Triplet> triplets;
  std::vector<double> sim(n);
  std::vector<std::pair<double, std::size_t>> candidates;  // (similarity, column)
  candidates.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double* hi = embeddings.row(i);
    std::fill(sim.begin(), sim.end(), 0.0);
    for (std::size_t k = 0; k < c; ++k) {
      const double w = hi[k];
      if (w == 0.0) continue;
      const double* col = transposed.data() + k * n;
      for (std::size_t j = 0; j < n; ++j) sim[j] += w * col[j];
    }
    candidates.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;  // self-similarity never spends neighbor budget
      if (sim[j] > 0.0) candidates.emplace_back(sim[j], j);
    }
    if (candidates.empty()) continue;

    const std::size_t keep = std::min(neighbor_cap, candidates.size());
    // Largest similarity first; ties keep the lower column index.
    const auto by_rank = [](const std::pair<double, std::size_t>& a,
                            const std::pair<double, std::size_t>& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    };
    std::nth_element(candidates.begin(),
                     candidates.begin() + static_cast<std::ptrdiff_t>(keep - 1),
                     candidates.end(), by_rank);
    candidates.resize(keep);

    double row_sum = 0.0;
    for (const auto& [value, col] : candidates) row_sum += value;
    for (const auto& [value, col] : candidates) triplets.push_back({i, col, value / row_sum});
  }
  return SparseMatrix::from_triplets(n, n, std::move(triplets));
}

std::size_t count_pseudo_labels(const DenseMatrix& pseudo_labels) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < pseudo_labels.rows(); ++i) {
    const double* row = pseudo_labels.row(i);
    for (std::size_t j = 0; j < pseudo_labels.cols(); ++j) {
      if (row[j] != 0.0) {
        count += 1;
        break;
      }
    }
  }
  return count;
}

}  // namespace fedgl
