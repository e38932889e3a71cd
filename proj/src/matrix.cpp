#include "fedgl/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fedgl/errors.hpp"

namespace fedgl {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ValidationError("dense matrix: data size does not match shape");
  }
}

bool DenseMatrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void DenseMatrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void DenseMatrix::add_scaled(const DenseMatrix& other, double scale) {
  if (!same_shape(other)) throw ValidationError("dense add: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
}

void DenseMatrix::scale(double factor) {
  for (double& v : data_) v *= factor;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw ValidationError("dense multiply: inner dimension mismatch");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

DenseMatrix DenseMatrix::multiply_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw ValidationError("dense multiply_at_b: row count mismatch");
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* arow = a.row(k);
    const double* brow = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      double* orow = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aki * brow[j];
    }
  }
  return out;
}

DenseMatrix DenseMatrix::multiply_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw ValidationError("dense multiply_a_bt: column count mismatch");
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* brow = b.row(j);
      double sum = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) sum += arow[k] * brow[k];
      orow[j] = sum;
    }
  }
  return out;
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets, Combine combine) {
  for (const Triplet& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw ValidationError("sparse from_triplets: index out of range");
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseMatrix m(rows, cols);
  m.col_idx_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const Triplet& t = triplets[i];
    if (i > 0 && triplets[i - 1].row == t.row && triplets[i - 1].col == t.col) {
      if (combine == Combine::kSum) {
        m.values_.back() += t.value;
      } else {
        m.values_.back() = t.value;
      }
      continue;
    }
    m.col_idx_.push_back(t.col);
    m.values_.push_back(t.value);
    m.row_ptr_[t.row + 1] += 1;
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
  return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  std::vector<Triplet> triplets;
  for (std::size_t r = 0; r < dense.rows(); ++r) {
    for (std::size_t c = 0; c < dense.cols(); ++c) {
      if (dense.at(r, c) != 0.0) triplets.push_back({r, c, dense.at(r, c)});
    }
  }
  return from_triplets(dense.rows(), dense.cols(), std::move(triplets));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> triplets;
  triplets.reserve(n);
  for (std::size_t i = 0; i < n; ++i) triplets.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(triplets));
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  return *this == transpose();
}

bool SparseMatrix::all_non_negative() const {
  for (double v : values_) {
    if (v < 0.0) return false;
  }
  return true;
}

std::vector<double> SparseMatrix::row_sums() const {
  std::vector<double> sums(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += values_[k];
    sums[r] = s;
  }
  return sums;
}

SparseMatrix SparseMatrix::transpose() const {
  SparseMatrix t(cols_, rows_);
  t.col_idx_.resize(nnz());
  t.values_.resize(nnz());
  std::vector<std::size_t> counts(cols_, 0);
  for (std::size_t c : col_idx_) counts[c] += 1;
  for (std::size_t c = 0; c < cols_; ++c) t.row_ptr_[c + 1] = t.row_ptr_[c] + counts[c];
  std::vector<std::size_t> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t pos = next[col_idx_[k]]++;
      t.col_idx_[pos] = r;
      t.values_[pos] = values_[k];
    }
  }
  return t;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      d.at(r, col_idx_[k]) = values_[k];
    }
  }
  return d;
}

DenseMatrix SparseMatrix::multiply_dense(const DenseMatrix& x) const {
  if (cols_ != x.rows()) throw ValidationError("sparse multiply: inner dimension mismatch");
  DenseMatrix out(rows_, x.cols());
  for (std::size_t r = 0; r < rows_; ++r) {
    double* orow = out.row(r);
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const double v = values_[k];
      const double* xrow = x.row(col_idx_[k]);
      for (std::size_t j = 0; j < x.cols(); ++j) orow[j] += v * xrow[j];
    }
  }
  return out;
}

void SparseMatrix::add_transpose_multiply(const DenseMatrix& x, DenseMatrix& accum,
                                          double scale) const {
  if (rows_ != x.rows()) throw ValidationError("sparse t-multiply: row count mismatch");
  if (accum.rows() != cols_ || accum.cols() != x.cols()) {
    throw ValidationError("sparse t-multiply: accumulator shape mismatch");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* xrow = x.row(r);
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const double v = scale * values_[k];
      double* arow = accum.row(col_idx_[k]);
      for (std::size_t j = 0; j < x.cols(); ++j) arow[j] += v * xrow[j];
    }
  }
}

SparseMatrix SparseMatrix::submatrix(const std::vector<std::size_t>& indices) const {
  if (rows_ != cols_) throw ValidationError("submatrix requires a square matrix");
  constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> local(rows_, kAbsent);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) throw ValidationError("submatrix: index out of range");
    if (local[indices[i]] != kAbsent) throw ValidationError("submatrix: duplicate index");
    local[indices[i]] = i;
  }
  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t r = indices[i];
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t c = local[col_idx_[k]];
      if (c != kAbsent) triplets.push_back({i, c, values_[k]});
    }
  }
  return from_triplets(indices.size(), indices.size(), std::move(triplets));
}

}  // namespace fedgl
