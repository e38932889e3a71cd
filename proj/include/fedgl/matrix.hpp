#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fedgl {

// Row-major dense matrix of 64-bit floats.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;

  void fill(double value);
  void add_scaled(const DenseMatrix& other, double scale);  // this += scale * other
  void scale(double factor);

  // this = a * b. Shapes are checked.
  static DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
  // this = a^T * b, without materializing the transpose.
  static DenseMatrix multiply_at_b(const DenseMatrix& a, const DenseMatrix& b);
  // this = a * b^T.
  static DenseMatrix multiply_a_bt(const DenseMatrix& a, const DenseMatrix& b);

  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Compressed-sparse-row matrix with sorted, unique column indices per row.
// Iteration order over stored entries is therefore deterministic.
class SparseMatrix {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  // Duplicate (row, col) pairs collapse according to `combine`:
  // kLast keeps the final value, kSum accumulates.
  enum class Combine { kLast, kSum };
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> triplets,
                                    Combine combine = Combine::kLast);
  static SparseMatrix from_dense(const DenseMatrix& dense);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double at(std::size_t r, std::size_t c) const;

  bool is_symmetric() const;          // exact pattern and value match
  bool all_non_negative() const;
  std::vector<double> row_sums() const;

  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;

  // y = this * x  (dense right operand)
  DenseMatrix multiply_dense(const DenseMatrix& x) const;
  // accum += scale * (this^T * x); used by backprop without forming transposes.
  void add_transpose_multiply(const DenseMatrix& x, DenseMatrix& accum, double scale) const;

  // Square submatrix on the given row/col indices, relabeled 0..idx.size()-1.
  SparseMatrix submatrix(const std::vector<std::size_t>& indices) const;

  bool operator==(const SparseMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace fedgl
