#pragma once
// SparseBinaryMatrix: an immutable 0/1 matrix in compressed support form.
//
// Both the row view and the column view of the support are stored (sorted,
// duplicate-free) so that row scans and column scans are equally cheap; the
// constructor guarantees the two views describe the same entry set.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "rmtsharp/errors.hpp"

namespace rmtsharp {

class SparseBinaryMatrix {
 public:
  SparseBinaryMatrix() = default;

  // Builds from an entry list; validates ranges and rejects duplicates.
  static SparseBinaryMatrix from_entries(int rows, int cols,
                                         std::vector<std::pair<int, int>> entries) {
    if (rows < 1 || cols < 1)
      throw parameter_error("matrix dimensions must be positive, got " +
                            std::to_string(rows) + "x" + std::to_string(cols));
    std::sort(entries.begin(), entries.end());
    SparseBinaryMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_support_.assign(static_cast<std::size_t>(rows), {});
    m.col_support_.assign(static_cast<std::size_t>(cols), {});
    const std::pair<int, int>* prev = nullptr;
    for (const auto& e : entries) {
      if (e.first < 0 || e.first >= rows || e.second < 0 || e.second >= cols)
        throw parameter_error("matrix entry (" + std::to_string(e.first) + "," +
                              std::to_string(e.second) + ") out of range");
      if (prev != nullptr && *prev == e)
        throw parameter_error("duplicate matrix entry (" + std::to_string(e.first) +
                              "," + std::to_string(e.second) + ")");
      m.row_support_[static_cast<std::size_t>(e.first)].push_back(e.second);
      m.col_support_[static_cast<std::size_t>(e.second)].push_back(e.first);
      m.nnz_ += 1;
      prev = &e;
    }
    // Row lists are sorted by construction (entries were sorted row-major);
    // column lists inherit sortedness because rows were visited in order.
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return nnz_; }

  const std::vector<int>& row_support(int i) const {
    return row_support_[static_cast<std::size_t>(i)];
  }
  const std::vector<int>& col_support(int j) const {
    return col_support_[static_cast<std::size_t>(j)];
  }

  bool at(int i, int j) const {
    const auto& r = row_support_[static_cast<std::size_t>(i)];
    return std::binary_search(r.begin(), r.end(), j);
  }

  bool operator==(const SparseBinaryMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ &&
           row_support_ == other.row_support_;
  }

  // Entries in row-major order, the canonical serialization order.
  std::vector<std::pair<int, int>> entries_row_major() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(nnz_);
    for (int i = 0; i < rows_; ++i)
      for (int j : row_support(i)) out.emplace_back(i, j);
    return out;
  }

  SparseBinaryMatrix transposed() const {
    SparseBinaryMatrix t;
    t.rows_ = cols_;
    t.cols_ = rows_;
    t.row_support_ = col_support_;
    t.col_support_ = row_support_;
    t.nnz_ = nnz_;
    return t;
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j : row_support(i)) d(i, j) = 1.0;
    return d;
  }

  Eigen::SparseMatrix<double> to_sparse() const {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(nnz_);
    for (int i = 0; i < rows_; ++i)
      for (int j : row_support(i)) trips.emplace_back(i, j, 1.0);
    Eigen::SparseMatrix<double> s(rows_, cols_);
    s.setFromTriplets(trips.begin(), trips.end());
    return s;
  }

  // y = A x and y = A^T x through the stored supports; used by the iterative
  // spectral routines so no Eigen sparse object needs to be materialized.
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.setZero(rows_);
    for (int i = 0; i < rows_; ++i) {
      double acc = 0.0;
      for (int j : row_support(i)) acc += x[j];
      y[i] = acc;
    }
  }
  void multiply_transpose(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    y.setZero(cols_);
    for (int j = 0; j < cols_; ++j) {
      double acc = 0.0;
      for (int i : col_support(j)) acc += x[i];
      y[j] = acc;
    }
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::size_t nnz_ = 0;
  std::vector<std::vector<int>> row_support_;
  std::vector<std::vector<int>> col_support_;
};

}  // namespace rmtsharp
