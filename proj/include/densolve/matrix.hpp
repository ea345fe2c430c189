// Copyright 2026 The densolve Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <concepts>
#include <initializer_list>
#include <limits>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "densolve/errors.hpp"

namespace densolve {

/// Floating-point types a solve may run in: binary32 or binary64.
template <typename T>
concept Real = std::same_as<T, float> || std::same_as<T, double>;

/// Unit roundoff (half the machine epsilon) of the active precision.
template <Real T>
constexpr T unit_roundoff() {
  return std::numeric_limits<T>::epsilon() / T(2);
}

template <Real T>
using Vector = std::vector<T>;

/// Non-owning column-major window into a matrix with leading dimension `ld`.
/// `E` is `T` for a mutable view and `const T` for a read-only one.
template <typename E>
class BasicMatrixView {
public:
  using value_type = std::remove_const_t<E>;

  BasicMatrixView() = default;
  BasicMatrixView(E* data, std::size_t rows, std::size_t cols, std::size_t ld)
      : data_(data), rows_(rows), cols_(cols), ld_(ld) {}

  // mutable -> const conversion
  template <typename F>
    requires(std::is_const_v<E> && std::same_as<F, value_type>)
  BasicMatrixView(const BasicMatrixView<F>& other)
      : data_(other.data()), rows_(other.rows()), cols_(other.cols()), ld_(other.ld()) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t ld() const noexcept { return ld_; }
  E* data() const noexcept { return data_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  E& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i + j * ld_]; }

  std::span<E> col(std::size_t j) const noexcept { return {data_ + j * ld_, rows_}; }

  BasicMatrixView block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    detail::require_dims(r0 + nr <= rows_ && c0 + nc <= cols_, "submatrix out of range");
    return {data_ + r0 + c0 * ld_, nr, nc, ld_};
  }

private:
  E* data_ = nullptr;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t ld_ = 0;
};

template <Real T>
using MatrixView = BasicMatrixView<T>;
template <Real T>
using ConstMatrixView = BasicMatrixView<const T>;

/// Owning dense matrix, column-major: element (i, j) lives at offset i + j * rows.
template <Real T>
class DenseMatrix {
public:
  using value_type = T;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Adopts a column-major buffer; its length must be rows * cols.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    detail::require_dims(data_.size() == rows * cols, "buffer length must equal rows*cols");
  }

  /// Row-wise literal, e.g. `DenseMatrix<double>::from_rows({{1, 2}, {3, 4}})`.
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<T>> rows) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.begin()->size();
    DenseMatrix a(m, n);
    std::size_t i = 0;
    for (const auto& row : rows) {
      detail::require_dims(row.size() == n, "ragged row literal");
      std::size_t j = 0;
      for (T v : row) a(i, j++) = v;
      ++i;
    }
    return a;
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = T(1);
    return a;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i + j * rows_]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i + j * rows_]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  std::span<T> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const T> col(std::size_t j) const noexcept { return {data_.data() + j * rows_, rows_}; }

  MatrixView<T> view() noexcept { return {data_.data(), rows_, cols_, rows_}; }
  ConstMatrixView<T> view() const noexcept { return {data_.data(), rows_, cols_, rows_}; }
  ConstMatrixView<T> cview() const noexcept { return view(); }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
  }

  bool operator==(const DenseMatrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Row interchanges of partial pivoting: entry k is the row swapped into position k.
class PivotVector {
public:
  PivotVector() = default;
  explicit PivotVector(std::vector<std::size_t> pivots) : pivots_(std::move(pivots)) {}

  std::size_t size() const noexcept { return pivots_.size(); }
  std::size_t operator[](std::size_t k) const noexcept { return pivots_[k]; }
  std::size_t& operator[](std::size_t k) noexcept { return pivots_[k]; }
  const std::vector<std::size_t>& values() const noexcept { return pivots_; }

  /// Applies swaps k = 0..size-1 in order (x <- P x).
  template <typename T>
  void apply(std::span<T> x) const {
    detail::require_dims(x.size() >= pivots_.size(), "vector shorter than pivot record");
    for (std::size_t k = 0; k < pivots_.size(); ++k)
      if (pivots_[k] != k) std::swap(x[k], x[pivots_[k]]);
  }

  /// Undoes `apply` (x <- P^T x).
  template <typename T>
  void apply_inverse(std::span<T> x) const {
    detail::require_dims(x.size() >= pivots_.size(), "vector shorter than pivot record");
    for (std::size_t k = pivots_.size(); k-- > 0;)
      if (pivots_[k] != k) std::swap(x[k], x[pivots_[k]]);
  }

  /// Row permutation as an index map: row i of P A is row perm[i] of A.
  std::vector<std::size_t> permutation(std::size_t n) const {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    apply(std::span<std::size_t>(perm));
    return perm;
  }

  /// Number of actual interchanges is odd.
  bool odd() const noexcept {
    std::size_t swaps = 0;
    for (std::size_t k = 0; k < pivots_.size(); ++k) swaps += pivots_[k] != k;
    return swaps % 2 == 1;
  }

  bool operator==(const PivotVector&) const = default;

private:
  std::vector<std::size_t> pivots_;
};

}  // namespace densolve
