#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "entropylab/error.hpp"

namespace entropylab {

using Complex = std::complex<double>;

/// Dense square complex matrix, row-major. Dimension is always >= 1.
class ComplexMatrix {
 public:
  /// n x n zero matrix.
  explicit ComplexMatrix(std::size_t n) : n_(n), data_(n * n) {
    if (n == 0) throw DimensionError("ComplexMatrix: dimension must be positive");
  }

  /// Takes ownership of n*n row-major entries; rejects non-finite values.
  ComplexMatrix(std::size_t n, std::vector<Complex> row_major) : n_(n), data_(std::move(row_major)) {
    if (n == 0) throw DimensionError("ComplexMatrix: dimension must be positive");
    if (data_.size() != n * n) {
      throw DimensionError("ComplexMatrix: expected " + std::to_string(n * n) + " entries, got " +
                           std::to_string(data_.size()));
    }
    for (const auto& z : data_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw ValidationError("ComplexMatrix: non-finite entry");
      }
    }
  }

  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
      : ComplexMatrix(rows.size(), flatten(rows)) {}

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// Matrix unit E_ab (one at row a, column b).
  static ComplexMatrix unit(std::size_t n, std::size_t a, std::size_t b) {
    ComplexMatrix m(n);
    m(a, b) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> d) {
    ComplexMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  /// |v><w| for column vectors v, w.
  static ComplexMatrix outer(std::span<const Complex> v, std::span<const Complex> w) {
    if (v.size() != w.size()) throw DimensionError("outer: length mismatch");
    ComplexMatrix m(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = v[i] * std::conj(w[j]);
    return m;
  }

  std::size_t dim() const noexcept { return n_; }

  Complex operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * n_ + c]; }
  Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * n_ + c]; }

  std::span<const Complex> data() const noexcept { return data_; }

  std::vector<Complex> column(std::size_t c) const {
    std::vector<Complex> v(n_);
    for (std::size_t r = 0; r < n_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  static std::vector<Complex> flatten(std::initializer_list<std::initializer_list<Complex>> rows) {
    std::vector<Complex> out;
    for (const auto& row : rows) {
      if (row.size() != rows.size()) throw DimensionError("ComplexMatrix: rows must form a square");
      out.insert(out.end(), row.begin(), row.end());
    }
    return out;
  }

  std::size_t n_;
  std::vector<Complex> data_;
};

namespace detail {
inline void require_same_dim(const ComplexMatrix& x, const ComplexMatrix& y, const char* op) {
  if (x.dim() != y.dim()) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(x.dim()) +
                         " vs " + std::to_string(y.dim()) + ")");
  }
}
}  // namespace detail

inline ComplexMatrix matmul(const ComplexMatrix& x, const ComplexMatrix& y) {
  detail::require_same_dim(x, y, "matmul");
  const std::size_t n = x.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex xik = x(i, k);
      if (xik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += xik * y(k, j);
    }
  return out;
}

inline ComplexMatrix add(const ComplexMatrix& x, const ComplexMatrix& y) {
  detail::require_same_dim(x, y, "add");
  ComplexMatrix out = x;
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = 0; j < x.dim(); ++j) out(i, j) += y(i, j);
  return out;
}

inline ComplexMatrix subtract(const ComplexMatrix& x, const ComplexMatrix& y) {
  detail::require_same_dim(x, y, "subtract");
  ComplexMatrix out = x;
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = 0; j < x.dim(); ++j) out(i, j) -= y(i, j);
  return out;
}

inline ComplexMatrix scale(Complex s, const ComplexMatrix& x) {
  ComplexMatrix out = x;
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = 0; j < x.dim(); ++j) out(i, j) *= s;
  return out;
}

/// Conjugate transpose.
inline ComplexMatrix adjoint(const ComplexMatrix& x) {
  ComplexMatrix out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = 0; j < x.dim(); ++j) out(j, i) = std::conj(x(i, j));
  return out;
}

inline ComplexMatrix transpose(const ComplexMatrix& x) {
  ComplexMatrix out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = 0; j < x.dim(); ++j) out(j, i) = x(i, j);
  return out;
}

inline Complex trace(const ComplexMatrix& x) {
  Complex t{};
  for (std::size_t i = 0; i < x.dim(); ++i) t += x(i, i);
  return t;
}

inline double frobenius_norm(const ComplexMatrix& x) {
  double s = 0.0;
  for (const auto& z : x.data()) s += std::norm(z);
  return std::sqrt(s);
}

/// Hilbert-Schmidt inner product <x, y> = Tr(y* x).
inline Complex hs_inner(const ComplexMatrix& x, const ComplexMatrix& y) {
  detail::require_same_dim(x, y, "hs_inner");
  Complex s{};
  const auto xd = x.data();
  const auto yd = y.data();
  for (std::size_t k = 0; k < xd.size(); ++k) s += std::conj(yd[k]) * xd[k];
  return s;
}

inline double distance(const ComplexMatrix& x, const ComplexMatrix& y) {
  return frobenius_norm(subtract(x, y));
}

/// ||m - m*||_F
inline double hermiticity_residual(const ComplexMatrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) s += std::norm(m(i, j) - std::conj(m(j, i)));
  return std::sqrt(s);
}

/// (m + m*) / 2
inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  ComplexMatrix out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return out;
}

/// ||u* u - I||_F
inline double unitarity_residual(const ComplexMatrix& u) {
  return distance(matmul(adjoint(u), u), ComplexMatrix::identity(u.dim()));
}

inline ComplexMatrix operator+(const ComplexMatrix& x, const ComplexMatrix& y) { return add(x, y); }
inline ComplexMatrix operator-(const ComplexMatrix& x, const ComplexMatrix& y) { return subtract(x, y); }
inline ComplexMatrix operator*(const ComplexMatrix& x, const ComplexMatrix& y) { return matmul(x, y); }
inline ComplexMatrix operator*(Complex s, const ComplexMatrix& x) { return scale(s, x); }
inline ComplexMatrix operator*(double s, const ComplexMatrix& x) { return scale(Complex{s, 0.0}, x); }

/// Sandwich u x u*.
inline ComplexMatrix conjugate_by(const ComplexMatrix& u, const ComplexMatrix& x) {
  return matmul(matmul(u, x), adjoint(u));
}

}  // namespace entropylab
