#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tomoq {

using Complex = std::complex<double>;

// Dense row-major complex matrix.  Only the operations the tomographic layer
// needs; heavy numerics (eigensolves, QR) live behind quantum.hpp.
class ComplexMatrix {
public:
  ComplexMatrix() : rows_(0), cols_(0) {}
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, Complex{0.0, 0.0}) {}

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex{1.0, 0.0};
    return m;
  }

  static ComplexMatrix from_rows(const std::vector<std::vector<Complex>>& rows) {
    if (rows.empty()) throw std::invalid_argument("ComplexMatrix: no rows");
    ComplexMatrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != m.cols_)
        throw std::invalid_argument("ComplexMatrix: ragged rows");
      for (std::size_t c = 0; c < m.cols_; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

  ComplexMatrix adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
  }

  Complex trace() const {
    if (!square()) throw std::invalid_argument("trace: matrix is not square");
    Complex t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  std::vector<Complex> diagonal() const {
    if (!square()) throw std::invalid_argument("diagonal: matrix is not square");
    std::vector<Complex> d(rows_);
    for (std::size_t i = 0; i < rows_; ++i) d[i] = (*this)(i, i);
    return d;
  }

private:
  std::size_t rows_, cols_;
  std::vector<Complex> a_;
};

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix sum: shape mismatch");
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

inline ComplexMatrix operator*(Complex s, const ComplexMatrix& a) {
  ComplexMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{0.0, 0.0}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return c;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double d = std::abs(a(i, j) - b(i, j));
      if (d > m) m = d;
    }
  return m;
}

inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  return max_abs_diff(a, b) <= tol;
}

// max_ij |m - m^dagger|; zero for an exactly Hermitian matrix.
inline double hermiticity_residual(const ComplexMatrix& m) {
  if (!m.square()) throw std::invalid_argument("hermiticity_residual: matrix is not square");
  double r = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) {
      const double d = std::abs(m(i, j) - std::conj(m(j, i)));
      if (d > r) r = d;
    }
  return r;
}

// max_ij |u^dagger u - I|.
inline double unitarity_residual(const ComplexMatrix& u) {
  if (!u.square()) throw std::invalid_argument("unitarity_residual: matrix is not square");
  return max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.rows()));
}

} // namespace tomoq
