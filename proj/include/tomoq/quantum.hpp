#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tomoq/matrix.hpp"
#include "tomoq/prob.hpp"
#include "tomoq/rng.hpp"

namespace tomoq {

// Input Hermiticity is enforced to this residual before an eigensolve or a
// density-matrix construction is accepted.
inline constexpr double hermitian_input_tol = 1e-10;
// Accepted deviation of a unitary candidate from u^dagger u = I.
inline constexpr double unitary_input_tol = 1e-9;
// Spectral gaps below this flag the eigenbasis as gauge-dependent.
inline constexpr double degenerate_gap_tol = 1e-8;

namespace detail {

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return e;
}

inline ComplexMatrix from_eigen(const Eigen::MatrixXcd& e) {
  ComplexMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j) m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
  return m;
}

// Mixed-radix strides for a row-major factorized index.
inline std::vector<std::size_t> strides_of(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t f = dims.size(); f-- > 1;) s[f - 1] = s[f] * dims[f];
  return s;
}

} // namespace detail

// Spectral decomposition of a Hermitian matrix with a deterministic gauge:
// eigenvalues sorted descending (ties keep ascending original order), each
// eigenvector scaled so its largest-modulus component is real positive.
// Inputs that are already diagonal to rounding get permutation-matrix
// eigenvectors, so diagonal states keep their natural basis exactly.
struct EigenSystem {
  std::vector<double> values;  // descending
  ComplexMatrix vectors;       // column k pairs with values[k]
};

inline EigenSystem hermitian_eigensystem(const ComplexMatrix& h,
                                         double input_tol = hermitian_input_tol) {
  if (!h.square()) throw std::invalid_argument("hermitian_eigensystem: matrix is not square");
  if (hermiticity_residual(h) > input_tol)
    throw std::invalid_argument("hermitian_eigensystem: input is not Hermitian");
  const std::size_t n = h.rows();

  double max_offdiag = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) max_offdiag = std::max(max_offdiag, std::abs(h(i, j)));

  std::vector<double> raw(n);
  ComplexMatrix raw_vectors;
  const bool diagonal_input = max_offdiag <= 1e-14;
  if (diagonal_input) {
    for (std::size_t i = 0; i < n; ++i) raw[i] = h(i, i).real();
  } else {
    // Symmetrize the admissible residual away, then hand off to the solver.
    ComplexMatrix hs(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        hs(i, j) = 0.5 * (h(i, j) + std::conj(h(j, i)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(detail::to_eigen(hs));
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("hermitian_eigensystem: solver did not converge");
    for (std::size_t i = 0; i < n; ++i) raw[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
    raw_vectors = detail::from_eigen(solver.eigenvectors());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&raw](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });

  EigenSystem out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = raw[src];
    if (diagonal_input) {
      out.vectors(src, k) = Complex{1.0, 0.0};
      continue;
    }
    // Phase gauge: the first component of largest modulus becomes real positive.
    std::size_t pivot = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = std::abs(raw_vectors(i, src));
      if (a > best + 1e-15) {
        best = a;
        pivot = i;
      }
    }
    const Complex phase = raw_vectors(pivot, src) / std::abs(raw_vectors(pivot, src));
    for (std::size_t i = 0; i < n; ++i)
      out.vectors(i, k) = raw_vectors(i, src) * std::conj(phase);
  }
  return out;
}

inline bool has_degenerate_spectrum(const std::vector<double>& descending_values,
                                    double gap_tol = degenerate_gap_tol) {
  for (std::size_t i = 0; i + 1 < descending_values.size(); ++i)
    if (descending_values[i] - descending_values[i + 1] < gap_tol) return true;
  return false;
}

// Density matrix on a factorized Hilbert space.  Construction pins down
// Hermiticity, unit trace and positivity (eigenvalues >= -1e-10, clamped);
// the spectral decomposition is cached since every entropic quantity and
// every minimizer below starts from it.
class DensityMatrix {
public:
  DensityMatrix(ComplexMatrix m, std::vector<std::size_t> dims)
      : mat_(std::move(m)), dims_(std::move(dims)),
        eig_(validated_eigensystem(mat_, dims_)), spectrum_(eig_.values) {}

  const ComplexMatrix& mat() const { return mat_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t dim() const { return mat_.rows(); }
  std::size_t factor_count() const { return dims_.size(); }

  const std::vector<double>& eigenvalues() const { return eig_.values; }
  const ComplexMatrix& eigenbasis() const { return eig_.vectors; }
  bool degenerate() const { return has_degenerate_spectrum(eig_.values); }

  // Eigenvalues as a probability vector (clamped and renormalized).
  const ProbVector& spectrum() const { return spectrum_; }

private:
  static EigenSystem validated_eigensystem(const ComplexMatrix& m,
                                           const std::vector<std::size_t>& dims) {
    if (!m.square()) throw std::invalid_argument("DensityMatrix: matrix is not square");
    if (dims.empty()) throw std::invalid_argument("DensityMatrix: no subsystem dimensions");
    std::size_t prod = 1;
    for (std::size_t d : dims) {
      if (d == 0) throw std::invalid_argument("DensityMatrix: zero subsystem dimension");
      prod *= d;
    }
    if (prod != m.rows())
      throw std::invalid_argument("DensityMatrix: dims do not factorize the matrix size");
    if (hermiticity_residual(m) > hermitian_input_tol)
      throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    const Complex t = m.trace();
    if (std::abs(t.real() - 1.0) > sum_tol || std::abs(t.imag()) > sum_tol)
      throw std::invalid_argument("DensityMatrix: trace is not one");
    EigenSystem eig = hermitian_eigensystem(m);
    if (eig.values.back() < -component_clamp_tol)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                  std::to_string(eig.values.back()));
    return eig;
  }

  ComplexMatrix mat_;
  std::vector<std::size_t> dims_;
  EigenSystem eig_;
  ProbVector spectrum_;
};

class UnitaryMatrix {
public:
  explicit UnitaryMatrix(ComplexMatrix m, double tol = unitary_input_tol)
      : mat_(std::move(m)) {
    if (!mat_.square()) throw std::invalid_argument("UnitaryMatrix: matrix is not square");
    if (mat_.rows() == 0) throw std::invalid_argument("UnitaryMatrix: empty matrix");
    if (unitarity_residual(mat_) > tol)
      throw std::invalid_argument("UnitaryMatrix: u^dagger u deviates from identity");
  }

  static UnitaryMatrix identity(std::size_t n) {
    return UnitaryMatrix(ComplexMatrix::identity(n));
  }

  const ComplexMatrix& mat() const { return mat_; }
  std::size_t dim() const { return mat_.rows(); }

private:
  ComplexMatrix mat_;
};

inline UnitaryMatrix tensor(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  return UnitaryMatrix(kron(a.mat(), b.mat()));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<std::size_t> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityMatrix(kron(a.mat(), b.mat()), std::move(dims));
}

// Measurement statistics of a state in a rotated basis: component m is
// <m| u^dagger rho u |m>.  Outcomes are indexed row-major over the factor
// dimensions; projections() recovers the spin labels of one outcome.
struct Tomogram {
  ProbVector probs;
  std::vector<std::size_t> dims;
  UnitaryMatrix unitary;

  std::vector<double> projections(std::size_t outcome) const {
    const auto strides = detail::strides_of(dims);
    std::vector<double> m(dims.size());
    for (std::size_t f = 0; f < dims.size(); ++f) {
      const std::size_t idx = (outcome / strides[f]) % dims[f];
      m[f] = 0.5 * static_cast<double>(dims[f] - 1) - static_cast<double>(idx);
    }
    return m;
  }
};

inline Tomogram tomogram(const DensityMatrix& rho, const UnitaryMatrix& u) {
  if (u.dim() != rho.dim())
    throw std::invalid_argument("tomogram: unitary dimension does not match state");
  const std::size_t n = rho.dim();
  // w_m = sum_k lambda_k |(u^dagger u0)_{mk}|^2, the eigenbasis expansion of
  // <m| u^dagger rho u |m>.  Unlike the direct quadratic form this keeps zero
  // eigenvalues exactly absent: spurious mass on empty outcomes is quadratic
  // in the basis-orthogonality error, which matters because q < 1 entropies
  // amplify noise on near-zero components as its square root.
  const ComplexMatrix overlap = u.mat().adjoint() * rho.eigenbasis();
  const std::vector<double>& lam = rho.spectrum().components();
  std::vector<double> w(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += std::norm(overlap(m, k)) * lam[k];
    w[m] = acc;
  }
  return Tomogram{ProbVector(std::move(w)), rho.dims(), u};
}

// Sums out the factors not listed in keep.  The producing unitary is carried
// along unchanged as provenance.
inline Tomogram marginal_tomogram(const Tomogram& t, const std::vector<std::size_t>& keep) {
  if (keep.empty()) throw std::invalid_argument("marginal_tomogram: empty keep list");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= t.dims.size())
      throw std::invalid_argument("marginal_tomogram: factor index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw std::invalid_argument("marginal_tomogram: keep list must be strictly increasing");
  }
  const auto strides = detail::strides_of(t.dims);
  std::vector<std::size_t> kept_dims;
  for (std::size_t f : keep) kept_dims.push_back(t.dims[f]);
  const auto kept_strides = detail::strides_of(kept_dims);
  std::size_t kept_total = 1;
  for (std::size_t d : kept_dims) kept_total *= d;

  std::vector<double> m(kept_total, 0.0);
  for (std::size_t i = 0; i < t.probs.dim(); ++i) {
    std::size_t out = 0;
    for (std::size_t f = 0; f < keep.size(); ++f)
      out += ((i / strides[keep[f]]) % t.dims[keep[f]]) * kept_strides[f];
    m[out] += t.probs[i];
  }
  return Tomogram{ProbVector(std::move(m)), std::move(kept_dims), t.unitary};
}

// Haar-distributed unitary: complex Ginibre sample, QR decomposition, then
// the Q columns are phase-corrected with the R diagonal so the distribution
// is exactly the group's invariant measure.
inline UnitaryMatrix haar_sample(std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("haar_sample: zero dimension");
  SeededRng rng(seed);
  Eigen::MatrixXcd g(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex{re, im};
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(g.rows(), g.cols());
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const Complex rkk = r(k, k);
    const double a = std::abs(rkk);
    const Complex phase = a > 0.0 ? rkk / a : Complex{1.0, 0.0};
    q.col(k) *= phase;
  }
  return UnitaryMatrix(detail::from_eigen(q));
}

// Rank-constrained random state: G G^dagger / Tr(G G^dagger) with G an
// n x rank complex Ginibre matrix.  The product is assembled from its lower
// triangle so the result is Hermitian to the last bit.
inline DensityMatrix random_density(const std::vector<std::size_t>& dims, std::size_t rank,
                                    std::uint64_t seed) {
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw std::invalid_argument("random_density: zero subsystem dimension");
    n *= d;
  }
  if (rank == 0 || rank > n)
    throw std::invalid_argument("random_density: rank must lie in [1, dim]");
  SeededRng rng(seed);
  std::vector<Complex> g(n * rank);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < rank; ++k) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      g[i * rank + k] = Complex{re, im};
    }
  ComplexMatrix m(n, n);
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Complex s{0.0, 0.0};
      for (std::size_t k = 0; k < rank; ++k) s += g[i * rank + k] * std::conj(g[j * rank + k]);
      if (i == j) {
        m(i, i) = Complex{s.real(), 0.0};
        tr += s.real();
      } else {
        m(i, j) = s;
        m(j, i) = std::conj(s);
      }
    }
  }
  const Complex scale{1.0 / tr, 0.0};
  return DensityMatrix(scale * m, dims);
}

inline double von_neumann_entropy(const DensityMatrix& rho) {
  return shannon_entropy(rho.spectrum());
}

// Spectral q-entropy of the state itself; the shannon kind gives the
// von Neumann value.
inline double quantum_q_entropy(const DensityMatrix& rho, QParam q, EntropyKind kind) {
  return entropy(rho.spectrum(), kind, q);
}

// Traces out every factor not listed in keep; keep must be strictly
// increasing.  The reduced state inherits the kept dimensions in order.
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::vector<std::size_t>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep list");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= rho.factor_count())
      throw std::invalid_argument("partial_trace: factor index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw std::invalid_argument("partial_trace: keep list must be strictly increasing");
  }
  const auto& dims = rho.dims();
  const auto strides = detail::strides_of(dims);

  std::vector<std::size_t> kept_dims, dropped;
  for (std::size_t f = 0, k = 0; f < dims.size(); ++f) {
    if (k < keep.size() && keep[k] == f) {
      kept_dims.push_back(dims[f]);
      ++k;
    } else {
      dropped.push_back(f);
    }
  }
  if (dropped.empty()) return DensityMatrix(rho.mat(), rho.dims());

  std::size_t kept_total = 1, dropped_total = 1;
  for (std::size_t d : kept_dims) kept_total *= d;
  for (std::size_t f : dropped) dropped_total *= dims[f];
  const auto kept_strides = detail::strides_of(kept_dims);

  // full index = sum_f kept digit * stride + sum_f dropped digit * stride
  auto full_index = [&](std::size_t kept_idx, std::size_t dropped_idx) {
    std::size_t full = 0;
    for (std::size_t f = 0; f < keep.size(); ++f)
      full += ((kept_idx / kept_strides[f]) % kept_dims[f]) * strides[keep[f]];
    std::size_t rem = dropped_idx;
    for (std::size_t f = dropped.size(); f-- > 0;) {
      const std::size_t d = dims[dropped[f]];
      full += (rem % d) * strides[dropped[f]];
      rem /= d;
    }
    return full;
  };

  // Assembled from the upper triangle so the reduction is exactly Hermitian
  // even when the input carries its admissible residual.
  ComplexMatrix out(kept_total, kept_total);
  for (std::size_t a = 0; a < kept_total; ++a)
    for (std::size_t b = a; b < kept_total; ++b) {
      Complex s{0.0, 0.0};
      for (std::size_t d = 0; d < dropped_total; ++d)
        s += rho.mat()(full_index(a, d), full_index(b, d));
      if (a == b) {
        out(a, a) = Complex{s.real(), 0.0};
      } else {
        out(a, b) = s;
        out(b, a) = std::conj(s);
      }
    }
  return DensityMatrix(std::move(out), kept_dims);
}

// Conjugation by the permutation matrix P with (P x)_{perm(i)} = x_i, so the
// result places h(i, j) at (perm(i), perm(j)).  Spectra are invariant.
inline ComplexMatrix permutation_conjugate(const ComplexMatrix& h, const Permutation& perm) {
  if (!h.square()) throw std::invalid_argument("permutation_conjugate: matrix is not square");
  if (perm.size() != h.rows())
    throw std::invalid_argument("permutation_conjugate: permutation size mismatch");
  ComplexMatrix out(h.rows(), h.cols());
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j)
      out(perm.target(i), perm.target(j)) = h(i, j);
  return out;
}

} // namespace tomoq
