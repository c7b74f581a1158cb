// Dense Hermitian eigensolver for materialized operators (LAPACK MRRR drivers).

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <lapacke.h>

#include "topeig/eigensolve.hpp"
#include "topeig/errors.hpp"

namespace topeig {

namespace {

StateVector unit_basis(const Grid& grid, std::size_t j) {
  StateVector e(grid);
  e[j] = 1.0;
  return e;
}

}  // namespace

std::vector<EigenPair> dense_eigenpairs(const LinearOperator& op, int k, bool largest) {
  const Grid& grid = op.grid();
  const std::size_t n = grid.size();
  if (n > kDenseNodeLimit)
    throw InvalidArgument("DenseFull refused: N^d = " + std::to_string(n) + " exceeds " +
                          std::to_string(kDenseNodeLimit));
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw InvalidArgument("dense_eigenpairs: k out of range");

  // Column j is A e_j in the unweighted coordinates, which carry the same matrix.
  std::vector<std::complex<double>> a(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    const StateVector col = op.apply(unit_basis(grid, j));
    std::copy(col.values().begin(), col.values().end(), a.begin() + static_cast<std::ptrdiff_t>(j * n));
  }
  double max_abs = 0.0;
  double max_imag = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i <= j; ++i) {
      auto& aij = a[j * n + i];
      auto& aji = a[i * n + j];
      const std::complex<double> h = 0.5 * (aij + std::conj(aji));
      aij = h;
      aji = std::conj(h);
      max_abs = std::max(max_abs, std::abs(h));
      max_imag = std::max(max_imag, std::abs(h.imag()));
    }

  const auto ni = static_cast<lapack_int>(n);
  const lapack_int il = largest ? ni - k + 1 : 1;
  const lapack_int iu = largest ? ni : k;
  lapack_int found = 0;
  std::vector<double> w(n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
  std::vector<std::complex<double>> z(n * static_cast<std::size_t>(k));
  lapack_int info = 0;

  // Even symbols give real symmetric matrices; the imaginary part is then FFT rounding only.
  if (max_imag <= 1e-14 * std::max(max_abs, 1e-300)) {
    std::vector<double> ar(n * n);
    for (std::size_t i = 0; i < ar.size(); ++i) ar[i] = a[i].real();
    std::vector<double> zr(n * static_cast<std::size_t>(k));
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', ni, ar.data(), ni, 0.0, 0.0, il, iu, 0.0,
                          &found, w.data(), zr.data(), ni, support.data());
    for (std::size_t i = 0; i < zr.size(); ++i) z[i] = zr[i];
  } else {
    info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', ni,
                          reinterpret_cast<lapack_complex_double*>(a.data()), ni, 0.0, 0.0, il, iu,
                          0.0, &found, w.data(), reinterpret_cast<lapack_complex_double*>(z.data()),
                          ni, support.data());
  }
  if (info != 0 || found != k)
    throw Error("dense Hermitian eigensolver failed (info = " + std::to_string(info) + ")");

  std::vector<EigenPair> pairs;
  pairs.reserve(static_cast<std::size_t>(k));
  const double scale = 1.0 / std::sqrt(grid.position_weight());
  for (int c = 0; c < k; ++c) {
    const int col = largest ? k - 1 - c : c;
    std::vector<std::complex<double>> v(z.begin() + static_cast<std::ptrdiff_t>(col) * ni,
                                        z.begin() + static_cast<std::ptrdiff_t>(col + 1) * ni);
    for (auto& x : v) x *= scale;
    EigenPair p;
    p.vector = StateVector(grid, std::move(v));
    StateVector r = op.apply(p.vector);
    // Matrix-free Rayleigh quotient: second-order accurate in the vector error,
    // removing the O(eps ||A||) rounding of the dense eigenvalue.
    p.value = inner(r, p.vector).real() / inner(p.vector, p.vector).real();
    if (!std::isfinite(p.value)) p.value = w[static_cast<std::size_t>(col)];
    r -= Complex(p.value) * p.vector;
    p.residual = norm(r);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace topeig
