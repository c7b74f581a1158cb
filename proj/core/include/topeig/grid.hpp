#pragma once

// Periodized uniform lattice on [-L, L)^d and its dual frequency lattice.
//
// Nodes per axis: x_j = -L + j h, j = 0..N-1, h = 2L/N.
// Frequencies per axis (signed, centered storage): xi_m = (pi/L)(m - N/2).
// Flat index is row-major with axis 0 slowest.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace topeig {

using Complex = std::complex<double>;

inline constexpr std::size_t kDefaultNodeBudget = std::size_t{1} << 24;

struct Grid {
  int dimension = 1;
  int n_per_axis = 8;
  double half_length = 1.0;

  double spacing() const noexcept { return 2.0 * half_length / n_per_axis; }
  double frequency_spacing() const noexcept;
  double max_frequency() const noexcept;
  std::size_t size() const noexcept;

  double node(int j) const noexcept { return -half_length + j * spacing(); }
  double frequency(int m) const noexcept { return (m - n_per_axis / 2) * frequency_spacing(); }

  /// h^d and (dxi)^d quadrature weights.
  double position_weight() const noexcept;
  double frequency_weight() const noexcept;

  /// Per-axis indices of a flat index.
  void unflatten(std::size_t flat, std::span<int> index) const noexcept;
  void node_coordinates(std::size_t flat, std::span<double> x) const noexcept;
  void frequency_coordinates(std::size_t flat, std::span<double> xi) const noexcept;

  /// "d1-N1024-L20" style identifier.
  std::string id() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Throws InvalidArgument for odd N, N < 8, L <= 0, or more than `node_budget` nodes.
Grid build_grid(int dimension, int n_per_axis, double half_length,
                std::size_t node_budget = kDefaultNodeBudget);

enum class Domain { Position, Frequency };

/// Complex grid function on a position or frequency lattice.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(const Grid& grid, Domain domain = Domain::Position);
  StateVector(const Grid& grid, std::vector<Complex> values, Domain domain = Domain::Position);

  const Grid& grid() const noexcept { return grid_; }
  Domain domain() const noexcept { return domain_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<Complex> values() noexcept { return values_; }
  std::span<const Complex> values() const noexcept { return values_; }
  Complex& operator[](std::size_t i) noexcept { return values_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Quadrature weight of the lattice this vector lives on.
  double weight() const noexcept;

  StateVector& operator+=(const StateVector& other);
  StateVector& operator-=(const StateVector& other);
  StateVector& operator*=(Complex s) noexcept;

 private:
  Grid grid_;
  Domain domain_ = Domain::Position;
  std::vector<Complex> values_;
};

StateVector operator+(StateVector a, const StateVector& b);
StateVector operator-(StateVector a, const StateVector& b);
StateVector operator*(Complex s, StateVector a);

/// Weighted inner product, conjugate-linear in the second argument.
Complex inner(const StateVector& u, const StateVector& v);
double norm(const StateVector& u);

/// Unitary transform with the (2 pi)^{-d/2} continuum normalization.
StateVector to_frequency(const StateVector& u);
StateVector to_position(const StateVector& u_hat);

/// Samples f at every node (Position) or every lattice frequency (Frequency).
template <class F>
std::vector<double> sample(const Grid& grid, Domain domain, F&& f) {
  std::vector<double> out(grid.size());
  std::vector<double> x(static_cast<std::size_t>(grid.dimension));
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (domain == Domain::Position) grid.node_coordinates(i, x);
    else grid.frequency_coordinates(i, x);
    out[i] = f(std::span<const double>(x));
  }
  return out;
}

// Binary layout of a dumped state vector (all little-endian):
//   bytes 0..7    magic "TOPEIGSV"
//   uint64        d
//   uint64        N
//   float64       L
//   uint64        domain (0 position, 1 frequency)
//   N^d x {float64 re, float64 im}, row-major, axis 0 slowest
void write_state(std::ostream& os, const StateVector& u);
StateVector read_state(std::istream& is);
void write_state_file(const std::string& path, const StateVector& u);
StateVector read_state_file(const std::string& path);

}  // namespace topeig
