#include "topeig/grid.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fft.hpp"
#include "topeig/errors.hpp"

namespace topeig {

double Grid::frequency_spacing() const noexcept { return std::numbers::pi / half_length; }

double Grid::max_frequency() const noexcept {
  return frequency_spacing() * (n_per_axis / 2);
}

std::size_t Grid::size() const noexcept {
  std::size_t total = 1;
  for (int k = 0; k < dimension; ++k) total *= static_cast<std::size_t>(n_per_axis);
  return total;
}

double Grid::position_weight() const noexcept { return std::pow(spacing(), dimension); }
double Grid::frequency_weight() const noexcept { return std::pow(frequency_spacing(), dimension); }

void Grid::unflatten(std::size_t flat, std::span<int> index) const noexcept {
  const auto n = static_cast<std::size_t>(n_per_axis);
  for (int k = dimension - 1; k >= 0; --k) {
    index[static_cast<std::size_t>(k)] = static_cast<int>(flat % n);
    flat /= n;
  }
}

void Grid::node_coordinates(std::size_t flat, std::span<double> x) const noexcept {
  const auto n = static_cast<std::size_t>(n_per_axis);
  for (int k = dimension - 1; k >= 0; --k) {
    x[static_cast<std::size_t>(k)] = node(static_cast<int>(flat % n));
    flat /= n;
  }
}

void Grid::frequency_coordinates(std::size_t flat, std::span<double> xi) const noexcept {
  const auto n = static_cast<std::size_t>(n_per_axis);
  for (int k = dimension - 1; k >= 0; --k) {
    xi[static_cast<std::size_t>(k)] = frequency(static_cast<int>(flat % n));
    flat /= n;
  }
}

std::string Grid::id() const {
  std::ostringstream os;
  os << "d" << dimension << "-N" << n_per_axis << "-L" << half_length;
  return os.str();
}

Grid build_grid(int dimension, int n_per_axis, double half_length, std::size_t node_budget) {
  if (dimension < 1) throw InvalidArgument("build_grid: dimension must be positive");
  if (n_per_axis % 2 != 0) throw InvalidArgument("build_grid: N must be even (odd N)");
  if (n_per_axis < 8) throw InvalidArgument("build_grid: N must be at least 8");
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw InvalidArgument("build_grid: L must be positive");
  double total = 1.0;
  for (int k = 0; k < dimension; ++k) total *= n_per_axis;
  if (total > static_cast<double>(node_budget))
    throw InvalidArgument("build_grid: N^d exceeds the node budget");
  return Grid{dimension, n_per_axis, half_length};
}

StateVector::StateVector(const Grid& grid, Domain domain)
    : grid_(grid), domain_(domain), values_(grid.size()) {}

StateVector::StateVector(const Grid& grid, std::vector<Complex> values, Domain domain)
    : grid_(grid), domain_(domain), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InvalidArgument("StateVector: value count does not match the grid");
}

double StateVector::weight() const noexcept {
  return domain_ == Domain::Position ? grid_.position_weight() : grid_.frequency_weight();
}

namespace {

void require_same(const StateVector& a, const StateVector& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("state vectors live on different grids");
  if (a.domain() != b.domain())
    throw GridMismatch("state vectors live on different (position/frequency) lattices");
}

}  // namespace

StateVector& StateVector::operator+=(const StateVector& other) {
  require_same(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
  require_same(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

StateVector& StateVector::operator*=(Complex s) noexcept {
  for (auto& v : values_) v *= s;
  return *this;
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
StateVector operator*(Complex s, StateVector a) { return a *= s; }

Complex inner(const StateVector& u, const StateVector& v) {
  require_same(u, v);
  Complex acc = 0.0;
  const auto a = u.values();
  const auto b = v.values();
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
  return acc * u.weight();
}

double norm(const StateVector& u) {
  double acc = 0.0;
  for (const auto& c : u.values()) acc += std::norm(c);
  return std::sqrt(acc * u.weight());
}

namespace {

// (-1)^(sum of per-axis indices) for a flat index.
bool odd_parity(std::size_t flat, int dimension, std::size_t n) {
  std::size_t s = 0;
  for (int k = 0; k < dimension; ++k) {
    s += flat % n;
    flat /= n;
  }
  return (s & 1U) != 0;
}

// x_j = -L + j h and xi_m = (pi/L)(m - N/2) turn exp(-i xi x) into
// (-1)^(j + m - N/2) exp(-2 pi i m j / N); both sign patterns are applied here.
StateVector transform(const StateVector& in, int sign) {
  const Grid& g = in.grid();
  const auto n = static_cast<std::size_t>(g.n_per_axis);
  std::vector<Complex> data(in.values().begin(), in.values().end());
  for (std::size_t i = 0; i < data.size(); ++i)
    if (odd_parity(i, g.dimension, n)) data[i] = -data[i];
  detail::fft_inplace(data.data(), g.dimension, g.n_per_axis, sign);
  const double step = sign < 0 ? g.spacing() : g.frequency_spacing();
  const double scale = std::pow(step / std::sqrt(2.0 * std::numbers::pi), g.dimension);
  // (-1)^(d N/2) from the centered offset, folded into the scale.
  const bool shift_odd = ((static_cast<std::size_t>(g.dimension) * (n / 2)) & 1U) != 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const bool flip = odd_parity(i, g.dimension, n) != shift_odd;
    data[i] *= flip ? -scale : scale;
  }
  return StateVector(g, std::move(data), sign < 0 ? Domain::Frequency : Domain::Position);
}

}  // namespace

StateVector to_frequency(const StateVector& u) {
  if (u.domain() != Domain::Position)
    throw InvalidArgument("to_frequency: input is not a position-space vector");
  return transform(u, -1);
}

StateVector to_position(const StateVector& u_hat) {
  if (u_hat.domain() != Domain::Frequency)
    throw InvalidArgument("to_position: input is not a frequency-space vector");
  return transform(u_hat, +1);
}

namespace {

constexpr char kMagic[8] = {'T', 'O', 'P', 'E', 'I', 'G', 'S', 'V'};

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  os.write(reinterpret_cast<const char*>(&bits), 8);
}

template <class T>
T get_le(std::istream& is) {
  std::uint64_t bits = 0;
  is.read(reinterpret_cast<char*>(&bits), 8);
  if (!is) throw InvalidArgument("read_state: truncated input");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void write_state(std::ostream& os, const StateVector& u) {
  const Grid& g = u.grid();
  os.write(kMagic, 8);
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(g.dimension));
  put_le<std::uint64_t>(os, static_cast<std::uint64_t>(g.n_per_axis));
  put_le<double>(os, g.half_length);
  put_le<std::uint64_t>(os, u.domain() == Domain::Position ? 0U : 1U);
  for (const auto& c : u.values()) {
    put_le<double>(os, c.real());
    put_le<double>(os, c.imag());
  }
}

StateVector read_state(std::istream& is) {
  char magic[8] = {};
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw InvalidArgument("read_state: bad magic");
  const auto d = get_le<std::uint64_t>(is);
  const auto n = get_le<std::uint64_t>(is);
  const auto L = get_le<double>(is);
  const auto dom = get_le<std::uint64_t>(is);
  if (d < 1 || d > 16 || n > (1U << 30) || dom > 1) throw InvalidArgument("read_state: bad header");
  const Grid g = build_grid(static_cast<int>(d), static_cast<int>(n), L);
  std::vector<Complex> values(g.size());
  for (auto& c : values) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    c = {re, im};
  }
  return StateVector(g, std::move(values), dom == 0 ? Domain::Position : Domain::Frequency);
}

void write_state_file(const std::string& path, const StateVector& u) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp + " for writing");
    write_state(os, u);
    if (!os) throw Error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

StateVector read_state_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_state(is);
}

}  // namespace topeig
