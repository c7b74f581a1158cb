#include "topeig/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "topeig/errors.hpp"

namespace topeig {

std::string_view to_string(SolveMode mode) noexcept {
  switch (mode) {
    case SolveMode::LanczosTop: return "lanczos";
    case SolveMode::DenseFull: return "dense";
    case SolveMode::ShiftInvertBottom: return "shift-invert";
  }
  return "?";
}

SolveMode solve_mode_from_string(std::string_view s) {
  if (s == "lanczos") return SolveMode::LanczosTop;
  if (s == "dense") return SolveMode::DenseFull;
  if (s == "shift-invert") return SolveMode::ShiftInvertBottom;
  throw InvalidArgument("unknown solver mode '" + std::string(s) + "'");
}

namespace {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using ApplyVec = std::function<void(const Vec&, Vec&)>;

struct KrylovResult {
  std::vector<double> values;
  Mat vectors;  // Euclidean unit columns
  std::vector<double> residuals;
  int restarts = 0;
};

Vec random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v(i) = {re, im};
  }
  return v;
}

// Classical Gram-Schmidt applied twice against the first `cols` columns of q.
Vec orthogonalize(const Mat& q, Eigen::Index cols, Vec& w) {
  Vec h = Vec::Zero(cols);
  if (cols == 0) return h;
  for (int pass = 0; pass < 2; ++pass) {
    const Vec c = q.leftCols(cols).adjoint() * w;
    w.noalias() -= q.leftCols(cols) * c;
    h += c;
  }
  return h;
}

// Krylov-Schur restarted Lanczos with full reorthogonalization for the k
// algebraically largest eigenpairs of a Hermitian map on C^n.
// Removes the span of the orthonormal columns of `locked` (twice, as above).
void project_out(const Mat* locked, Vec& w) {
  if (!locked || locked->cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) w.noalias() -= *locked * (locked->adjoint() * w);
}

// When `locked` is given the iteration runs on the compression of the map to
// the orthogonal complement of its columns.
KrylovResult krylov_schur_top(const ApplyVec& apply, Eigen::Index n, int k, double abs_tol,
                              double scale, const SolveSettings& s, std::uint64_t seed,
                              const Mat* locked = nullptr) {
  const Eigen::Index avail = n - (locked ? locked->cols() : 0);
  Eigen::Index m = s.krylov_dim > 0 ? s.krylov_dim : std::max<Eigen::Index>(2 * k + 20, 40);
  m = std::min(m, avail);
  if (m <= k && m < avail) m = std::min<Eigen::Index>(avail, k + 1);

  std::mt19937_64 rng(seed);
  Mat q = Mat::Zero(n, m + 1);
  Mat h = Mat::Zero(m, m);
  {
    Vec v0 = random_vector(rng, n);
    project_out(locked, v0);
    q.col(0) = v0 / v0.norm();
  }
  Eigen::Index kept = 0;
  const double breakdown = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  std::vector<double> best(static_cast<std::size_t>(k), std::numeric_limits<double>::infinity());
  Vec w(n);

  for (int restart = 0; restart <= s.max_iterations; ++restart) {
    double last_beta = 0.0;
    for (Eigen::Index j = kept; j < m; ++j) {
      apply(q.col(j), w);
      project_out(locked, w);
      const Vec coeff = orthogonalize(q, j + 1, w);
      for (Eigen::Index i = 0; i < j; ++i) {
        h(i, j) = coeff(i);
        h(j, i) = std::conj(coeff(i));
      }
      h(j, j) = coeff(j).real();
      double beta = w.norm();
      if (beta <= breakdown) {
        // Invariant subspace: continue with a fresh direction and zero coupling.
        beta = 0.0;
        if (j + 1 < n) {
          for (int attempt = 0; attempt < 3; ++attempt) {
            w = random_vector(rng, n);
            project_out(locked, w);
            orthogonalize(q, j + 1, w);
            if (w.norm() > 1e-8) break;
          }
          w /= w.norm();
        } else {
          w.setZero();
        }
      } else {
        w /= beta;
      }
      q.col(j + 1) = w;
      if (j + 1 < m) {
        h(j + 1, j) = beta;
        h(j, j + 1) = beta;
      } else {
        last_beta = beta;
      }
    }

    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const Eigen::VectorXd& theta = es.eigenvalues();  // ascending
    const Mat& sv = es.eigenvectors();
    auto top = [&](Eigen::Index i) { return m - 1 - i; };

    bool converged = true;
    for (int i = 0; i < k; ++i) {
      const double est = std::abs(last_beta * sv(m - 1, top(i)));
      best[static_cast<std::size_t>(i)] = std::min(best[static_cast<std::size_t>(i)], est);
      converged = converged && est <= abs_tol;
    }

    if (converged) {
      KrylovResult out;
      out.vectors.resize(n, k);
      out.restarts = restart;
      bool ok = true;
      for (int i = 0; i < k; ++i) {
        Vec y = q.leftCols(m) * sv.col(top(i));
        y /= y.norm();
        apply(y, w);
        project_out(locked, w);
        const double lambda = theta(top(i));
        const double res = (w - lambda * y).norm();
        out.values.push_back(lambda);
        out.residuals.push_back(res);
        out.vectors.col(i) = y;
        ok = ok && res <= abs_tol;
      }
      if (ok) return out;
    }
    if (restart == s.max_iterations) break;

    // Keep the leading Ritz vectors (Krylov-Schur truncation).
    const Eigen::Index p =
        std::clamp<Eigen::Index>((m + k) / 2, std::min<Eigen::Index>(k, m - 1), m - 1);
    Mat sp(m, p);
    for (Eigen::Index i = 0; i < p; ++i) sp.col(i) = sv.col(top(i));
    const Mat y = q.leftCols(m) * sp;
    const Vec next = q.col(m);
    q.setZero();
    q.leftCols(p) = y;
    q.col(p) = next;
    h.setZero();
    for (Eigen::Index i = 0; i < p; ++i) {
      h(i, i) = theta(top(i));
      const Complex b = last_beta * sp(m - 1, i);
      h(p, i) = b;
      h(i, p) = std::conj(b);
    }
    kept = p;
  }
  throw NoConvergence("Lanczos did not converge within " + std::to_string(s.max_iterations) +
                          " restarts",
                      s.max_iterations, best);
}

// A single-vector Krylov space holds one direction per exactly degenerate
// eigenvalue, so a converged set can silently miss copies. Probe the
// complement of the converged vectors from fresh starts and fold any
// eigenvalue above the k-th back in by Rayleigh-Ritz.
KrylovResult krylov_schur_complete(const ApplyVec& apply, Eigen::Index n, int k, double abs_tol,
                                   double scale, const SolveSettings& s) {
  KrylovResult res = krylov_schur_top(apply, n, k, abs_tol, scale, s, s.rng_seed);
  for (int probe = 1; probe <= k && res.vectors.cols() < n; ++probe) {
    KrylovResult extra;
    try {
      const std::uint64_t seed = s.rng_seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(probe);
      extra = krylov_schur_top(apply, n, 1, abs_tol, scale, s, seed, &res.vectors);
    } catch (const NoConvergence&) {
      break;
    }
    if (!(extra.values[0] > res.values.back() + abs_tol)) break;

    const Eigen::Index c = res.vectors.cols() + 1;
    Mat basis(n, c);
    basis << res.vectors, extra.vectors.col(0);
    Eigen::HouseholderQR<Mat> qr(basis);
    basis = qr.householderQ() * Mat::Identity(n, c);
    Mat image(n, c);
    Vec w(n);
    for (Eigen::Index j = 0; j < c; ++j) {
      apply(basis.col(j), w);
      image.col(j) = w;
    }
    Mat proj = basis.adjoint() * image;
    proj = 0.5 * (proj + proj.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(proj);
    KrylovResult next;
    next.restarts = res.restarts;
    next.vectors.resize(n, k);
    for (int i = 0; i < k; ++i) {
      const Eigen::Index col = c - 1 - i;
      Vec y = basis * es.eigenvectors().col(col);
      y /= y.norm();
      const double lambda = es.eigenvalues()(col);
      apply(y, w);
      next.values.push_back(lambda);
      next.residuals.push_back((w - lambda * y).norm());
      next.vectors.col(i) = y;
    }
    res = std::move(next);
  }
  return res;
}

ApplyVec wrap(const LinearOperator& op) {
  return [&op](const Vec& x, Vec& y) {
    const Grid& g = op.grid();
    StateVector u(g, std::vector<Complex>(x.data(), x.data() + x.size()));
    const StateVector r = op.apply(u);
    y = Eigen::Map<const Vec>(r.values().data(), static_cast<Eigen::Index>(r.size()));
  };
}

StateVector to_state(const Grid& g, const Vec& y) {
  std::vector<Complex> v(y.data(), y.data() + y.size());
  const double scale = 1.0 / std::sqrt(g.position_weight());
  for (auto& c : v) c *= scale;
  return StateVector(g, std::move(v));
}

double residual_of(const LinearOperator& op, const EigenPair& p) {
  StateVector r = op.apply(p.vector);
  r -= Complex(p.value) * p.vector;
  return norm(r);
}

void check_k(int k, std::size_t n, double fraction) {
  if (k < 1) throw InvalidArgument("eigensolver: k must be at least 1");
  if (static_cast<double>(k) > fraction * static_cast<double>(n))
    throw InvalidArgument("eigensolver: k too large for the grid");
}

}  // namespace

StateVector solve_shifted(const LinearOperator& op, double shift, const StateVector& b,
                          double rel_tol, int max_iterations) {
  StateVector x(b.grid());
  StateVector r = b;
  StateVector p = r;
  const double bnorm = norm(b);
  if (bnorm == 0.0) return x;
  double rr = inner(r, r).real();
  for (int it = 0; it < max_iterations; ++it) {
    StateVector ap = op.apply(p);
    ap += Complex(shift) * p;
    const double pap = inner(ap, p).real();
    if (!(pap > 0.0)) throw InvalidArgument("solve_shifted: operator + shift is not positive");
    const double step = rr / pap;
    x += Complex(step) * p;
    r -= Complex(step) * ap;
    const double rr_new = inner(r, r).real();
    if (std::sqrt(rr_new) <= rel_tol * bnorm) return x;
    const double beta = rr_new / rr;
    rr = rr_new;
    p *= beta;
    p += r;
  }
  throw InnerSolveStall("conjugate gradient hit its iteration cap", max_iterations,
                        std::sqrt(rr) / bnorm);
}

std::vector<EigenPair> top_eigenpairs(const LinearOperator& op, const SolveSettings& s) {
  if (!(s.tol > 0.0)) throw InvalidArgument("eigensolver: tol must be positive");
  const std::size_t n = op.grid().size();
  if (s.mode == SolveMode::DenseFull) {
    check_k(s.k, n, 1.0);
    return dense_eigenpairs(op, s.k, true);
  }
  if (s.mode != SolveMode::LanczosTop)
    throw InvalidArgument("top_eigenpairs: mode must be lanczos or dense");
  check_k(s.k, n, 0.5);
  const double scale = op.residual_scale();
  const KrylovResult kr =
      krylov_schur_complete(wrap(op), static_cast<Eigen::Index>(n), s.k, s.tol * scale, scale, s);
  std::vector<EigenPair> pairs;
  for (int i = 0; i < s.k; ++i) {
    EigenPair p;
    p.value = kr.values[static_cast<std::size_t>(i)];
    p.vector = to_state(op.grid(), kr.vectors.col(i));
    p.residual = residual_of(op, p);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<EigenPair> bottom_eigenpairs_T(const LinearOperator& op, const SolveSettings& s) {
  if (!(s.tol > 0.0)) throw InvalidArgument("eigensolver: tol must be positive");
  const std::size_t n = op.grid().size();
  if (s.mode == SolveMode::DenseFull) {
    check_k(s.k, n, 1.0);
    return dense_eigenpairs(op, s.k, false);
  }
  if (s.mode != SolveMode::ShiftInvertBottom)
    throw InvalidArgument("bottom_eigenpairs_T: mode must be dense or shift-invert");
  check_k(s.k, n, 0.5);
  if (!(s.shift > 0.0)) throw InvalidArgument("shift-invert: shift must be positive");

  const Grid& g = op.grid();
  ApplyVec inverse = [&](const Vec& x, Vec& y) {
    StateVector u(g, std::vector<Complex>(x.data(), x.data() + x.size()));
    const StateVector r = solve_shifted(op, s.shift, u, s.inner_tol, s.inner_max_iterations);
    y = Eigen::Map<const Vec>(r.values().data(), static_cast<Eigen::Index>(r.size()));
  };

  // (T + c)^{-1} y - theta y = r  gives  ||T y - mu y|| <= ||T + c|| ||r|| / theta.
  const double scale = op.residual_scale();
  const double target = s.tol * scale;
  const double inv_scale = 1.0 / s.shift;
  double inv_tol = s.tol / (1.0 + s.shift / scale);
  for (int attempt = 0; attempt < 4; ++attempt, inv_tol *= 0.01) {
    const KrylovResult kr = krylov_schur_complete(inverse, static_cast<Eigen::Index>(n), s.k,
                                                  inv_tol * inv_scale, inv_scale, s);
    std::vector<EigenPair> pairs;
    bool ok = true;
    for (int i = 0; i < s.k; ++i) {
      EigenPair p;
      p.vector = to_state(g, kr.vectors.col(i));
      // Rayleigh quotient against T itself.
      p.value = inner(op.apply(p.vector), p.vector).real() / inner(p.vector, p.vector).real();
      p.residual = residual_of(op, p);
      ok = ok && p.residual <= target;
      pairs.push_back(std::move(p));
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
    if (ok) return pairs;
  }
  throw NoConvergence("shift-invert residuals against T did not meet the tolerance", s.max_iterations,
                      {});
}

CertReport certify(const LinearOperator& op, std::span<const EigenPair> pairs, double tol) {
  CertReport rep;
  const double limit = tol * op.residual_scale();
  const double ortho_tol = 1e-8;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    const double nrm = norm(p.vector);
    rep.norm_errors.push_back(std::abs(nrm - 1.0));
    if (std::abs(nrm - 1.0) > ortho_tol)
      rep.failures.push_back("pair " + std::to_string(i) + ": not unit norm (" + std::to_string(nrm) + ")");
    const double res = residual_of(op, p);
    rep.residuals.push_back(res);
    if (!(res <= limit))
      rep.failures.push_back("pair " + std::to_string(i) + ": residual " + std::to_string(res) +
                             " above " + std::to_string(limit));
    for (std::size_t j = 0; j < i; ++j) {
      const double dev = std::abs(inner(p.vector, pairs[j].vector));
      rep.max_gram_deviation = std::max(rep.max_gram_deviation, dev);
      if (dev > ortho_tol)
        rep.failures.push_back("pairs " + std::to_string(j) + "," + std::to_string(i) +
                               ": not orthogonal (" + std::to_string(dev) + ")");
    }
  }
  rep.passed = rep.failures.empty();
  return rep;
}

std::vector<std::vector<std::size_t>> eigenvalue_clusters(std::span<const EigenPair> pairs,
                                                         double gap) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!clusters.empty() && std::abs(pairs[i].value - pairs[clusters.back().back()].value) <= gap)
      clusters.back().push_back(i);
    else
      clusters.push_back({i});
  }
  return clusters;
}

}  // namespace topeig
