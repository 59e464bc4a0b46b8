#pragma once

// Least-distance projection onto polyhedra.
//
// least_distance() solves  min ||y - x0||^2  s.t.  G y <= h,  A y = b
// with a dual active-set method in the style of Goldfarb and Idnani. Because
// the Hessian is the identity the method works directly in the original
// coordinates: the unconstrained minimizer is x0 itself and each active-set
// change only needs a QR factorization of the active normals.
//
// Equality rows are eliminated first by restricting to the affine subspace
// {y_p + N w}, N an orthonormal null-space basis of A. The reduced problem is
// again a least-distance problem in w.
//
// oracle_project() is a brute-force reference used by the tests.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "vifd/errors.hpp"
#include "vifd/linear_system.hpp"

namespace vifd::qp {

struct QpOptions {
  double tol = 1e-10;
  /// 0 selects the default guard of 50 * (m + p) pivots (at least 100).
  int max_pivots = 0;
};

struct QpSolution {
  Point point;
  /// Inequality rows of G active at the solution, in activation order.
  std::vector<int> active_set;
  int iterations = 0;
  /// max(stationarity, primal infeasibility, dual infeasibility,
  /// complementarity), scaled by 1 + max(|x0|_inf, |y|_inf).
  double kkt_residual = 0.0;
  /// Multipliers for the rows of G (zero for inactive rows).
  Vector multipliers;
};

namespace detail {

inline constexpr double kZeroRow = 1e-14;
inline constexpr double kZeroStep = 1e-12;

/// Dual active-set solver for min 1/2 |w - w0|^2 s.t. C w <= e, rows of C
/// unit norm. Returns w and fills the active rows and their multipliers.
struct ReducedResult {
  Vector w;
  std::vector<int> active;
  std::vector<double> mult;
  int pivots = 0;
};

class ActiveSetFactor {
public:
  explicit ActiveSetFactor(Eigen::Index dim) : dim_(dim) { reset({}); }

  void reset(const Matrix& normals) {
    q_ = normals.cols();
    if (q_ == 0) {
      Q_ = Matrix::Identity(dim_, dim_);
      R_.resize(0, 0);
      return;
    }
    Eigen::HouseholderQR<Matrix> qr(normals);
    Q_ = qr.householderQ() * Matrix::Identity(dim_, dim_);
    R_ = qr.matrixQR().topLeftCorner(q_, q_).triangularView<Eigen::Upper>();
  }

  /// Primal step direction (component of n outside the active span).
  Vector primal_direction(const Vector& n) const {
    if (q_ == dim_) return Vector::Zero(dim_);
    const Vector d = Q_.rightCols(dim_ - q_).transpose() * n;
    return Q_.rightCols(dim_ - q_) * d;
  }

  /// Change in active multipliers per unit increase of the new multiplier.
  Vector dual_direction(const Vector& n) const {
    if (q_ == 0) return Vector(0);
    const Vector d = Q_.leftCols(q_).transpose() * n;
    return R_.triangularView<Eigen::Upper>().solve(d);
  }

private:
  Eigen::Index dim_;
  Eigen::Index q_ = 0;
  Matrix Q_;
  Matrix R_;
};

inline ReducedResult solve_reduced(const Matrix& C, const Vector& e, const Vector& w0,
                                   double tol, int max_pivots,
                                   std::span<const int> warm_start) {
  const Eigen::Index dim = w0.size();
  const Eigen::Index m = C.rows();
  ReducedResult out;
  out.w = w0;

  std::vector<char> is_active(static_cast<size_t>(m), 0);
  std::vector<int>& active = out.active;
  std::vector<double>& u = out.mult;
  ActiveSetFactor factor(dim);

  auto active_normals = [&]() {
    // Constraints in >= form have normal -C_i.
    Matrix N(dim, static_cast<Eigen::Index>(active.size()));
    for (size_t j = 0; j < active.size(); ++j) N.col(static_cast<Eigen::Index>(j)) = -C.row(active[j]).transpose();
    return N;
  };

  auto slack = [&](Eigen::Index i) { return e(i) - C.row(i).dot(out.w); };

  if (dim == 0) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (e(i) < -tol) throw InfeasibleSystem("constraint system is infeasible");
    }
    return out;
  }

  while (true) {
    // Pick a violated constraint: warm-start rows first, then the worst one.
    Eigen::Index p = -1;
    for (int idx : warm_start) {
      if (idx >= 0 && idx < m && !is_active[static_cast<size_t>(idx)] && slack(idx) < -tol) {
        p = idx;
        break;
      }
    }
    if (p < 0) {
      double worst = -tol;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (is_active[static_cast<size_t>(i)]) continue;
        const double s = slack(i);
        if (s < worst) {
          worst = s;
          p = i;
        }
      }
    }
    if (p < 0) return out;

    const Vector np = -C.row(p).transpose();
    double up = 0.0;
    while (true) {
      if (++out.pivots > max_pivots) {
        throw MaxPivots("active-set pivot limit exceeded");
      }
      const Vector z = factor.primal_direction(np);
      const Vector r = factor.dual_direction(np);

      double t1 = std::numeric_limits<double>::infinity();
      Eigen::Index drop = -1;
      for (Eigen::Index j = 0; j < r.size(); ++j) {
        if (r(j) > kZeroStep) {
          const double ratio = u[static_cast<size_t>(j)] / r(j);
          if (ratio < t1) {
            t1 = ratio;
            drop = j;
          }
        }
      }
      double t2 = std::numeric_limits<double>::infinity();
      const double zz = z.dot(np);
      if (z.norm() > kZeroStep && zz > 0.0) {
        t2 = -slack(p) / zz;
      }

      if (!std::isfinite(t1) && !std::isfinite(t2)) {
        throw InfeasibleSystem("constraint system is infeasible");
      }

      auto remove_active = [&](Eigen::Index j) {
        is_active[static_cast<size_t>(active[static_cast<size_t>(j)])] = 0;
        active.erase(active.begin() + j);
        u.erase(u.begin() + j);
        factor.reset(active_normals());
      };

      if (!std::isfinite(t2)) {
        // Pure dual step: np is dependent on the active normals.
        for (Eigen::Index j = 0; j < r.size(); ++j) u[static_cast<size_t>(j)] -= t1 * r(j);
        up += t1;
        u[static_cast<size_t>(drop)] = 0.0;
        remove_active(drop);
        continue;
      }

      const double t = std::min(t1, t2);
      out.w += t * z;
      for (Eigen::Index j = 0; j < r.size(); ++j) u[static_cast<size_t>(j)] -= t * r(j);
      up += t;

      if (t2 <= t1) {
        active.push_back(static_cast<int>(p));
        u.push_back(up);
        is_active[static_cast<size_t>(p)] = 1;
        factor.reset(active_normals());
        break;
      }
      u[static_cast<size_t>(drop)] = 0.0;
      remove_active(drop);
    }
  }
}

/// Orthonormal null-space basis of A and the minimum-norm solution of A y = b.
struct AffineReduction {
  Matrix basis;  // n x (n - rank)
  Vector offset;
};

inline AffineReduction reduce_equalities(const Matrix& A, const Vector& b, double tol) {
  const Eigen::Index n = A.cols();
  AffineReduction red;
  if (A.rows() == 0) {
    red.basis = Matrix::Identity(n, n);
    red.offset = Vector::Zero(n);
    return red;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
  cod.setThreshold(1e-12);
  red.offset = cod.solve(b);
  const double scale = 1.0 + b.cwiseAbs().maxCoeff();
  if ((A * red.offset - b).cwiseAbs().maxCoeff() > tol * scale * 100.0) {
    throw InfeasibleSystem("equality constraints are inconsistent");
  }
  // Null space of A from a full QR of A^T.
  Eigen::ColPivHouseholderQR<Matrix> qr(A.transpose());
  qr.setThreshold(1e-12);
  const Eigen::Index rank = qr.rank();
  const Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
  red.basis = Q.rightCols(n - rank);
  return red;
}

}  // namespace detail

/// Euclidean projection of x0 onto {G y <= h, A y = b}.
///
/// warm_start lists rows of G to try first when choosing constraints to add.
/// Any order is valid for the dual method, so a stale hint only costs pivots.
inline QpSolution least_distance(const LinearConstraintSystem& S, const Point& x0,
                                 const QpOptions& opts = {},
                                 std::span<const int> warm_start = {}) {
  S.validate();
  if (x0.size() != S.dimension()) {
    throw DimensionError("x0 dimension does not match constraint system");
  }
  require_finite(x0, "x0");
  if (!(opts.tol > 0.0)) throw InvalidArgument("tol must be positive");

  const Eigen::Index m = S.G.rows();
  const Eigen::Index p = S.A.rows();
  const int max_pivots =
      opts.max_pivots > 0 ? opts.max_pivots : std::max<int>(100, static_cast<int>(50 * (m + p)));

  const detail::AffineReduction red = detail::reduce_equalities(S.A, S.b, opts.tol);
  const Eigen::Index dim = red.basis.cols();

  // Reduced inequality rows, unit-normalized. Rows that vanish after the
  // reduction are either redundant or prove infeasibility.
  Matrix C_full = S.G * red.basis;
  Vector e_full = S.h - S.G * red.offset;
  std::vector<Eigen::Index> kept;
  std::vector<double> row_scale;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double nrm = C_full.row(i).norm();
    const double orig = S.G.row(i).norm();
    if (nrm <= detail::kZeroRow * std::max(1.0, orig)) {
      if (e_full(i) < -opts.tol * std::max(1.0, orig)) {
        throw InfeasibleSystem("constraint system is infeasible");
      }
      continue;
    }
    kept.push_back(i);
    row_scale.push_back(nrm);
  }
  Matrix C(static_cast<Eigen::Index>(kept.size()), dim);
  Vector e(static_cast<Eigen::Index>(kept.size()));
  std::vector<int> to_reduced(static_cast<size_t>(m), -1);
  for (size_t k = 0; k < kept.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    C.row(r) = C_full.row(kept[k]) / row_scale[k];
    e(r) = e_full(kept[k]) / row_scale[k];
    to_reduced[static_cast<size_t>(kept[k])] = static_cast<int>(k);
  }
  std::vector<int> hint;
  for (int idx : warm_start) {
    if (idx >= 0 && idx < m && to_reduced[static_cast<size_t>(idx)] >= 0) {
      hint.push_back(to_reduced[static_cast<size_t>(idx)]);
    }
  }

  const Vector w0 = red.basis.transpose() * (x0 - red.offset);
  const double scale = 1.0 + std::max(x0.cwiseAbs().maxCoeff(), e.size() ? e.cwiseAbs().maxCoeff() : 0.0);
  const detail::ReducedResult rr =
      detail::solve_reduced(C, e, w0, opts.tol * scale, max_pivots, hint);

  QpSolution sol;
  sol.point = red.offset + red.basis * rr.w;
  sol.iterations = rr.pivots;
  sol.multipliers = Vector::Zero(m);
  for (size_t j = 0; j < rr.active.size(); ++j) {
    const Eigen::Index orig = kept[static_cast<size_t>(rr.active[j])];
    sol.active_set.push_back(static_cast<int>(orig));
    sol.multipliers(orig) = rr.mult[j] / row_scale[static_cast<size_t>(rr.active[j])];
  }

  // KKT certificate in the original coordinates.
  const Vector& y = sol.point;
  Vector grad = y - x0;
  if (m > 0) grad += S.G.transpose() * sol.multipliers;
  if (p > 0) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(S.A.transpose());
    const Vector mu = cod.solve(-grad);
    grad += S.A.transpose() * mu;
  }
  double residual = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double nrm = std::max(S.G.row(i).norm(), 1e-300);
    const double viol = (S.G.row(i).dot(y) - S.h(i)) / nrm;
    residual = std::max(residual, viol);
    residual = std::max(residual, -sol.multipliers(i) * nrm);
    residual = std::max(residual, std::abs(sol.multipliers(i) * nrm * viol));
  }
  if (p > 0) residual = std::max(residual, (S.A * y - S.b).cwiseAbs().maxCoeff());
  sol.kkt_residual =
      residual / (1.0 + std::max(x0.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff()));
  return sol;
}

inline QpSolution least_distance(const LinearConstraintSystem& S, const Point& x0, double tol,
                                 std::span<const int> warm_start = {}) {
  QpOptions opts;
  opts.tol = tol;
  return least_distance(S, x0, opts, warm_start);
}

// ---------------------------------------------------------------------------
// Brute-force oracle

namespace detail {

/// Exact sort-and-threshold projection onto {x >= 0, sum x = total}.
inline Vector project_simplex(const Vector& x0, double total) {
  std::vector<double> sorted(x0.data(), x0.data() + x0.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (size_t j = 0; j < sorted.size(); ++j) {
    cumsum += sorted[j];
    const double candidate = (cumsum - total) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) tau = candidate;
  }
  return (x0.array() - tau).max(0.0).matrix();
}

/// Returns the simplex total when S is exactly {x >= 0, c * sum x = b}.
inline std::optional<double> simplex_total(const LinearConstraintSystem& S) {
  const Eigen::Index n = S.dimension();
  if (S.G.rows() != n || S.A.rows() != 1 || n == 0) return std::nullopt;
  if (!(S.G + Matrix::Identity(n, n)).isZero(1e-14) || !S.h.isZero(1e-14)) return std::nullopt;
  const double c = S.A(0, 0);
  if (!(c > 0.0) || (S.A.row(0).array() - c).abs().maxCoeff() > 1e-14 * c) return std::nullopt;
  const double total = S.b(0) / c;
  if (!(total > 0.0)) return std::nullopt;
  return total;
}

/// For a fixed prefix of coordinates, the exact best value of the last one,
/// or nullopt when no feasible completion exists.
inline std::optional<double> best_last_coordinate(const LinearConstraintSystem& S,
                                                  const Vector& prefix, double target) {
  const Eigen::Index k = prefix.size();
  const Eigen::Index last = k;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < S.G.rows(); ++i) {
    const double coef = S.G(i, last);
    const double rest = S.h(i) - (k ? S.G.row(i).head(k).dot(prefix) : 0.0);
    const double slack_tol = 1e-12 * (1.0 + std::abs(rest));
    if (std::abs(coef) <= 1e-14) {
      if (rest < -slack_tol) return std::nullopt;
    } else if (coef > 0.0) {
      hi = std::min(hi, rest / coef);
    } else {
      lo = std::max(lo, rest / coef);
    }
  }
  for (Eigen::Index i = 0; i < S.A.rows(); ++i) {
    const double coef = S.A(i, last);
    const double rest = S.b(i) - (k ? S.A.row(i).head(k).dot(prefix) : 0.0);
    if (std::abs(coef) <= 1e-14) {
      if (std::abs(rest) > 1e-12 * (1.0 + std::abs(S.b(i)))) return std::nullopt;
    } else {
      const double v = rest / coef;
      lo = std::max(lo, v - 1e-12 * (1.0 + std::abs(v)));
      hi = std::min(hi, v + 1e-12 * (1.0 + std::abs(v)));
    }
  }
  if (lo > hi + 1e-12 * (1.0 + std::abs(lo))) return std::nullopt;
  if (lo > hi) return 0.5 * (lo + hi);
  return std::clamp(target, lo, hi);
}

struct GridBest {
  Vector point;
  double dist2 = std::numeric_limits<double>::infinity();
};

/// Scans a regular grid of `points` per axis over [lo, hi] in the prefix
/// coordinates, completing each grid point exactly in the last coordinate.
inline GridBest scan_grid(const LinearConstraintSystem& S, const Vector& x0, const Vector& lo,
                          const Vector& hi, int points) {
  const Eigen::Index k = lo.size();
  GridBest best;
  Vector prefix(k);
  std::vector<int> idx(static_cast<size_t>(k), 0);
  while (true) {
    for (Eigen::Index j = 0; j < k; ++j) {
      prefix(j) = lo(j) + (hi(j) - lo(j)) * idx[static_cast<size_t>(j)] / (points - 1);
    }
    if (auto lastc = best_last_coordinate(S, prefix, x0(k))) {
      Vector y(k + 1);
      y.head(k) = prefix;
      y(k) = *lastc;
      const double d2 = (y - x0).squaredNorm();
      if (d2 < best.dist2) {
        best.dist2 = d2;
        best.point = y;
      }
    }
    Eigen::Index j = 0;
    while (j < k && ++idx[static_cast<size_t>(j)] == points) {
      idx[static_cast<size_t>(j)] = 0;
      ++j;
    }
    if (j == k) break;
  }
  return best;
}

/// Exhaustive search over active sets: the projection onto each affine
/// subspace {G_I y = h_I, A y = b} with |I| <= n, keeping the nearest point
/// that satisfies every constraint.
inline Point enumerate_active_sets(const LinearConstraintSystem& S, const Point& x0) {
  const Eigen::Index n = S.dimension();
  const Eigen::Index m = S.G.rows();
  const Eigen::Index p = S.A.rows();
  if (m > 60) throw UnsupportedShape("active-set enumeration supports at most 60 rows");
  Point best;
  double best_d2 = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> rows;
  auto try_subset = [&]() {
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size()) + p;
    Point y = x0;
    if (r > 0) {
      Matrix M(r, n);
      Vector rhs(r);
      for (size_t i = 0; i < rows.size(); ++i) {
        M.row(static_cast<Eigen::Index>(i)) = S.G.row(rows[i]);
        rhs(static_cast<Eigen::Index>(i)) = S.h(rows[i]);
      }
      M.bottomRows(p) = S.A;
      rhs.tail(p) = S.b;
      // y = x0 + M^+ (rhs - M x0): the nearest point of the affine subspace
      const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
      y = x0 + cod.solve(rhs - M * x0);
      if ((M * y - rhs).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff())) return;
    }
    if (S.max_violation(y) > 1e-9 * (1.0 + y.cwiseAbs().maxCoeff())) return;
    const double d2 = (y - x0).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = y;
    }
  };
  try_subset();
  for (Eigen::Index a = 0; a < m; ++a) {
    rows = {a};
    try_subset();
    if (n < 2) continue;
    for (Eigen::Index b = a + 1; b < m; ++b) {
      rows = {a, b};
      try_subset();
      if (n < 3) continue;
      for (Eigen::Index c = b + 1; c < m; ++c) {
        rows = {a, b, c};
        try_subset();
      }
    }
  }
  if (!std::isfinite(best_d2)) throw InfeasibleSystem("oracle found no feasible point");
  return best;
}

/// Successively finer grids over [lo, hi] in the first of two coordinates,
/// the second completed exactly, until the spacing is at most `resolution`.
inline GridBest scan_line(const LinearConstraintSystem& S, const Vector& x0, double lo, double hi,
                          double resolution) {
  constexpr int kPoints = 41;
  Vector l = Vector::Constant(1, lo);
  Vector h = Vector::Constant(1, std::max(lo, hi));
  GridBest best;
  int points = kPoints;
  for (int level = 0; level < 200; ++level) {
    const double cell = (h(0) - l(0)) / (points - 1);
    const GridBest found = scan_grid(S, x0, l, h, points);
    if (!std::isfinite(found.dist2)) {
      if (points > 4000) break;
      points *= 4;
      continue;
    }
    if (found.dist2 < best.dist2) best = found;
    if (cell <= resolution) break;
    const double c = found.point(0);
    l(0) = std::max(l(0), c - 3.0 * cell);
    h(0) = std::min(h(0), c + 3.0 * cell);
    points = kPoints;
  }
  return best;
}

/// Clips the square [c - R, c + R]^2 against every row of a 2-D system and
/// returns the vertices of what is left (empty when nothing is).
inline std::vector<Eigen::Vector2d> clip_polygon(const LinearConstraintSystem& S, const Vector& c, double R) {
  std::vector<Eigen::Vector2d> poly = {{c(0) - R, c(1) - R}, {c(0) + R, c(1) - R},
                                       {c(0) + R, c(1) + R}, {c(0) - R, c(1) + R}};
  auto clip = [&](const Eigen::Vector2d& g, double h) {
    const double nrm = g.norm();
    if (nrm <= kZeroRow) {
      if (h < -1e-12) poly.clear();
      return;
    }
    const double slack = 1e-12 * (1.0 + std::abs(h) / nrm);
    std::vector<Eigen::Vector2d> out;
    for (size_t i = 0; i < poly.size(); ++i) {
      const Eigen::Vector2d& a = poly[i];
      const Eigen::Vector2d& b = poly[(i + 1) % poly.size()];
      const double va = (g.dot(a) - h) / nrm, vb = (g.dot(b) - h) / nrm;
      if (va <= slack) out.push_back(a);
      if ((va <= slack) != (vb <= slack) && va != vb) out.push_back(a + (va / (va - vb)) * (b - a));
    }
    poly = std::move(out);
  };
  for (Eigen::Index i = 0; i < S.G.rows() && !poly.empty(); ++i) clip(S.G.row(i).transpose(), S.h(i));
  for (Eigen::Index i = 0; i < S.A.rows() && !poly.empty(); ++i) {
    clip(S.A.row(i).transpose(), S.b(i));
    clip(-S.A.row(i).transpose(), -S.b(i));
  }
  return poly;
}

}  // namespace detail

/// Brute-force projection used as a test oracle.
///
/// For simplex-shaped systems {x >= 0, sum x = a} the exact sort-and-threshold
/// formula is used in any dimension. In dimension 2 each coordinate is
/// scanned on successively finer grids until the spacing is at most
/// `resolution`, with the other chosen exactly per grid point; the windows
/// come from clipping a square against every row.
/// In dimension 3 every candidate active set of at most 3 rows is tried
/// (at most 60 inequality rows).
inline Point oracle_project(const LinearConstraintSystem& S, const Point& x0, double resolution) {
  S.validate();
  if (x0.size() != S.dimension()) {
    throw DimensionError("x0 dimension does not match constraint system");
  }
  if (!(resolution > 0.0)) throw InvalidArgument("resolution must be positive");

  if (auto total = detail::simplex_total(S)) return detail::project_simplex(x0, *total);

  const Eigen::Index n = S.dimension();
  if (n < 1 || n > 3) throw UnsupportedShape("grid oracle supports dimension 1 to 3 only");

  const Eigen::Index k = n - 1;
  if (k == 0) {
    auto v = detail::best_last_coordinate(S, Vector(0), x0(0));
    if (!v) throw InfeasibleSystem("oracle found no feasible point");
    return Vector::Constant(1, *v);
  }

  if (k == 2) return detail::enumerate_active_sets(S, x0);

  // 2-D: scan windows are the extents of the feasible polygon, cut down to
  // the ball around x0 through the polygon's nearest vertex.
  const Eigen::Vector2d anchor(x0(0), x0(1));
  double R = 1.0 + x0.cwiseAbs().maxCoeff();
  std::vector<Eigen::Vector2d> poly;
  double near = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 40; ++attempt) {
    poly = detail::clip_polygon(S, x0, R);
    if (poly.empty()) {
      R *= 8.0;
      continue;
    }
    near = std::numeric_limits<double>::infinity();
    for (const auto& v : poly) near = std::min(near, (v - anchor).norm());
    if (near < R) break;
    R = 2.0 * near;
  }
  if (poly.empty()) throw InfeasibleSystem("oracle found no feasible point");

  // Scan each axis in turn, completing the other exactly. An edge nearly
  // parallel to one axis is badly resolved by that scan but not the other.
  detail::GridBest best;
  for (int axis : {0, 1}) {
    LinearConstraintSystem T = S;
    Vector y0 = x0;
    if (axis == 1) {
      T.G.col(0).swap(T.G.col(1));
      T.A.col(0).swap(T.A.col(1));
      std::swap(y0(0), y0(1));
    }
    double lo_all = std::numeric_limits<double>::infinity();
    double hi_all = -lo_all;
    for (const auto& v : poly) {
      lo_all = std::min(lo_all, v(axis));
      hi_all = std::max(hi_all, v(axis));
    }
    detail::GridBest found = detail::scan_line(T, y0, std::max(y0(0) - near, lo_all),
                                               std::min(y0(0) + near, hi_all), resolution);
    if (!std::isfinite(found.dist2)) continue;
    if (axis == 1) std::swap(found.point(0), found.point(1));
    if (found.dist2 < best.dist2) best = found;
  }
  if (!std::isfinite(best.dist2)) throw InfeasibleSystem("oracle found no feasible point");
  return best.point;
}

}  // namespace vifd::qp
