#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vifd/errors.hpp"
#include "vifd/linear_system.hpp"
#include "vifd/qp.hpp"

namespace vifd {

/// The closed halfspace {y : <normal, y - anchor> <= 0}. A zero normal is the
/// whole space.
class Halfspace {
public:
  Halfspace(Vector normal, Point anchor) : normal_(std::move(normal)), anchor_(std::move(anchor)) {
    if (normal_.size() != anchor_.size()) {
      throw DimensionError("halfspace normal and anchor dimensions differ");
    }
    require_finite(normal_, "halfspace normal");
    require_finite(anchor_, "halfspace anchor");
  }

  const Vector& normal() const { return normal_; }
  const Point& anchor() const { return anchor_; }
  Eigen::Index dimension() const { return normal_.size(); }

  bool is_whole_space() const { return normal_.isZero(0.0); }

  /// Signed value <normal, y - anchor>; the halfspace is where this is <= 0.
  double evaluate(const Point& y) const {
    if (y.size() != dimension()) throw DimensionError("point dimension does not match halfspace");
    return normal_.dot(y - anchor_);
  }

  /// Right-hand side of the row form <normal, y> <= offset().
  double offset() const { return normal_.dot(anchor_); }

  bool contains(const Point& y, double tol = 0.0) const {
    if (tol < 0.0) throw InvalidArgument("tolerance must be non-negative");
    return evaluate(y) <= tol;
  }

private:
  Vector normal_;
  Point anchor_;
};

/// H(z, u) = {y : <u, y - z> <= 0}, with u rescaled to unit length when nonzero.
inline Halfspace halfspace_from_pair(const Point& z, const Vector& u) {
  require_finite(z, "z");
  require_finite(u, "u");
  const double nrm = u.norm();
  if (nrm > 0.0) return Halfspace(u / nrm, z);
  return Halfspace(Vector::Zero(u.size()), z);
}

/// W(x) = {y : <y - x, x0 - x> <= 0}. Whole space when x == x0.
inline Halfspace w_halfspace(const Point& x0, const Point& x) {
  if (x0.size() != x.size()) throw DimensionError("x0 and x dimensions differ");
  return Halfspace(x0 - x, x);
}

// ---------------------------------------------------------------------------
// Feasible sets

/// Axis-aligned box; bounds may be infinite.
struct Box {
  Vector lower;
  Vector upper;
};

/// {x >= 0, sum x = total}.
struct SimplexSlice {
  Eigen::Index dimension = 0;
  double total = 1.0;
};

/// {G x <= h, A x = b}.
struct Polyhedron {
  LinearConstraintSystem system;
};

class FeasibleSet {
public:
  using Shape = std::variant<Box, SimplexSlice, Polyhedron>;

  static FeasibleSet box(Vector lower, Vector upper) {
    if (lower.size() != upper.size()) throw DimensionError("box bound dimensions differ");
    if (lower.size() == 0) throw InvalidArgument("box must have positive dimension");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
      if (std::isnan(lower(i)) || std::isnan(upper(i))) throw InvalidArgument("box bound is NaN");
      if (lower(i) > upper(i)) throw InvalidArgument("box lower bound exceeds upper bound");
      if (lower(i) == std::numeric_limits<double>::infinity() ||
          upper(i) == -std::numeric_limits<double>::infinity()) {
        throw InvalidArgument("box is empty");
      }
    }
    return FeasibleSet(Box{std::move(lower), std::move(upper)});
  }

  static FeasibleSet simplex_slice(Eigen::Index dimension, double total) {
    if (dimension <= 0) throw InvalidArgument("simplex dimension must be positive");
    if (!(total > 0.0) || !std::isfinite(total)) throw InvalidArgument("simplex total must be positive");
    return FeasibleSet(SimplexSlice{dimension, total});
  }

  /// General polyhedron; nonemptiness is checked with one projection.
  static FeasibleSet polyhedron(LinearConstraintSystem system) {
    system.validate();
    if (system.dimension() == 0) throw InvalidArgument("polyhedron must have positive dimension");
    if (!system.G.allFinite() || !system.h.allFinite() || !system.A.allFinite() ||
        !system.b.allFinite()) {
      throw InvalidArgument("polyhedron data has a non-finite entry");
    }
    qp::least_distance(system, Vector::Zero(system.dimension()));
    return FeasibleSet(Polyhedron{std::move(system)});
  }

  const Shape& shape() const { return shape_; }

  Eigen::Index dimension() const {
    return std::visit(
        [](const auto& s) -> Eigen::Index {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Box>) return s.lower.size();
          else if constexpr (std::is_same_v<T, SimplexSlice>) return s.dimension;
          else return s.system.dimension();
        },
        shape_);
  }

  bool contains(const Point& y, double tol = 0.0) const {
    if (y.size() != dimension()) throw DimensionError("point dimension does not match feasible set");
    return std::visit(
        [&](const auto& s) -> bool {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Box>) {
            return ((s.lower.array() - tol) <= y.array()).all() &&
                   (y.array() <= (s.upper.array() + tol)).all();
          } else if constexpr (std::is_same_v<T, SimplexSlice>) {
            return (y.array() >= -tol).all() && std::abs(y.sum() - s.total) <= tol;
          } else {
            return s.system.contains(y, tol);
          }
        },
        shape_);
  }

  /// Canonical row form of the set alone.
  LinearConstraintSystem constraints() const {
    const Eigen::Index n = dimension();
    return std::visit(
        [&](const auto& s) -> LinearConstraintSystem {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Box>) {
            std::vector<std::pair<Eigen::Index, double>> rows;  // (coord, sign)
            for (Eigen::Index i = 0; i < n; ++i) {
              if (std::isfinite(s.upper(i))) rows.emplace_back(i, 1.0);
            }
            for (Eigen::Index i = 0; i < n; ++i) {
              if (std::isfinite(s.lower(i))) rows.emplace_back(i, -1.0);
            }
            Matrix G = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), n);
            Vector h(static_cast<Eigen::Index>(rows.size()));
            for (size_t r = 0; r < rows.size(); ++r) {
              const auto [i, sign] = rows[r];
              G(static_cast<Eigen::Index>(r), i) = sign;
              h(static_cast<Eigen::Index>(r)) = sign > 0 ? s.upper(i) : -s.lower(i);
            }
            return {std::move(G), std::move(h), Matrix(0, n), Vector(0)};
          } else if constexpr (std::is_same_v<T, SimplexSlice>) {
            return {-Matrix::Identity(n, n), Vector::Zero(n), Matrix::Ones(1, n),
                    Vector::Constant(1, s.total)};
          } else {
            return s.system;
          }
        },
        shape_);
  }

  /// Euclidean projection onto the set.
  Point project(const Point& y, double tol = 1e-10) const {
    if (y.size() != dimension()) throw DimensionError("point dimension does not match feasible set");
    if (const auto* b = std::get_if<Box>(&shape_)) {
      return y.cwiseMax(b->lower).cwiseMin(b->upper);
    }
    return qp::least_distance(constraints(), y, tol).point;
  }

private:
  explicit FeasibleSet(Shape s) : shape_(std::move(s)) {}
  Shape shape_;
};

/// Rows of C followed by one row per non-trivial halfspace, in order.
inline LinearConstraintSystem assemble(const FeasibleSet& C, std::span<const Halfspace> halfspaces) {
  const Eigen::Index n = C.dimension();
  LinearConstraintSystem base = C.constraints();
  Eigen::Index extra = 0;
  for (const Halfspace& H : halfspaces) {
    if (H.dimension() != n) throw DimensionError("halfspace dimension does not match feasible set");
    if (!H.is_whole_space()) ++extra;
  }
  if (extra == 0) return base;
  const Eigen::Index m = base.G.rows();
  Matrix G(m + extra, n);
  Vector h(m + extra);
  G.topRows(m) = base.G;
  h.head(m) = base.h;
  Eigen::Index r = m;
  for (const Halfspace& H : halfspaces) {
    if (H.is_whole_space()) continue;
    G.row(r) = H.normal().transpose();
    h(r) = H.offset();
    ++r;
  }
  return {std::move(G), std::move(h), std::move(base.A), std::move(base.b)};
}

inline LinearConstraintSystem assemble(const FeasibleSet& C,
                                       std::initializer_list<Halfspace> halfspaces) {
  return assemble(C, std::span<const Halfspace>(halfspaces.begin(), halfspaces.size()));
}

}  // namespace vifd
