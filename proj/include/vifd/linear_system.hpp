#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "vifd/errors.hpp"

namespace vifd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Points of the ambient space are plain dense vectors. Library entry points
/// validate them with require_finite().
using Point = Vector;

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline const Vector& require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw InvalidArgument(std::string(what) + " has a non-finite entry");
  }
  return v;
}

/// The polyhedron {y : G y <= h, A y = b}.
struct LinearConstraintSystem {
  Matrix G;
  Vector h;
  Matrix A;
  Vector b;

  LinearConstraintSystem() = default;

  LinearConstraintSystem(Matrix G_, Vector h_, Matrix A_, Vector b_)
      : G(std::move(G_)), h(std::move(h_)), A(std::move(A_)), b(std::move(b_)) {
    validate();
  }

  /// Empty system (the whole space) in dimension n.
  static LinearConstraintSystem whole_space(Eigen::Index n) {
    return {Matrix(0, n), Vector(0), Matrix(0, n), Vector(0)};
  }

  Eigen::Index dimension() const { return G.cols(); }
  Eigen::Index inequality_count() const { return G.rows(); }
  Eigen::Index equality_count() const { return A.rows(); }

  void validate() const {
    if (G.cols() != A.cols()) {
      throw DimensionError("G and A column counts differ");
    }
    if (G.rows() != h.size()) {
      throw DimensionError("G row count does not match h");
    }
    if (A.rows() != b.size()) {
      throw DimensionError("A row count does not match b");
    }
  }

  /// Largest constraint violation at y (0 when feasible).
  double max_violation(const Vector& y) const {
    if (y.size() != dimension()) {
      throw DimensionError("point dimension does not match constraint system");
    }
    double worst = 0.0;
    if (G.rows() > 0) {
      worst = std::max(worst, (G * y - h).maxCoeff());
    }
    if (A.rows() > 0) {
      worst = std::max(worst, (A * y - b).cwiseAbs().maxCoeff());
    }
    return worst;
  }

  bool contains(const Vector& y, double tol) const { return max_violation(y) <= tol; }
};

}  // namespace vifd
