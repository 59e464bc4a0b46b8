#pragma once

// Invariant checks shared by the property tests and the acceptance suite.
// Each returns a list of human-readable violations (empty when all hold).

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "vifd/vifd.hpp"

namespace vifd::checks {

using Violations = std::vector<std::string>;

inline std::string describe(const char* what, int k, double value, double bound) {
  std::ostringstream os;
  os << what << " at iteration " << k << ": " << value << " vs " << bound;
  return os.str();
}

/// Unit-normal value of W(x) at y (<= 0 inside).
inline double w_value(const Point& x0, const Point& x, const Point& y) {
  const Vector n = x0 - x;
  const double nrm = n.norm();
  return nrm == 0.0 ? 0.0 : n.dot(y - x) / nrm;
}

/// Checks the per-iteration invariants of a recorded run:
///  - linesearch exit inequality <ubar, x - z> >= delta <u, x - z>
///  - <ubar, x - xbar> >= (alpha / beta_max) delta |x - z|^2
///  - ubar is an element of T(xbar)
///  - x+ in C, in every accumulated halfspace and in W(x), within 1e-8
///  - |x^k - x0| nondecreasing within 1e-8
///  - every known dual solution stays in every H and every W within 1e-8
///  - sum |x+ - x|^2 <= rho^2 and every iterate lies in the ball
///    B[(x0 + s0)/2, rho/2 + 1e-6] for a singleton dual solution s0
inline Violations check_run_invariants(const ProblemInstance& problem, const SolverParams& params,
                                       const RunReport& report) {
  Violations v;
  const Point& x0 = report.start;
  std::vector<Halfspace> halfspaces;
  double prev_dist = 0.0;
  double step_sum = 0.0;
  int k = 0;
  for (const IterationRecord& it : report.history) {
    const Vector d = it.x - it.z;
    const double level = params.delta * it.u.dot(d);
    const double achieved = it.ubar.dot(d);
    if (achieved < level - 1e-12 * std::max(1.0, std::abs(level))) {
      v.push_back(describe("linesearch exit inequality", k, achieved, level));
    }
    const double key = it.ubar.dot(it.x - it.xbar);
    const double key_bound = it.alpha / params.beta.upper * params.delta * d.squaredNorm();
    if (key < key_bound - 1e-10 * std::max(1.0, std::abs(key_bound))) {
      v.push_back(describe("key inequality", k, key, key_bound));
    }
    // ubar in T(xbar)
    if (problem.op->is_singleton()) {
      const Vector t = problem.op->select(it.xbar);
      if ((t - it.ubar).norm() > 1e-12 * (1.0 + t.norm())) {
        v.push_back(describe("ubar not T(xbar)", k, (t - it.ubar).norm(), 0.0));
      }
    } else {
      const Vector base = problem.op->select(it.xbar);
      const Vector dir = RayOperator::direction(std::clamp(it.xbar(1), 0.0, std::numbers::pi / 2));
      const double t = it.ubar.dot(dir);
      if ((it.ubar - t * dir).norm() > 1e-9 * (1.0 + it.ubar.norm()) || t < base.norm() - 1e-9 * (1.0 + t)) {
        v.push_back(describe("ubar not on the ray T(xbar)", k, t, base.norm()));
      }
    }

    halfspaces.push_back(halfspace_from_pair(it.xbar, it.ubar));
    const Point& xn = it.x_next;
    if (!problem.feasible.contains(xn, 1e-8)) v.push_back(describe("x+ outside C", k, 0, 0));
    for (const Halfspace& H : halfspaces) {
      if (!H.contains(xn, 1e-8)) v.push_back(describe("x+ outside an accumulated halfspace", k, H.evaluate(xn), 1e-8));
    }
    if (w_value(x0, it.x, xn) > 1e-8) v.push_back(describe("x+ outside W(x)", k, w_value(x0, it.x, xn), 1e-8));

    for (const Point& s0 : problem.known_dual_solutions) {
      for (const Halfspace& H : halfspaces) {
        if (!H.contains(s0, 1e-8)) v.push_back(describe("dual solution left a halfspace", k, H.evaluate(s0), 1e-8));
      }
      if (w_value(x0, it.x, s0) > 1e-8) v.push_back(describe("dual solution left W(x)", k, w_value(x0, it.x, s0), 1e-8));
    }

    const double dist = (it.x - x0).norm();
    if (dist < prev_dist - 1e-8) v.push_back(describe("anchored distance decreased", k, dist, prev_dist));
    prev_dist = dist;
    step_sum += (xn - it.x).squaredNorm();
    ++k;
  }
  if (!report.history.empty()) {
    const double last = (report.history.back().x_next - x0).norm();
    if (last < prev_dist - 1e-8) v.push_back(describe("anchored distance decreased", k, last, prev_dist));
  }

  if (problem.known_dual_solutions.size() == 1) {
    const Point& s0 = problem.known_dual_solutions.front();
    const double rho = (x0 - s0).norm();
    if (step_sum > rho * rho + 1e-8) v.push_back(describe("summable steps bound", k, step_sum, rho * rho));
    const Point center = 0.5 * (x0 + s0);
    for (size_t i = 0; i < report.history.size(); ++i) {
      for (const Point* p : {&report.history[i].x, &report.history[i].x_next}) {
        const double r = (*p - center).norm();
        if (r > rho / 2 + 1e-6) v.push_back(describe("iterate outside ball", static_cast<int>(i), r, rho / 2));
      }
    }
  }
  return v;
}

/// The 2-D projection subproblems of a recorded run, rebuilt from its history.
struct Subproblem {
  LinearConstraintSystem system;
  Point anchor;
  Point solution;
};

inline std::vector<Subproblem> projection_subproblems(const ProblemInstance& problem,
                                                      const RunReport& report) {
  std::vector<Subproblem> out;
  std::vector<Halfspace> hs;
  for (const IterationRecord& it : report.history) {
    hs.push_back(halfspace_from_pair(it.xbar, it.ubar));
    std::vector<Halfspace> rows = hs;
    rows.push_back(w_halfspace(report.start, it.x));
    out.push_back({assemble(problem.feasible, rows), report.start, it.x_next});
  }
  return out;
}

/// F(x) = (1/2 h <x,x> - sum x + 1) / sum x, written out independently of
/// the library.
inline double fractional_objective(const Vector& x, double h) {
  double s = 0.0, sq = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s += x(i);
    sq += x(i) * x(i);
  }
  return (0.5 * h * sq - s + 1.0) / s;
}

inline Vector central_difference_gradient(const Vector& x, double h, double step = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    g(i) = (fractional_objective(xp, h) - fractional_objective(xm, h)) / (2.0 * step);
  }
  return g;
}

}  // namespace vifd::checks
