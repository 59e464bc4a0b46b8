#pragma once

// Feasible-direction projection method for variational inequalities with
// point-to-set operators.
//
// Each outer iteration k:
//   u   in T(x)                      selection oracle
//   z   = P_C(x - beta_k u)
//   stop if |x - z|^2 <= tol, or z = P_C(z - v) for v in T(z)
//   alpha = theta^j, the first j for which some ubar in T(alpha z + (1-alpha) x)
//           has <ubar, x - z> >= delta <u, x - z>   (support oracle)
//   xbar = alpha z + (1 - alpha) x, append H(xbar, ubar) to the halfspace list
//   x+  = P_{C n H_0 n ... n H_k n W(x)}(x0)       anchored at the start point
//   stop if |x+ - x| <= tol_step4
//
// Every projection is an exact least-distance QP. The halfspace list is never
// pruned; W(x) is rebuilt from the current iterate each time.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vifd/errors.hpp"
#include "vifd/linear_system.hpp"
#include "vifd/operators.hpp"
#include "vifd/qp.hpp"
#include "vifd/sets.hpp"

namespace vifd {

/// Bounded step-size sequence beta_k in [lower, upper].
struct BetaSchedule {
  double lower = 1.0;
  double upper = 1.0;
  std::function<double(int)> rule;  // empty: constant `lower`

  static BetaSchedule constant(double beta) { return {beta, beta, {}}; }

  double at(int k) const {
    const double b = rule ? rule(k) : lower;
    if (!(b >= lower && b <= upper)) throw InvalidArgument("beta schedule left its bounds");
    return b;
  }

  void validate() const {
    if (!(lower > 0.0) || !std::isfinite(upper) || !(lower <= upper)) {
      throw InvalidArgument("beta bounds must satisfy 0 < lower <= upper < inf");
    }
  }
};

struct SolverParams {
  double delta = 0.01;
  double theta = 0.5;
  BetaSchedule beta = BetaSchedule::constant(1.0);
  double tol_residual = 1e-8;  // on |x - z|^2
  double tol_step4 = 1e-12;    // on |x+ - x|
  int max_outer_iterations = 10000;
  int max_linesearch_halvings = 100;
  double qp_tol = 1e-10;
  bool record_history = false;

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0,1)");
    beta.validate();
    if (!(tol_residual > 0.0)) throw InvalidArgument("tol_residual must be positive");
    if (!(tol_step4 > 0.0)) throw InvalidArgument("tol_step4 must be positive");
    if (max_outer_iterations < 0) throw InvalidArgument("max_outer_iterations must be >= 0");
    if (max_linesearch_halvings < 0) throw InvalidArgument("max_linesearch_halvings must be >= 0");
    if (!(qp_tol > 0.0)) throw InvalidArgument("qp_tol must be positive");
  }
};

enum class StopReason { ResidualZero_Step2a, ZkSolves_Step2b, FixedPoint_Step4, MaxIterations, LinesearchFailure };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::ResidualZero_Step2a: return "ResidualZero_Step2a";
    case StopReason::ZkSolves_Step2b: return "ZkSolves_Step2b";
    case StopReason::FixedPoint_Step4: return "FixedPoint_Step4";
    case StopReason::MaxIterations: return "MaxIterations";
    case StopReason::LinesearchFailure: return "LinesearchFailure";
  }
  return "?";
}

inline StopReason stop_reason_from_string(const std::string& s) {
  for (StopReason r : {StopReason::ResidualZero_Step2a, StopReason::ZkSolves_Step2b,
                       StopReason::FixedPoint_Step4, StopReason::MaxIterations,
                       StopReason::LinesearchFailure}) {
    if (s == to_string(r)) return r;
  }
  throw InvalidArgument("unknown stop reason '" + s + "'");
}

inline bool is_solution_stop(StopReason r) {
  return r == StopReason::ResidualZero_Step2a || r == StopReason::ZkSolves_Step2b ||
         r == StopReason::FixedPoint_Step4;
}

struct Counters {
  int outer_iters = 0;
  int operator_evals = 0;
  int qp_solves = 0;
  int linesearch_probes = 0;
};

/// One completed outer iteration.
struct IterationRecord {
  Point x;
  Vector u;
  Point z;
  double alpha = 0.0;
  Point xbar;
  Vector ubar;
  double beta = 0.0;
  double residual = 0.0;  // |x - z|^2
  Point x_next;
};

struct StopCertificate {
  std::string test;  // which stop test fired
  double value = 0.0;
};

struct RunReport {
  StopReason stop_reason = StopReason::MaxIterations;
  Point start;
  bool start_projected = false;
  Point terminal_point;
  StopCertificate terminal_certificate;
  Counters counters;
  double wall_time = 0.0;
  std::vector<double> residual_history;
  std::optional<std::uint64_t> seed_used;
  std::vector<IterationRecord> history;
  std::string message;
};

struct SolverState {
  int k = 0;
  Point x;
  Point x0;
  std::vector<Halfspace> accumulated_halfspaces;
  Counters counters;
  std::vector<double> residual_history;
  std::vector<IterationRecord> history;
  std::vector<int> warm_start;

  SolverState(Point start) : x(start), x0(std::move(start)) {}
};

// ---------------------------------------------------------------------------

/// z = P_C(x - beta u).
inline Point compute_z(const Point& x, const Vector& u, double beta, const FeasibleSet& C,
                       Counters& counters, double qp_tol = 1e-10) {
  ++counters.qp_solves;
  return C.project(x - beta * u, qp_tol);
}

struct LinesearchResult {
  double alpha = 1.0;
  Vector ubar;
  int probes = 0;
};

/// Backtracks alpha = 1, theta, theta^2, ... until T(alpha z + (1-alpha) x)
/// contains an element ubar with <ubar, x - z> >= delta <u, x - z>.
inline LinesearchResult linesearch_f(const SetValuedOperator& T, const Point& x, const Point& z,
                                     const Vector& u, const SolverParams& params,
                                     Counters& counters) {
  const Vector d = x - z;
  const double level = params.delta * u.dot(d);
  LinesearchResult out;
  double alpha = 1.0;
  for (int j = 0; j <= params.max_linesearch_halvings; ++j) {
    const Point y = alpha * z + (1.0 - alpha) * x;
    ++counters.operator_evals;
    ++counters.linesearch_probes;
    ++out.probes;
    const SupportResult s = T.support(y, d);
    if (s.value >= level) {
      std::optional<Vector> w = s.maximizer;
      if (!w) w = T.witness_above(y, d, level);
      if (!w) throw LinesearchFailure("operator reported a support value without a witness");
      out.alpha = alpha;
      out.ubar = std::move(*w);
      return out;
    }
    alpha *= params.theta;
  }
  throw LinesearchFailure("linesearch exceeded " + std::to_string(params.max_linesearch_halvings) +
                          " halvings");
}

/// Step 2: z == x, or z solves (z == P_C(z - v), v = select(z), unit step).
inline std::optional<StopCertificate> step2_stop_check(const Point& x, const Point& z,
                                                       const SetValuedOperator& T,
                                                       const FeasibleSet& C,
                                                       const SolverParams& params,
                                                       Counters& counters) {
  const double residual = (x - z).squaredNorm();
  if (residual <= params.tol_residual) return StopCertificate{to_string(StopReason::ResidualZero_Step2a), residual};
  ++counters.operator_evals;
  const Vector v = T.select(z);
  ++counters.qp_solves;
  const double rz = (z - C.project(z - v, params.qp_tol)).squaredNorm();
  if (rz <= params.tol_residual) return StopCertificate{to_string(StopReason::ZkSolves_Step2b), rz};
  return std::nullopt;
}

namespace detail {

inline RunReport make_report(const SolverState& state, StopReason reason, Point terminal,
                             StopCertificate cert, const ProblemInstance& problem) {
  RunReport r;
  r.stop_reason = reason;
  r.start = state.x0;
  r.terminal_point = std::move(terminal);
  r.terminal_certificate = std::move(cert);
  r.counters = state.counters;
  r.residual_history = state.residual_history;
  r.seed_used = problem.seed;
  r.history = state.history;
  return r;
}

inline Eigen::Index nontrivial(const std::vector<Halfspace>& hs) {
  Eigen::Index n = 0;
  for (const auto& h : hs) n += h.is_whole_space() ? 0 : 1;
  return n;
}

}  // namespace detail

/// One outer iteration. Returns a report when the run stops.
inline std::optional<RunReport> step(SolverState& state, const ProblemInstance& problem,
                                     const SolverParams& params) {
  const SetValuedOperator& T = *problem.op;
  const FeasibleSet& C = problem.feasible;

  if (state.k >= params.max_outer_iterations) {
    return detail::make_report(state, StopReason::MaxIterations, state.x,
                               {"max_outer_iterations", static_cast<double>(state.k)}, problem);
  }

  const double beta = params.beta.at(state.k);
  ++state.counters.operator_evals;
  const Vector u = T.select(state.x);
  const Point z = compute_z(state.x, u, beta, C, state.counters, params.qp_tol);
  const double residual = (state.x - z).squaredNorm();
  state.residual_history.push_back(residual);

  if (auto cert = step2_stop_check(state.x, z, T, C, params, state.counters)) {
    const bool at_x = cert->test == to_string(StopReason::ResidualZero_Step2a);
    return detail::make_report(state,
                               at_x ? StopReason::ResidualZero_Step2a : StopReason::ZkSolves_Step2b,
                               at_x ? state.x : z, *cert, problem);
  }

  LinesearchResult ls;
  try {
    ls = linesearch_f(T, state.x, z, u, params, state.counters);
  } catch (const LinesearchFailure& e) {
    RunReport r = detail::make_report(state, StopReason::LinesearchFailure, state.x,
                                      {"linesearch_probes", static_cast<double>(state.counters.linesearch_probes)},
                                      problem);
    r.message = e.what();
    return r;
  }

  const Point xbar = ls.alpha * z + (1.0 - ls.alpha) * state.x;
  const Eigen::Index c_rows = C.constraints().G.rows();
  const Eigen::Index old_h = detail::nontrivial(state.accumulated_halfspaces);
  state.accumulated_halfspaces.push_back(halfspace_from_pair(xbar, ls.ubar));
  const Eigen::Index new_h = detail::nontrivial(state.accumulated_halfspaces);

  std::vector<Halfspace> rows = state.accumulated_halfspaces;
  const Halfspace W = w_halfspace(state.x0, state.x);
  rows.push_back(W);
  const LinearConstraintSystem system = assemble(C, rows);

  // Previous active rows keep their index except the old W row, which moves
  // to the end. The newest halfspace goes first.
  std::vector<int> hint;
  if (new_h > old_h) hint.push_back(static_cast<int>(c_rows + new_h - 1));
  for (int idx : state.warm_start) {
    if (idx < c_rows + old_h) {
      hint.push_back(idx);
    } else if (!W.is_whole_space()) {
      hint.push_back(static_cast<int>(c_rows + new_h));
    }
  }

  ++state.counters.qp_solves;
  qp::QpOptions qo;
  qo.tol = params.qp_tol;
  const qp::QpSolution sol = qp::least_distance(system, state.x0, qo, hint);
  state.warm_start = sol.active_set;
  const Point x_next = sol.point;

  if (params.record_history) {
    state.history.push_back({state.x, u, z, ls.alpha, xbar, ls.ubar, beta, residual, x_next});
  }
  ++state.counters.outer_iters;
  ++state.k;

  const double moved = (x_next - state.x).norm();
  state.x = x_next;
  if (moved <= params.tol_step4) {
    return detail::make_report(state, StopReason::FixedPoint_Step4, state.x,
                               {to_string(StopReason::FixedPoint_Step4), moved}, problem);
  }
  return std::nullopt;
}

/// Runs the method from x0 until a stop test fires.
inline RunReport solve(const ProblemInstance& problem, const Point& x0, const SolverParams& params) {
  params.validate();
  if (x0.size() != problem.dimension()) throw DimensionError("start point has wrong dimension");
  require_finite(x0, "x0");

  const auto t0 = std::chrono::steady_clock::now();
  Point start = x0;
  bool projected = false;
  if (!problem.feasible.contains(x0, 1e-12)) {
    start = problem.feasible.project(x0, params.qp_tol);
    projected = true;
  }

  SolverState state(start);
  std::optional<RunReport> report;
  while (!(report = step(state, problem, params))) {
  }
  report->start_projected = projected;
  if (projected && report->message.empty()) report->message = "start point was projected onto C";
  report->wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return std::move(*report);
}

}  // namespace vifd
