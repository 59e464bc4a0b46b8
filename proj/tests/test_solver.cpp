#include <gtest/gtest.h>

#include <numbers>

#include "checks.hpp"
#include "vifd/bench.hpp"
#include "vifd/solver.hpp"

using namespace vifd;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

SolverParams table1_params() {
  SolverParams p;
  p.delta = 0.01;
  p.theta = 0.5;
  p.tol_residual = 1e-8;
  return p;
}

// Jumps from -1 to 1 at 0.5 on [-1, 1]: the linesearch never succeeds from 0.5.
class StepOperator final : public SingletonOperator {
public:
  Eigen::Index dimension() const override { return 1; }
  Vector select(const Point& x) const override {
    check_dimension(x);
    return Vector::Constant(1, x(0) >= 0.5 ? 1.0 : -1.0);
  }
};

ProblemInstance step_problem() {
  return {"step", std::make_shared<StepOperator>(), FeasibleSet::box(vec({-1}), vec({1})), {}, "", std::nullopt};
}

}  // namespace

TEST(ComputeZ, Examples) {
  const auto P = make_problem("hs-quasimonotone");
  Counters c;
  const Point z1 = compute_z(vec({0.5, 0.5}), P.op->select(vec({0.5, 0.5})), 1.0, P.feasible, c);
  EXPECT_LE((z1 - vec({1, 1})).norm(), 1e-12);
  const Point z2 = compute_z(vec({0, 1}), P.op->select(vec({0, 1})), 1.0, P.feasible, c);
  EXPECT_LE((z2 - vec({0.5, 1})).norm(), 1e-12);
  EXPECT_EQ(c.qp_solves, 2);
}

TEST(Linesearch, FullStepAccepted) {
  const auto P = make_problem("hs-quasimonotone");
  const Vector x = vec({0, 1}), z = vec({0.5, 1});
  const Vector u = P.op->select(x);
  Counters c;
  const LinesearchResult ls = linesearch_f(*P.op, x, z, u, table1_params(), c);
  EXPECT_EQ(ls.alpha, 1.0);
  EXPECT_EQ(ls.probes, 1);
  EXPECT_NEAR(ls.ubar.dot(x - z), 0.280776, 1e-6);
  EXPECT_NEAR(0.01 * u.dot(x - z), 0.0025, 1e-15);
  EXPECT_EQ(c.operator_evals, 1);
}

TEST(Linesearch, BacktracksAndFails) {
  const auto P = step_problem();
  SolverParams p;
  p.max_linesearch_halvings = 20;
  Counters c;
  EXPECT_THROW(linesearch_f(*P.op, vec({0.5}), vec({-0.5}), vec({1}), p, c), LinesearchFailure);
  EXPECT_EQ(c.operator_evals, p.max_linesearch_halvings + 1);
}

TEST(Linesearch, ProbesShrinkByTheta) {
  // rho-squared from 1: z = 0, T(alpha z + (1 - alpha) x) = (1 - alpha)^2.
  // <., x - z> = (1 - alpha)^2 >= 0.01 * 1 needs alpha <= 0.9: alpha = 0.5.
  const auto P = make_problem("rho-squared");
  SolverParams p = table1_params();
  Counters c;
  const LinesearchResult ls = linesearch_f(*P.op, vec({1}), vec({0}), vec({1}), p, c);
  EXPECT_EQ(ls.alpha, 0.5);
  EXPECT_EQ(ls.probes, 2);
  EXPECT_DOUBLE_EQ(ls.ubar(0), 0.25);
}

TEST(Step2, Examples) {
  const auto P = make_problem("hs-quasimonotone");
  const SolverParams p = table1_params();
  Counters c;
  // z = x: residual zero.
  auto a = step2_stop_check(vec({1, 1}), vec({1, 1}), *P.op, P.feasible, p, c);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->test, "ResidualZero_Step2a");
  EXPECT_EQ(c.operator_evals, 0);
  // z = (1,1) solves the VI.
  auto b = step2_stop_check(vec({0.5, 0.5}), vec({1, 1}), *P.op, P.feasible, p, c);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->test, "ZkSolves_Step2b");
  EXPECT_EQ(c.operator_evals, 1);
  // (0.5, 1) does not.
  EXPECT_FALSE(step2_stop_check(vec({0, 1}), vec({0.5, 1}), *P.op, P.feasible, p, c));
}

TEST(Step, FromMidpointStopsAtStep2b) {
  const auto P = make_problem("hs-quasimonotone");
  SolverState s(vec({0.5, 0.5}));
  auto r = step(s, P, table1_params());
  ASSERT_TRUE(r);
  EXPECT_EQ(r->stop_reason, StopReason::ZkSolves_Step2b);
  EXPECT_EQ(r->counters.operator_evals, 2);
  EXPECT_EQ(r->counters.outer_iters, 0);
  EXPECT_LE((r->terminal_point - vec({1, 1})).norm(), 1e-12);
}

TEST(Step, OneIterationFromCorner) {
  const auto P = make_problem("hs-quasimonotone");
  SolverParams p = table1_params();
  p.record_history = true;
  SolverState s(vec({0, 1}));
  EXPECT_FALSE(step(s, P, p));
  EXPECT_EQ(s.k, 1);
  ASSERT_EQ(s.history.size(), 1u);
  EXPECT_EQ(s.history[0].alpha, 1.0);
  EXPECT_EQ(s.accumulated_halfspaces.size(), 1u);
  EXPECT_EQ(s.counters.operator_evals, 3);  // select, step 2b, one probe
  EXPECT_TRUE(P.feasible.contains(s.x, 1e-10));
}

struct Table1Row {
  Point start;
  int iters;
  int evals;
};

TEST(Solve, HsRows) {
  const std::vector<Table1Row> rows = {
      {vec({0, 1}), 1, 5},   {vec({0, 0}), 1, 5},     {vec({1, 0}), 2, 8},
      {vec({0.5, 0.5}), 0, 2}, {vec({0.2, 0.7}), 1, 5}, {vec({0.1, 0.7}), 1, 5},
  };
  const auto P = make_problem("hs-quasimonotone");
  for (const auto& row : rows) {
    const RunReport r = solve(P, row.start, table1_params());
    EXPECT_EQ(r.counters.outer_iters, row.iters) << row.start.transpose();
    EXPECT_EQ(r.counters.operator_evals, row.evals) << row.start.transpose();
    EXPECT_TRUE(is_solution_stop(r.stop_reason));
    EXPECT_LE((r.terminal_point - vec({1, 1})).norm(), 1e-6);
  }
}

TEST(Solve, RhoSquared) {
  const auto P = make_problem("rho-squared");
  const RunReport neg = solve(P, vec({-0.5}), table1_params());
  EXPECT_TRUE(is_solution_stop(neg.stop_reason));
  EXPECT_NEAR(neg.terminal_point(0), -1.0, 1e-6);

  const RunReport pos = solve(P, vec({0.1}), table1_params());
  EXPECT_TRUE(is_solution_stop(pos.stop_reason));
  EXPECT_GT(pos.terminal_point(0), 0.0);
  EXPECT_LT(pos.terminal_point(0), 0.0101);
  // Residual |x - z|^2 = |x|^4 <= 1e-8 only near zero.
  EXPECT_NEAR(pos.terminal_point(0), 0.0099, 1e-4);
}

TEST(Solve, StationaryStart) {
  const auto P = make_problem("rho-squared");
  const RunReport r = solve(P, vec({0.0}), table1_params());
  EXPECT_EQ(r.stop_reason, StopReason::ResidualZero_Step2a);
  EXPECT_EQ(r.counters.outer_iters, 0);
  EXPECT_EQ(r.counters.operator_evals, 1);
  EXPECT_EQ(r.terminal_point(0), 0.0);
}

TEST(Solve, IterationCap) {
  const auto P = make_problem("rho-squared");
  SolverParams p = table1_params();
  p.max_outer_iterations = 3;
  const RunReport r = solve(P, vec({0.1}), p);
  EXPECT_EQ(r.stop_reason, StopReason::MaxIterations);
  EXPECT_EQ(r.counters.outer_iters, 3);
  p.max_outer_iterations = 0;
  const RunReport z = solve(P, vec({0.1}), p);
  EXPECT_EQ(z.stop_reason, StopReason::MaxIterations);
  EXPECT_EQ(z.counters.operator_evals, 0);
}

TEST(Solve, LinesearchFailureIsReported) {
  SolverParams p;
  p.max_linesearch_halvings = 3;
  const RunReport r = solve(step_problem(), vec({0.5}), p);
  EXPECT_EQ(r.stop_reason, StopReason::LinesearchFailure);
  EXPECT_FALSE(r.message.empty());
  EXPECT_EQ(r.counters.outer_iters, 0);
}

TEST(Solve, ProjectsInfeasibleStart) {
  const auto P = make_problem("hs-quasimonotone");
  const RunReport r = solve(P, vec({2, 2}), table1_params());
  EXPECT_TRUE(r.start_projected);
  EXPECT_EQ(r.start, vec({1, 1}));
  EXPECT_FALSE(r.message.empty());
}

TEST(Solve, Validation) {
  const auto P = make_problem("hs-quasimonotone");
  SolverParams p;
  p.delta = 1.0;
  EXPECT_THROW(solve(P, vec({0, 0}), p), InvalidArgument);
  p = SolverParams{};
  p.theta = 0.0;
  EXPECT_THROW(solve(P, vec({0, 0}), p), InvalidArgument);
  p = SolverParams{};
  p.beta = BetaSchedule{0.0, 1.0, {}};
  EXPECT_THROW(solve(P, vec({0, 0}), p), InvalidArgument);
  EXPECT_THROW(solve(P, vec({0, 0, 0}), SolverParams{}), DimensionError);
  EXPECT_THROW(solve(P, vec({NAN, 0}), SolverParams{}), InvalidArgument);
}

TEST(Solve, VaryingBetaSchedule) {
  const auto P = make_problem("rho-squared");
  SolverParams p = table1_params();
  p.beta = BetaSchedule{0.5, 2.0, [](int k) { return k % 2 ? 0.5 : 2.0; }};
  p.record_history = true;
  const RunReport r = solve(P, vec({-0.5}), p);
  EXPECT_TRUE(is_solution_stop(r.stop_reason));
  EXPECT_TRUE(checks::check_run_invariants(P, p, r).empty());
  BetaSchedule bad{0.5, 1.0, [](int) { return 3.0; }};
  EXPECT_THROW(bad.at(0), InvalidArgument);
}

TEST(Solve, Deterministic) {
  const auto P = make_problem("fractional-simplex");
  SolverParams p = table1_params();
  p.tol_residual = 1e-4;
  const RunReport a = solve(P, vec({0, 0, 5, 0, 0}), p);
  const RunReport b = solve(P, vec({0, 0, 5, 0, 0}), p);
  EXPECT_EQ(a.terminal_point, b.terminal_point);
  EXPECT_EQ(a.counters.operator_evals, b.counters.operator_evals);
  EXPECT_EQ(a.residual_history, b.residual_history);
}

TEST(StopReason, RoundTrip) {
  for (StopReason r : {StopReason::ResidualZero_Step2a, StopReason::ZkSolves_Step2b, StopReason::FixedPoint_Step4,
                       StopReason::MaxIterations, StopReason::LinesearchFailure}) {
    EXPECT_EQ(stop_reason_from_string(to_string(r)), r);
  }
  EXPECT_THROW(stop_reason_from_string("Nope"), InvalidArgument);
}

// Every preset run, recorded, satisfies the per-iteration invariants.
class PresetInvariants : public ::testing::TestWithParam<std::string> {};

TEST_P(PresetInvariants, Hold) {
  for (const bench::ExperimentConfig& cfg : bench::preset(GetParam())) {
    for (const Point& start : cfg.starts) {
      const RunReport r = bench::run_start(cfg, start, true);
      const ProblemInstance P = bench::instance_for(cfg, start);
      const auto v = checks::check_run_invariants(P, cfg.params, r);
      EXPECT_TRUE(v.empty()) << cfg.label << " from " << start.transpose() << ": " << v.size()
                             << " violations, first: " << (v.empty() ? "" : v.front());
      EXPECT_EQ(static_cast<int>(r.history.size()), r.counters.outer_iters);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Presets, PresetInvariants, ::testing::Values("table1", "table2", "table3", "table4"));

// The 2-D projection subproblems met in practice, QP against the grid oracle.
TEST(Subproblems, QpMatchesOracle) {
  constexpr double kResolution = 1e-8;
  int compared = 0;
  for (const std::string name : {"table1", "table4"}) {
    for (const bench::ExperimentConfig& cfg : bench::preset(name)) {
      for (const Point& start : cfg.starts) {
        const RunReport r = bench::run_start(cfg, start, true);
        const ProblemInstance P = bench::instance_for(cfg, start);
        const auto subs = checks::projection_subproblems(P, r);
        const size_t stride = std::max<size_t>(1, subs.size() / 25);
        for (size_t i = 0; i < subs.size(); i += stride) {
          const auto& sp = subs[i];
          Point oracle;
          try {
            oracle = qp::oracle_project(sp.system, sp.anchor, kResolution);
          } catch (const InfeasibleSystem&) {
            ADD_FAILURE() << name << " from " << start.transpose() << " iteration " << i << " of " << subs.size()
                          << " rows " << sp.system.G.rows() << " qp " << sp.solution.transpose();
            continue;
          }
          const double scale = 1.0 + sp.anchor.cwiseAbs().maxCoeff();
          EXPECT_LE((sp.solution - oracle).norm(), 2.0 * kResolution * scale)
              << name << " from " << start.transpose() << " iteration " << i;
          ++compared;
        }
      }
    }
  }
  EXPECT_GT(compared, 50);
}
