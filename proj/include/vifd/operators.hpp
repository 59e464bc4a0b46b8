#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vifd/errors.hpp"
#include "vifd/linear_system.hpp"
#include "vifd/sets.hpp"

namespace vifd {

/// sup { <u, d> : u in T(x) } and, when the sup is attained, an element
/// achieving it.
struct SupportResult {
  double value = 0.0;
  std::optional<Vector> maximizer;

  bool unbounded() const { return value == std::numeric_limits<double>::infinity(); }
};

/// A point-to-set operator T, accessed only through oracles.
///
/// select(x) returns one element of T(x); support(x, d) returns the support
/// function of T(x) in direction d. Implementations are pure and only defined
/// on the feasible set of their problem.
class SetValuedOperator {
public:
  virtual ~SetValuedOperator() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual Vector select(const Point& x) const = 0;
  virtual SupportResult support(const Point& x, const Vector& d) const = 0;
  virtual bool is_singleton() const = 0;

  /// An element u of T(x) with <u, d> >= level, if one exists. Consumes the
  /// support oracle; operators with unbounded images override this so that a
  /// concrete element is available when the sup is +inf.
  virtual std::optional<Vector> witness_above(const Point& x, const Vector& d, double level) const {
    SupportResult s = support(x, d);
    if (s.maximizer && s.value >= level) return s.maximizer;
    return std::nullopt;
  }

protected:
  void check_dimension(const Point& x) const {
    if (x.size() != dimension()) throw DimensionError("operator argument has wrong dimension");
    if (!x.allFinite()) throw DomainError("operator argument has a non-finite entry");
  }
};

/// Base for point-to-point operators: support is <T(x), d>.
class SingletonOperator : public SetValuedOperator {
public:
  bool is_singleton() const final { return true; }

  SupportResult support(const Point& x, const Vector& d) const final {
    if (d.size() != dimension()) throw DimensionError("support direction has wrong dimension");
    Vector u = select(x);
    const double v = u.dot(d);
    return {v, std::move(u)};
  }
};

/// Points of C that the solver produces may sit a rounding error outside C.
inline constexpr double kDomainTolerance = 1e-8;

// ---------------------------------------------------------------------------

/// T(x1, x2) = (-t/(1+t), -1/(1+t)), t = (x1 + sqrt(x1^2 + 4 x2)) / 2 on [0,1]^2.
/// Quasimonotone, not monotone.
class HsOperator final : public SingletonOperator {
public:
  Eigen::Index dimension() const override { return 2; }

  Vector select(const Point& x) const override {
    check_dimension(x);
    if ((x.array() < -kDomainTolerance).any() || (x.array() > 1.0 + kDomainTolerance).any()) {
      throw DomainError("hs operator is defined on [0,1]^2 only");
    }
    const Vector y = x.cwiseMax(0.0).cwiseMin(1.0);
    const double t = 0.5 * (y(0) + std::sqrt(y(0) * y(0) + 4.0 * y(1)));
    Vector u(2);
    u << -t / (1.0 + t), -1.0 / (1.0 + t);
    return u;
  }
};

enum class RhoVariant { SquaredNorm, Norm };

/// T(x) = rho(x) * (1, ..., 1) on [-a, a]^n with rho = |x|^2 or |x|.
class RhoOperator final : public SingletonOperator {
public:
  RhoOperator(Eigen::Index n, double a, RhoVariant variant) : n_(n), a_(a), variant_(variant) {
    if (n <= 0) throw InvalidArgument("dimension must be positive");
    if (!(a > 0.0)) throw InvalidArgument("box half-width must be positive");
  }

  Eigen::Index dimension() const override { return n_; }
  RhoVariant variant() const { return variant_; }

  Vector select(const Point& x) const override {
    check_dimension(x);
    if (x.cwiseAbs().maxCoeff() > a_ + kDomainTolerance * (1.0 + a_)) {
      throw DomainError("rho operator is defined on [-a,a]^n only");
    }
    const double sq = x.squaredNorm();
    const double rho = variant_ == RhoVariant::SquaredNorm ? sq : std::sqrt(sq);
    return Vector::Constant(n_, rho);
  }

private:
  Eigen::Index n_;
  double a_;
  RhoVariant variant_;
};

/// Gradient of F(x) = (1/2 h <x,x> + <q,x> + 1) / sum(x), q = -1, on the
/// simplex slice {x >= 0, sum x = a}.
class FractionalGradientOperator final : public SingletonOperator {
public:
  FractionalGradientOperator(Eigen::Index n, double h) : n_(n), h_(h) {
    if (n <= 0) throw InvalidArgument("dimension must be positive");
  }

  Eigen::Index dimension() const override { return n_; }
  double h() const { return h_; }

  Vector select(const Point& x) const override {
    check_dimension(x);
    if ((x.array() < -kDomainTolerance).any()) {
      throw DomainError("fractional gradient is defined on the nonnegative orthant only");
    }
    const double s = x.sum();
    if (s <= 1e-12) throw DomainError("fractional gradient undefined where sum(x) <= 0");
    const double sq = x.squaredNorm();
    return ((h_ * s) * x.array() - (0.5 * h_ * sq + 1.0)).matrix() / (s * s);
  }

  /// F itself, used by finite-difference checks.
  double objective(const Point& x) const {
    return (0.5 * h_ * x.squaredNorm() - x.sum() + 1.0) / x.sum();
  }

private:
  Eigen::Index n_;
  double h_;
};

/// T(r, phi) = { t (cos phi, sin phi) : t >= r } on {r >= 0, phi in [0, pi/2]}.
/// Continuous but not upper-semicontinuous; every image is a ray.
class RayOperator final : public SetValuedOperator {
public:
  Eigen::Index dimension() const override { return 2; }
  bool is_singleton() const override { return false; }

  /// The element with the smallest parameter, t = r.
  Vector select(const Point& x) const override {
    const auto [r, phi] = checked(x);
    return r * direction(phi);
  }

  SupportResult support(const Point& x, const Vector& d) const override {
    const auto [r, phi] = checked(x);
    if (d.size() != 2) throw DimensionError("support direction has wrong dimension");
    const double c = direction(phi).dot(d);
    if (opens_along(c, d)) return {std::numeric_limits<double>::infinity(), std::nullopt};
    return {r * c, r * direction(phi)};
  }

  /// Smallest ray element t * dir with <t * dir, d> >= level.
  std::optional<Vector> witness_above(const Point& x, const Vector& d, double level) const override {
    const auto [r, phi] = checked(x);
    if (d.size() != 2) throw DimensionError("support direction has wrong dimension");
    const Vector dir = direction(phi);
    const double c = dir.dot(d);
    if (opens_along(c, d)) return std::max(r, level / c) * dir;
    if (r * c >= level) return r * dir;
    return std::nullopt;
  }

  static Vector direction(double phi) {
    Vector v(2);
    v << std::cos(phi), std::sin(phi);
    return v;
  }

private:
  // cos(fl(pi/2)) is 6e-17, not 0. Inner products within rounding of zero are
  // treated as orthogonal so a ray pointing along phi = pi/2 does not look
  // unbounded in a direction it is mathematically orthogonal to.
  static bool opens_along(double c, const Vector& d) { return c > kOrthogonalTolerance * d.norm(); }
  static constexpr double kOrthogonalTolerance = 1e-12;

  std::pair<double, double> checked(const Point& x) const {
    check_dimension(x);
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (x(0) < -kDomainTolerance || x(1) < -kDomainTolerance || x(1) > half_pi + kDomainTolerance) {
      throw DomainError("ray operator is defined on {r >= 0, 0 <= phi <= pi/2} only");
    }
    return {std::max(x(0), 0.0), std::clamp(x(1), 0.0, half_pi)};
  }
};

// ---------------------------------------------------------------------------
// Problems

struct ProblemInstance {
  std::string name;
  std::shared_ptr<const SetValuedOperator> op;
  FeasibleSet feasible;
  /// Known points of the dual (Minty) solution set, for certification.
  std::vector<Point> known_dual_solutions;
  std::string known_primal_set_description;
  /// Seed used to draw random problem data, when any was drawn.
  std::optional<std::uint64_t> seed;

  Eigen::Index dimension() const { return feasible.dimension(); }
};

/// Options that select a concrete instance from a named family.
struct ProblemOptions {
  Eigen::Index dimension = 0;    // 0: the family's natural dimension
  std::optional<double> scale;   // box half-width a or simplex total a
  std::uint64_t seed = 20160101;
};

/// Draws h uniformly from [0.1, 1.6] with a platform-independent mapping of
/// the 64-bit Mersenne Twister output.
inline double draw_fractional_h(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 0.1 + 1.5 * unit;
}

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"hs-quasimonotone", "rho-squared", "rho-norm",
                                                 "fractional-simplex", "ray-setvalued"};
  return names;
}

inline ProblemInstance make_problem(const std::string& name, const ProblemOptions& opts = {}) {
  if (name == "hs-quasimonotone") {
    if (opts.dimension != 0 && opts.dimension != 2) throw InvalidArgument(name + " is two-dimensional");
    return {name, std::make_shared<HsOperator>(),
            FeasibleSet::box(Vector::Zero(2), Vector::Ones(2)),
            {Vector::Ones(2)},
            "S* = S0 = {(1,1)}",
            std::nullopt};
  }
  if (name == "rho-squared" || name == "rho-norm") {
    const Eigen::Index n = opts.dimension == 0 ? 1 : opts.dimension;
    const double a = opts.scale.value_or(1.0);
    const auto variant = name == "rho-squared" ? RhoVariant::SquaredNorm : RhoVariant::Norm;
    return {name, std::make_shared<RhoOperator>(n, a, variant),
            FeasibleSet::box(Vector::Constant(n, -a), Vector::Constant(n, a)),
            {Vector::Constant(n, -a)},
            "S0 = {-a(1,...,1)}, S* = S0 u {0}",
            std::nullopt};
  }
  if (name == "fractional-simplex") {
    const Eigen::Index n = opts.dimension == 0 ? 5 : opts.dimension;
    const double a = opts.scale.value_or(5.0);
    return {name, std::make_shared<FractionalGradientOperator>(n, draw_fractional_h(opts.seed)),
            FeasibleSet::simplex_slice(n, a),
            {Vector::Constant(n, a / static_cast<double>(n))},
            "S0 = {(a/n)(1,...,1)}",
            opts.seed};
  }
  if (name == "ray-setvalued") {
    if (opts.dimension != 0 && opts.dimension != 2) throw InvalidArgument(name + " is two-dimensional");
    const double inf = std::numeric_limits<double>::infinity();
    Vector lo(2), hi(2);
    lo << 0.0, 0.0;
    hi << inf, std::numbers::pi / 2.0;
    return {name, std::make_shared<RayOperator>(), FeasibleSet::box(lo, hi),
            {Vector::Zero(2)},
            "S* = {(0, phi) : phi in [0, pi/2]}, S0 = {(0,0)}",
            std::nullopt};
  }
  throw UnknownProblem("unknown problem '" + name + "'");
}

}  // namespace vifd
