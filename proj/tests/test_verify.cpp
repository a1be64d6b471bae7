#include <gtest/gtest.h>

#include <cmath>

#include "isoflow/suites.hpp"

using namespace isoflow;
using namespace isoflow::verify;

TEST(ComparisonHarness, OrderedPairStaysOrdered) {
  const Grid g = Grid::make(1, 10.0, 101);
  const Stencil s = discretize(Kernel::laplace(0.5), g.spacing());
  const Integrator integ(g, Medium::power_decay(1, 1), s, Boundary::zero_extend(), Scheme::exponential, 0.2);
  const Field a = Field::from_function(g, [](const Point& x) { return std::sin(x[0]); });
  const Field b = Field::from_function(g, [](const Point& x) { return std::sin(x[0]) + (x[0] > 0 ? 0.5 : 0.0); });
  const auto rep = comparison_harness(a, b, integ, 4.0, 2);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.max_violation, 0.0);
  EXPECT_GT(rep.scale, 0.0);
  EXPECT_THROW(comparison_harness(b, a, integ, 4.0), ValidationError);
}

TEST(ComparisonHarness, MaskedPairRespectsBounds) {
  const Grid g = Grid::make(2, 4.0, 33);
  const Stencil s = discretize(Kernel::uniform_ball(1.0, 2), g.spacing());
  const Integrator integ(g, Medium::constant(0.5, 2), s, Boundary::mask(4.0), Scheme::exponential, 1.0);
  const Field a(g, -1.0);
  const Field b = Field::from_function(g, [](const Point& x) { return x[0] > 0 ? 2.0 : -1.0; });
  const auto rep = comparison_harness(a, b, integ, 10.0, 5);
  EXPECT_TRUE(rep.passed);
  EXPECT_LE(rep.bound_violation, 1e-12 * rep.scale);
}

TEST(Supersolution, QuadraticDecayPassesAtFullRate) {
  const Grid g = Grid::make(1, 20.0, 401);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  const double V = stencil_second_moment(s, g.spacing());
  const auto r = supersolution_residual(2.0, V, Medium::power_decay(1, 2), s, g, 0.5);
  EXPECT_GE(r.min_residual, -1e-12);
  EXPECT_THROW(supersolution_residual(1.0, 1.0, Medium::gaussian_decay(1, 1), s, g, 0.0), ValidationError);
}

TEST(Supersolution, BarrierFactor) {
  EXPECT_EQ(barrier_factor(2.0), 1.0);
  EXPECT_NEAR(barrier_factor(0.0), 0.5, 1e-12);
  EXPECT_NEAR(barrier_factor(1.0), 2.0 * std::sqrt(2.0) - 2.0, 1e-9);
  EXPECT_LT(barrier_factor(1.5), 1.0);
}

TEST(QuadraticIdentity, ShiftInvariantSecondMoment) {
  const Grid g = Grid::make(1, 10.0, 201);
  const Stencil s = discretize(Kernel::uniform_ball(1.0), g.spacing());
  const auto r = quadratic_identity(s, g, Point{1.3, 0.0});
  EXPECT_LE(r.relative_spread, 1e-12);
  EXPECT_NEAR(r.mean_value, r.second_moment, 1e-12 * r.second_moment);
  EXPECT_GT(r.interior_nodes, 0u);
  EXPECT_THROW(quadratic_identity(discretize(Kernel::laplace(1.0), 0.5), Grid::make(1, 3.0, 13)), ValidationError);
}

TEST(Nullspace, ConnectedMaskHasConstantKernel) {
  const Grid g = Grid::make(1, 5.0, 41);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  const auto rep = steady_state_nullspace(s, DomainMask::ball(g, 4.0));
  EXPECT_EQ(rep.dimension, 1u);
  EXPECT_EQ(rep.components, 1u);
  EXPECT_LE(rep.constant_residual, 1e-12);
  EXPECT_GT(rep.smallest_nonzero_eigenvalue, 0.0);
}

TEST(Nullspace, SplitMaskHasOneModePerComponent) {
  const Grid g = Grid::make(1, 5.0, 41);
  const Stencil s = discretize(Kernel::uniform_ball(1.0), g.spacing());
  const auto two = DomainMask::from_predicate(g, [](const Point& x) { return std::abs(x[0]) > 1.2; });
  const auto rep = steady_state_nullspace(s, two);
  EXPECT_EQ(rep.components, 2u);
  EXPECT_EQ(rep.dimension, 2u);
  EXPECT_EQ(stencil_components(s, two), 2u);
}

TEST(Nullspace, RefusesOversizedMask) {
  const Grid g = Grid::make(2, 5.0, 81);
  const Stencil s = discretize(Kernel::uniform_ball(0.2, 2), g.spacing());
  EXPECT_THROW(steady_state_nullspace(s, DomainMask::whole(g)), ValidationError);
}

TEST(Suites, FormatAndNames) {
  EXPECT_EQ(format_check({"x.y", true, 0.5}), "CHECK x.y PASS 5.000000e-01");
  EXPECT_EQ(format_check({"x.y", false, 0.0}), "CHECK x.y FAIL 0.000000e+00");
  EXPECT_EQ(suite_names().size(), 8u);
  EXPECT_THROW(run_suite("nope"), ConfigError);
}

TEST(Suites, QuadraticAndFftPass) {
  for (const auto& name : {"quadratic", "fft"})
    for (const auto& c : run_suite(name)) EXPECT_TRUE(c.passed) << c.name << " " << c.metric;
}

TEST(Suites, SupersolutionReportsTheSmallGammaDefect) {
  for (const auto& c : run_suite("supersolution")) {
    const bool known_red = c.name == "supersolution.lambda_V_over_eta.gamma0" || c.name == "supersolution.lambda_V_over_eta.gamma1";
    EXPECT_EQ(c.passed, !known_red) << c.name << " " << c.metric;
  }
}
