#include <gtest/gtest.h>

#include <numbers>

#include "isoflow/diagnostics.hpp"
#include "isoflow/solver.hpp"

using namespace isoflow;

TEST(Mass, Examples) {
  const Grid g = Grid::make(1, 100.0, 2001);
  const Medium m = Medium::power_decay(1, 2);
  const double off_box = 2.0 * (std::numbers::pi / 2 - std::atan(100.0));
  EXPECT_NEAR(mass(Field(g, 1.0), m), std::numbers::pi - off_box, 1e-4);
  EXPECT_EQ(mass(Field(g, 0.0), m), 0.0);
}

TEST(LyapunovF, ConstantIsZeroUnderMask) {
  const Grid g = Grid::make(2, 5.0, 41);
  const Stencil s = discretize(Kernel::gaussian(1.0, 2), g.spacing());
  const DomainMask mk = DomainMask::ball(g, 5.0);
  EXPECT_EQ(lyapunov_F(Field(g, 3.0), s, &mk), 0.0);
  // zero extension sees the jump to 0 off the grid
  EXPECT_GT(lyapunov_F(Field(g, 3.0), s), 0.0);
}

TEST(LyapunovF, SingleSpike) {
  for (int dim : {1, 2}) {
    const Grid g = dim == 1 ? Grid::make(1, 20.0, 201) : Grid::make(2, 5.0, 51);
    const Stencil s = discretize(dim == 1 ? Kernel::laplace(0.5) : Kernel::gaussian(0.5, 2), g.spacing());
    Field u(g);
    u[g.origin_index()] = 1.0;
    const double w0 = s.weight(0, 0);
    const double expect = std::pow(g.spacing(), dim) * 2.0 * (1.0 - w0);
    EXPECT_NEAR(lyapunov_F(u, s), expect, 1e-15);
    const DomainMask whole = DomainMask::whole(g);
    EXPECT_NEAR(lyapunov_F(u, s, &whole), expect, 1e-15);
  }
}

TEST(LyapunovF, NonnegativeAndTranslationInvariant) {
  const Grid g = Grid::make(1, 20.0, 401);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  const Field a = Field::from_function(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  const Field b = Field::from_function(g, [](const Point& x) { return std::exp(-(x[0] - 3.0) * (x[0] - 3.0)); });
  EXPECT_GT(lyapunov_F(a, s), 0.0);
  EXPECT_NEAR(lyapunov_F(a, s), lyapunov_F(b, s), 1e-14);
  Field c = a;
  for (double& v : c.values) v = 3.0 * v + 5.0;
  const DomainMask mk = DomainMask::ball(g, 20.0);
  EXPECT_NEAR(lyapunov_F(c, s, &mk), 9.0 * lyapunov_F(a, s, &mk), 1e-13);
}

TEST(LyapunovIdentity, ConstantTrajectoryHasZeroResiduals) {
  const Grid g = Grid::make(1, 10.0, 101);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  const Integrator integ(g, Medium::power_decay(1, 2), s, Boundary::mask(10.0), Scheme::exponential, 0.01);
  const Trajectory tr = simulate(Field(g, 1.0), integ, 0.5, 5);
  const auto rep = lyapunov_identity_check(tr, integ.rho(), s, integ.op().mask());
  EXPECT_EQ(rep.derivative_residual, 0.0);
  EXPECT_EQ(rep.energy_residual, 0.0);
  EXPECT_EQ(rep.monotonicity_violation, 0.0);
}

TEST(LyapunovIdentity, ResidualsShrinkUnderRefinementAndFDecreases) {
  const Grid g = Grid::make(1, 10.0, 201);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  const Medium m = Medium::power_decay(1, 2);
  const Field u0 = Field::from_function(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  double prev_d = INFINITY, prev_e = INFINITY;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const Integrator integ(g, m, s, Boundary::mask(10.0), Scheme::exponential, dt);
    const Trajectory tr = simulate(u0, integ, 1.0, 10);
    const auto rep = lyapunov_identity_check(tr, integ.rho(), s, integ.op().mask());
    EXPECT_LT(rep.derivative_residual, prev_d);
    EXPECT_LT(rep.energy_residual, prev_e);
    EXPECT_LE(rep.monotonicity_violation, 1e-12);
    for (double f : rep.F) EXPECT_GE(f, 0.0);
    prev_d = rep.derivative_residual;
    prev_e = rep.energy_residual;
  }
  EXPECT_LT(prev_d, 2e-2);
  EXPECT_LT(prev_e, 2e-2);
}

TEST(LyapunovIdentity, NeedsThreeUniformSnapshots) {
  const Grid g = Grid::make(1, 5.0, 51);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  Trajectory tr;
  tr.snapshots = {{0.0, Field(g)}, {0.1, Field(g)}};
  EXPECT_THROW(lyapunov_identity_check(tr, Field(g, 1.0), s), ValidationError);
  tr.snapshots.push_back({0.3, Field(g)});
  EXPECT_THROW(lyapunov_identity_check(tr, Field(g, 1.0), s), ValidationError);
}

TEST(DissipationBudget, NonincreasingTailAndBounded) {
  const Grid g = Grid::make(1, 10.0, 201);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  const Integrator integ(g, Medium::power_decay(1, 2), s, Boundary::mask(10.0), Scheme::exponential, 1e-3);
  const Field u0 = Field::from_function(g, [](const Point& x) { return std::tanh(x[0]); });
  const Trajectory tr = simulate(u0, integ, 2.0, 20);
  const auto b = dissipation_budget(tr, integ.rho(), s, integ.op().mask());
  for (std::size_t k = 0; k + 1 < b.budget.size(); ++k) EXPECT_GE(b.budget[k], b.budget[k + 1]);
  EXPECT_EQ(b.budget.back(), 0.0);
  EXPECT_LE(b.max_ratio, 1.01);
}

TEST(DiagnosticsEvaluator, RecordInvariants) {
  const Grid g = Grid::make(1, 10.0, 101);
  const Stencil s = discretize(Kernel::gaussian(1.0), g.spacing());
  const NonlocalOperator op(g, s, Boundary::mask(8.0));
  const Field rho = Medium::power_decay(1, 2).sample(g);
  DiagnosticsEvaluator::Options o;
  o.target = 0.5;
  o.lp_radius = 3.0;
  const DiagnosticsEvaluator ev(op, rho, DomainMask::ball(g, 8.0), o);
  const Field u = Field::from_function(g, [](const Point& x) { return std::cos(x[0]); });
  const auto r = ev(0.25, u);
  EXPECT_EQ(r.t, 0.25);
  EXPECT_GE(r.lyapunov_F, 0.0);
  EXPECT_GE(r.dissipation, 0.0);
  EXPECT_LE(r.inf_u, r.u_at_origin);
  EXPECT_GE(r.sup_u, r.u_at_origin);
  EXPECT_EQ(r.u_at_origin, 1.0);
  EXPECT_GT(r.dist_L1rho, 0.0);

  o.target = NAN;
  const auto q = DiagnosticsEvaluator(op, rho, DomainMask::ball(g, 8.0), o)(0.0, Field(g, 2.0));
  EXPECT_TRUE(std::isnan(q.dist_L1rho));
  EXPECT_EQ(q.lyapunov_F, 0.0);
  EXPECT_EQ(q.dissipation, 0.0);
}
