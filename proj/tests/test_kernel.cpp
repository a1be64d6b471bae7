#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "isoflow/kernel.hpp"

using namespace isoflow;
using std::numbers::pi;

TEST(KernelEval, ClosedFormValues) {
  EXPECT_NEAR(Kernel::gaussian(1.0).eval({0.0, 0.0}), 1.0 / std::sqrt(2 * pi), 1e-15);
  EXPECT_DOUBLE_EQ(Kernel::uniform_ball(1.0).eval({0.5, 0.0}), 0.5);
  EXPECT_DOUBLE_EQ(Kernel::uniform_ball(1.0).eval({1.5, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(Kernel::laplace(1.0).eval({0.0, 0.0}), 0.5);
  EXPECT_NEAR(Kernel::gaussian(1.0, 2).eval({0.0, 0.0}), 1.0 / (2 * pi), 1e-15);
  EXPECT_NEAR(Kernel::laplace(1.0, 2).eval({0.0, 0.0}), 1.0 / (2 * pi), 1e-15);
  EXPECT_NEAR(Kernel::uniform_ball(1.0, 2).eval({0.3, 0.4}), 1.0 / pi, 1e-15);
}

TEST(KernelEval, RadialUnderRotationAndReflection) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-3.0, 3.0), A(0.0, 2 * pi);
  for (const Kernel& k : {Kernel::gaussian(0.7, 2), Kernel::laplace(0.4, 2), Kernel::uniform_ball(2.0, 2)}) {
    for (int i = 0; i < 200; ++i) {
      const Point x{U(rng), U(rng)};
      const double r = norm(x), a = A(rng);
      EXPECT_NEAR(k.eval(x), k.eval({r * std::cos(a), r * std::sin(a)}), 1e-14);
      EXPECT_EQ(k.eval(x), k.eval({-x[0], -x[1]}));
    }
  }
}

TEST(KernelEval, RejectsNonPositiveParameters) {
  EXPECT_THROW(Kernel::gaussian(0.0), ValidationError);
  EXPECT_THROW(Kernel::laplace(-1.0), ValidationError);
  EXPECT_THROW(Kernel::uniform_ball(NAN), ValidationError);
  EXPECT_THROW(Kernel::gaussian(1.0, 3), ValidationError);
}

TEST(KernelMoments, ClosedForms) {
  const auto g = Kernel::gaussian(1.0).moments();
  EXPECT_EQ(g.mass, 1.0);
  EXPECT_EQ(g.mean[0], 0.0);
  EXPECT_EQ(g.second_moment, 1.0);
  EXPECT_NEAR(Kernel::uniform_ball(1.0).moments().second_moment, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(Kernel::laplace(1.0).moments().second_moment, 2.0);
  EXPECT_EQ(Kernel::gaussian(1.0, 2).moments().second_moment, 2.0);
  EXPECT_EQ(Kernel::laplace(0.5, 2).moments().second_moment, 1.5);
  EXPECT_EQ(Kernel::uniform_ball(1.0, 2).moments().second_moment, 0.5);
}

TEST(KernelMoments, TabulatedProfile) {
  // hat profile on [0, 1] with J(0) = 1: mass 2 * 1/2 = 1, second moment 2 * 1/12 = 1/6
  const Kernel hat = Kernel::tabulated({0.0, 1.0}, {1.0, 0.0});
  const auto m = hat.moments();
  EXPECT_NEAR(m.mass, 1.0, 1e-14);
  EXPECT_NEAR(m.second_moment, 1.0 / 6.0, 1e-14);
  EXPECT_GT(m.error_bound, 0.0);
  EXPECT_NEAR(hat.eval({0.25, 0.0}), 0.75, 1e-15);
  EXPECT_THROW(Kernel::tabulated({0.0, 1.0}, {2.0, 0.0}), ValidationError);
  EXPECT_THROW(Kernel::tabulated({0.0, 0.0}, {1.0, 0.0}), ValidationError);
  EXPECT_THROW(Kernel::tabulated({0.1, 1.0}, {1.0, 0.0}), ValidationError);
}

TEST(Discretize, UniformBallRawWeights) {
  const Stencil s = discretize(Kernel::uniform_ball(1.0), 0.5, /*renormalize=*/false);
  EXPECT_EQ(s.reach(), 2);
  EXPECT_DOUBLE_EQ(s.weight(0), 0.25);
  EXPECT_DOUBLE_EQ(s.weight(1), 0.25);
  EXPECT_DOUBLE_EQ(s.weight(-1), 0.25);
  // offsets on the support boundary are halved
  EXPECT_DOUBLE_EQ(s.weight(2), 0.125);
  EXPECT_DOUBLE_EQ(s.weight(-2), 0.125);
  EXPECT_FALSE(s.renormalized());
  const Stencil r = discretize(Kernel::uniform_ball(1.0), 0.5);
  EXPECT_NEAR(r.sum(), 1.0, 1e-15);
}

TEST(Discretize, GaussianTruncationRadiusCoversTailBound) {
  const Stencil s = discretize(Kernel::gaussian(1.0), 0.1, true, 1e-12);
  EXPECT_GE(s.truncation_radius(), 7.0);
  // discarded two-sided tail erfc(R / sqrt 2) stays within the tolerance
  EXPECT_LE(std::erfc(s.truncation_radius() / std::sqrt(2.0)), 1e-12 * (1 + 1e-9));
}

TEST(Discretize, RenormalizedMassIsOneAndWeightsSymmetric) {
  for (const Kernel& k : {Kernel::gaussian(1.0), Kernel::laplace(0.3), Kernel::uniform_ball(1.3),
                          Kernel::gaussian(1.0, 2), Kernel::laplace(0.5, 2), Kernel::uniform_ball(1.0, 2)}) {
    const Stencil s = discretize(k, 0.17);
    EXPECT_NEAR(s.sum(), 1.0, 1e-12) << k.family_name();
    for (const auto& e : s.entries()) {
      EXPECT_GE(e.weight, 0.0);
      EXPECT_EQ(s.weight(-e.offset[0], -e.offset[1]), e.weight);
      if (k.dim() == 2) EXPECT_EQ(s.weight(e.offset[1], e.offset[0]), e.weight);
    }
  }
}

TEST(Discretize, RawMassIsBelowOne) {
  const Stencil s = discretize(Kernel::gaussian(1.0), 0.05, false, 1e-6);
  EXPECT_LE(s.sum(), 1.0 + 1e-12);
  EXPECT_GT(s.sum(), 1.0 - 1e-5);
}

TEST(Discretize, CapAndArguments) {
  EXPECT_THROW(discretize(Kernel::gaussian(1.0), 0.0), ValidationError);
  EXPECT_THROW(discretize(Kernel::gaussian(1.0), 0.1, true, 0.0), ValidationError);
  try {
    discretize(Kernel::gaussian(1.0, 2), 1e-3, true, 1e-12, 1000);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("coarser"), std::string::npos);
  }
}

TEST(StencilSecondMoment, DeltaAndRefinement) {
  EXPECT_EQ(stencil_second_moment(Stencil::delta(1, 0.1), 0.1), 0.0);
  EXPECT_NEAR(stencil_second_moment(discretize(Kernel::gaussian(2.0), 0.05)), 4.0, 1e-9);
  // uniform ball converges to 1/3 at second order
  double prev = 0.0;
  for (double h : {0.1, 0.05, 0.025}) {
    const double err = std::abs(stencil_second_moment(discretize(Kernel::uniform_ball(1.0), h)) - 1.0 / 3.0);
    if (prev > 0.0) EXPECT_GT(std::log2(prev / err), 1.9);
    prev = err;
  }
}

TEST(Stencil, FromEntriesRejectsAsymmetry) {
  EXPECT_THROW(Stencil::from_entries(1, 0.1, {{{1, 0}, 0.5}, {{-1, 0}, 0.4}}, 0.1, false), ValidationError);
  EXPECT_THROW(Stencil::from_entries(1, 0.1, {{{1, 0}, -0.5}, {{-1, 0}, -0.5}}, 0.1, false), ValidationError);
  const Stencil s = Stencil::from_entries(1, 0.1, {{{1, 0}, 0.5}, {{-1, 0}, 0.5}}, 0.1, true);
  EXPECT_EQ(s.reach(), 1);
  EXPECT_EQ(s.weight(0), 0.0);
}
