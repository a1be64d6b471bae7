#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "isoflow/medium.hpp"

using namespace isoflow;

TEST(Medium, EvalExamples) {
  EXPECT_EQ(Medium::power_decay(1, 2).eval({0, 0}), 1.0);
  EXPECT_EQ(Medium::power_decay(1, 2).eval({1, 0}), 0.5);
  EXPECT_EQ(Medium::constant(1).eval({123.0, 0}), 1.0);
  EXPECT_NEAR(Medium::gaussian_decay(2, 1).eval({1, 0}), 2 * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(Medium::exponential_decay(1, 2).eval({-2, 0}), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(Medium::power_decay(1, 2, 2).eval({1, 1}), 1.0 / 3.0, 1e-15);
}

TEST(Medium, RejectsBadParameters) {
  EXPECT_THROW(Medium::constant(0), ValidationError);
  EXPECT_THROW(Medium::power_decay(-1, 2), ValidationError);
  EXPECT_THROW(Medium::power_decay(1, -0.5), ValidationError);
  EXPECT_THROW(Medium::gaussian_decay(1, 0), ValidationError);
  EXPECT_THROW(Medium::exponential_decay(1, NAN), ValidationError);
  EXPECT_THROW(Medium::custom({0, 1}, {1, 0}, TailClass::nonintegrable, 0), ValidationError);
  EXPECT_THROW(Medium::custom({0.5, 1}, {1, 1}, TailClass::nonintegrable, 0), ValidationError);
  EXPECT_THROW(Medium::constant(1).floored(0), ValidationError);
}

TEST(Medium, ClassifyExamples) {
  const auto a = Medium::power_decay(1, 2).classify();
  EXPECT_TRUE(a.is_integrable());
  EXPECT_NEAR(a.total_mass, std::numbers::pi, 1e-14);
  ASSERT_TRUE(a.decay_floor);
  EXPECT_EQ(a.decay_floor->eta, 1.0);
  EXPECT_EQ(a.decay_floor->gamma, 2.0);

  const auto b = Medium::constant(1).classify();
  EXPECT_EQ(b.integrable, TailClass::nonintegrable);
  EXPECT_TRUE(std::isinf(b.total_mass));
  ASSERT_TRUE(b.decay_floor);
  EXPECT_EQ(b.decay_floor->gamma, 0.0);

  const auto c = Medium::power_decay(1, 1).classify();
  EXPECT_EQ(c.integrable, TailClass::nonintegrable);
  ASSERT_TRUE(c.decay_floor);
  EXPECT_EQ(c.decay_floor->eta, 1.0);
  EXPECT_EQ(c.decay_floor->gamma, 1.0);

  EXPECT_EQ(Medium::power_decay(1, 2, 2).classify().integrable, TailClass::nonintegrable);
  EXPECT_FALSE(Medium::power_decay(1, 3).classify().decay_floor);
  EXPECT_NEAR(Medium::gaussian_decay(1, 1).classify().total_mass, std::sqrt(2 * std::numbers::pi), 1e-14);
  EXPECT_NEAR(Medium::exponential_decay(1, 1, 2).classify().total_mass, 2 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(Medium::power_decay(1, 4, 2).classify().total_mass, std::numbers::pi * std::numbers::pi / 2, 1e-13);
}

TEST(Medium, CustomTailIsDeclaredNotInferred) {
  const Medium u = Medium::custom({0, 1, 2}, {1, 0.5, 0.25}, TailClass::unknown, 0);
  EXPECT_EQ(u.classify().integrable, TailClass::unknown);
  EXPECT_TRUE(std::isnan(u.classify().total_mass));
  const Medium i = Medium::custom({0, 1}, {1, 1e-3}, TailClass::integrable, 1.0);
  EXPECT_TRUE(i.classify().is_integrable());
  EXPECT_NEAR(i.classify().total_mass, 2 * 0.5 * (1 + 1e-3), 1e-9);
  EXPECT_NEAR(i.eval({0.5, 0}), 0.5005, 1e-15);
  EXPECT_EQ(i.eval({7, 0}), 1e-3);
}

TEST(Medium, FloorExamples) {
  const Medium f = Medium::power_decay(1, 2).floored(0.5);
  EXPECT_EQ(f.eval({0, 0}), 1.0);
  EXPECT_EQ(f.eval({2, 0}), 0.5);
  const Medium c = Medium::constant(1).floored(0.1);
  for (double x : {0.0, 3.0, 100.0}) EXPECT_EQ(c.eval({x, 0}), 1.0);
  EXPECT_EQ(f.floored(0.25).floor_alpha(), 0.5);
  const Medium lo = Medium::power_decay(1, 2).floored(0.1);
  for (double x = 0; x < 20; x += 0.37) EXPECT_GE(f.eval({x, 0}), lo.eval({x, 0}));
  EXPECT_EQ(f.classify().integrable, TailClass::nonintegrable);
}

TEST(Medium, FloorIsExactOnceBelowGridMinimum) {
  const Grid g = Grid::make(1, 5, 51);
  const Medium m = Medium::power_decay(1, 2);
  const Field a = m.sample(g), b = m.floored(0.5 / 26.0).sample(g);
  EXPECT_EQ(a.values, b.values);
}

TEST(Medium, FloorAlphaSequence) {
  EXPECT_EQ(floor_alpha(1.0, 0), 1.0);
  EXPECT_EQ(floor_alpha(1.0, 3), 0.125);
}

TEST(Medium, DecayFloorSoundness) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::exponential_distribution<double> R(0.05);
  const std::vector<Medium> media{Medium::constant(2.5),           Medium::power_decay(1, 0.5),
                                  Medium::power_decay(3, 1),       Medium::power_decay(1, 2),
                                  Medium::power_decay(1, 2, 2),    Medium::gaussian_decay(1, 1).floored(0.2),
                                  Medium::power_decay(1, 2).floored(0.3)};
  for (const auto& m : media) {
    const auto df = m.classify().decay_floor;
    ASSERT_TRUE(df) << m.family_name();
    double worst = INFINITY;
    for (int k = 0; k < 10000; ++k) {
      Point x{R(rng) * (U(rng) < 0 ? -1 : 1), m.dim() == 2 ? R(rng) * U(rng) : 0.0};
      worst = std::min(worst, m.eval(x) * (1 + std::pow(norm(x), df->gamma)));
    }
    EXPECT_GE(worst, df->eta * (1 - 1e-14)) << m.family_name();
  }
}

TEST(WeightedMean, Examples) {
  const Grid g = Grid::make(1, 2000.0, 400001);
  const auto r = weighted_mean(Medium::power_decay(1, 2),
                               Field::from_function(g, [](const Point& x) {
                                 // half weight at the jumps keeps the trapezoid rule second order
                                 if (std::abs(x[0]) < 1e-9 || std::abs(x[0] - 1) < 1e-9) return 0.5;
                                 return x[0] > 0 && x[0] < 1 ? 1.0 : 0.0;
                               }));
  EXPECT_NEAR(r.value, 0.25, 1e-4);

  const Grid h = Grid::make(1, 10.0, 2001);
  const auto s = weighted_mean(Medium::gaussian_decay(1, 1 / std::sqrt(2.0)),
                               Field::from_function(h, [](const Point& x) { return x[0] * x[0]; }));
  EXPECT_NEAR(s.value, 0.5, 1e-12);
  EXPECT_LT(s.tail_bound, 1e-12);

  const auto c = weighted_mean(Medium::exponential_decay(1, 1), Field(h, 3.25));
  EXPECT_NEAR(c.value, 3.25, 1e-14);
}

TEST(WeightedMean, TailBoundCoversTruncation) {
  const Grid g = Grid::make(1, 50.0, 1001);
  const Field u0 = Field::from_function(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  const auto r = weighted_mean(Medium::power_decay(1, 2), u0);
  const double exact = 0.427583576155807;  // e erfc(1)
  EXPECT_LE(std::abs(r.value - exact), r.tail_bound + 1e-6);
}

TEST(WeightedMean, AffineEquivariant) {
  const Grid g = Grid::make(1, 30.0, 601);
  const Medium m = Medium::gaussian_decay(1, 3);
  const Field u0 = Field::from_function(g, [](const Point& x) { return std::sin(x[0]) + 0.1 * x[0]; });
  const Field v0 = Field::from_function(g, [](const Point& x) { return -2.0 * (std::sin(x[0]) + 0.1 * x[0]) + 7.0; });
  EXPECT_NEAR(weighted_mean(m, v0).value, -2.0 * weighted_mean(m, u0).value + 7.0, 1e-12);
}

TEST(WeightedMean, UndefinedForNonintegrable) {
  const Grid g = Grid::make(1, 5.0, 11);
  for (const Medium& m : {Medium::constant(1), Medium::power_decay(1, 1), Medium::power_decay(1, 2).floored(0.1)}) {
    try {
      weighted_mean(m, Field(g, 1.0));
      FAIL();
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find("E_ρ undefined"), std::string::npos);
    }
  }
}
