#include "opint/function.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace opint;

namespace {

FunctionR2 sample_poly() {
  return catalog::trig_poly({{1.0, 0.0, {0.5, 0.0}}, {0.0, 3.0, {0.0, 0.3}}, {-1.2, 1.6, {0.2, -0.1}}});
}

}  // namespace

TEST(Catalog, PlaneWave) {
  const auto f = catalog::plane_wave(1.0, 1.0);
  EXPECT_DOUBLE_EQ(*f.support_radius(), std::sqrt(2.0));
  const auto s = sup_norm(f);
  EXPECT_DOUBLE_EQ(s.lower, 1.0);
  EXPECT_DOUBLE_EQ(s.upper, 1.0);
  EXPECT_NEAR(std::abs(f(0.3, -2.0) - std::exp(kI * (0.3 - 2.0))), 0.0, 1e-15);
}

TEST(Catalog, DilateScalesFrequencies) {
  const auto f = catalog::dilate(catalog::plane_wave(1.0, 0.0), 2.0);
  ASSERT_TRUE(f.has_modes());
  ASSERT_EQ(f.fourier_modes()->size(), 1u);
  EXPECT_DOUBLE_EQ(f.fourier_modes()->front().a, 2.0);
  EXPECT_DOUBLE_EQ(f.fourier_modes()->front().b, 0.0);
  EXPECT_DOUBLE_EQ(*f.support_radius(), 2.0);
  EXPECT_THROW(catalog::dilate(f, 0.0), ValidationError);
}

TEST(Catalog, SumRadiusIsMax) {
  const auto f = catalog::sum(catalog::plane_wave(1.0, 0.0), catalog::plane_wave(0.0, 3.0));
  EXPECT_DOUBLE_EQ(*f.support_radius(), 3.0);
}

TEST(Catalog, EmptyModesIsZero) {
  const auto f = catalog::trig_poly({});
  EXPECT_DOUBLE_EQ(*f.support_radius(), 0.0);
  EXPECT_EQ(f(1.0, 2.0), Complex(0.0, 0.0));
}

TEST(Catalog, ModesMatchEvaluation) {
  const auto f = catalog::scale(catalog::sum(sample_poly(), catalog::dilate(sample_poly(), 0.5)), {2.0, -1.0});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  double rmax = 0;
  for (const auto& m : *f.fourier_modes()) rmax = std::max(rmax, m.radius());
  EXPECT_DOUBLE_EQ(*f.support_radius(), rmax);
  for (int i = 0; i < 200; ++i) {
    const double s = u(rng), t = u(rng);
    Complex direct = 0;
    for (const auto& m : *f.fourier_modes()) direct += m.c * std::exp(kI * (m.a * s + m.b * t));
    const Complex viaparts = Complex(2.0, -1.0) * (sample_poly()(s, t) + sample_poly()(0.5 * s, 0.5 * t));
    EXPECT_LE(std::abs(f(s, t) - direct), 1e-12);
    EXPECT_LE(std::abs(f(s, t) - viaparts), 1e-12);
  }
}

TEST(Catalog, PartialsMatchFiniteDifferences) {
  const std::vector<FunctionR2> fs{sample_poly(), catalog::dilate(sample_poly(), 3.0), catalog::square_x(),
                                   f_sharp(sample_poly()), catalog::dilate(catalog::square_y(), 2.0)};
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3);
  for (const auto& f : fs) {
    for (int i = 0; i < 50; ++i) {
      const double s = u(rng), t = u(rng);
      const Complex fx = oracle::central_difference([&](double v) { return f(v, t); }, s, 1e-5);
      const Complex fy = oracle::central_difference([&](double v) { return f(s, v); }, t, 1e-5);
      const double scale = std::max({1.0, std::abs(fx), std::abs(fy)});
      EXPECT_LE(std::abs(f.partial_x(s, t) - fx), 1e-6 * scale) << f.label();
      EXPECT_LE(std::abs(f.partial_y(s, t) - fy), 1e-6 * scale) << f.label();
    }
  }
}

TEST(DividedDifference, SquareFirstSlot) {
  const auto f = catalog::square_x();
  EXPECT_DOUBLE_EQ(divided_difference_first(f, 1.0, 3.0, 0.7).real(), 4.0);
  EXPECT_DOUBLE_EQ(divided_difference_first(f, 2.0, 2.0, 0.7).real(), 4.0);
}

TEST(DividedDifference, SquareSecondSlot) {
  const auto f = catalog::square_y();
  EXPECT_DOUBLE_EQ(divided_difference_second(f, 0.1, 1.0, 3.0).real(), 4.0);
  EXPECT_DOUBLE_EQ(divided_difference_second(f, 0.1, 2.0, 2.0).real(), 4.0);
}

TEST(DividedDifference, PlaneWaveAgainstDefiningQuotient) {
  const auto f = catalog::plane_wave(1.0, 0.0);
  const double pi = std::numbers::pi;
  const Complex expected = (std::exp(kI * 0.0) - std::exp(kI * pi)) / (0.0 - pi);  // = -2/π
  const Complex got = divided_difference_first(f, 0.0, pi, 0.0);
  EXPECT_NEAR(std::abs(got - expected), 0.0, 1e-15);
  EXPECT_NEAR(got.real(), -2.0 / pi, 1e-15);
}

TEST(DividedDifference, CoincidentWithoutPartialsIsCapabilityError) {
  const FunctionR2 f("opaque", [](double s, double t) { return Complex(s * t); });
  EXPECT_NO_THROW(divided_difference_first(f, 1.0, 2.0, 3.0));
  EXPECT_THROW(divided_difference_first(f, 1.0, 1.0, 3.0), CapabilityError);
  EXPECT_THROW(divided_difference_second(f, 1.0, 2.0, 2.0), CapabilityError);
}

TEST(DividedDifference, SymmetryLinearityAndBounds) {
  const auto f = sample_poly();
  const auto g = catalog::dilate(sample_poly(), 1.7);
  const auto fg = catalog::sum(f, catalog::scale(g, {0.0, 2.0}));
  const double sigma = *f.support_radius();
  const double sup = sup_norm(f, 0).upper;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 500; ++i) {
    const double x1 = u(rng), x2 = u(rng), y = u(rng);
    const Complex a = divided_difference_first(f, x1, x2, y);
    EXPECT_EQ(a, divided_difference_first(f, x2, x1, y));
    EXPECT_EQ(divided_difference_second(f, y, x1, x2), divided_difference_second(f, y, x2, x1));
    const Complex lin = divided_difference_first(f, x1, x2, y) + Complex(0.0, 2.0) * divided_difference_first(g, x1, x2, y);
    EXPECT_LE(std::abs(divided_difference_first(fg, x1, x2, y) - lin), 1e-12 * std::max(1.0, std::abs(lin)));
    // Mean-value bound for bandlimited functions.
    EXPECT_LE(std::abs(a), sigma * sup * (1 + 1e-6));
  }
}

TEST(DividedDifference, ConvergesToPartial) {
  const auto f = sample_poly();
  const double sigma = *f.support_radius();
  const double sup = sup_norm(f, 0).upper;
  const double x = 0.37, y = -1.1;
  for (double gap : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const Complex q = divided_difference_first(f, x - gap / 2, x + gap / 2, y);
    EXPECT_LE(std::abs(q - f.partial_x(x, y)), sigma * sigma * sup * gap);
  }
}

TEST(FSharp, Values) {
  const auto one = f_sharp(catalog::constant(1.0));
  EXPECT_EQ(one(3.0, 0.0), Complex(1.0, 0.0));
  const Complex v = one(3.0, 1.0);
  EXPECT_NEAR(v.real(), 0.5, 1e-16);
  EXPECT_NEAR(v.imag(), 0.5, 1e-16);
  EXPECT_FALSE(one.has_modes());
}

TEST(FSharp, Roundtrip) {
  const auto f = sample_poly();
  const auto fs = f_sharp(f);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double s = u(rng), t = u(rng);
    EXPECT_LE(std::abs(fs(s, t) * Complex(1.0, -t) - f(s, t)), 1e-13);
  }
}

TEST(SupNorm, IntervalBracketsSamples) {
  const auto f = sample_poly();
  const auto s = sup_norm(f, 512);
  EXPECT_LE(s.lower, s.upper);
  EXPECT_DOUBLE_EQ(s.upper, 0.5 + 0.3 + std::abs(Complex(0.2, -0.1)));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 200; ++i) EXPECT_LE(std::abs(f(u(rng), u(rng))), s.upper + 1e-12);
  EXPECT_GT(s.lower, 0.5);  // grid search beats the largest coefficient
  EXPECT_THROW(sup_norm(catalog::coordinate_x()), CapabilityError);
}

TEST(SpecParser, ParsesAndRoundTripsLabels) {
  const auto f = parse_function_spec("sum(plane_wave:1,0, scale(mode:0,3,1,0, 0.5, -2), dilate(const:2, 3))");
  EXPECT_DOUBLE_EQ(*f.support_radius(), 3.0);
  const auto g = parse_function_spec(f.label());
  EXPECT_EQ(g.label(), f.label());
  EXPECT_EQ(f(0.4, 1.3), g(0.4, 1.3));
  const Complex expected = std::exp(kI * 0.4) + Complex(0.5, -2.0) * std::exp(kI * 3.0 * 1.3) + 2.0;
  EXPECT_LE(std::abs(f(0.4, 1.3) - expected), 1e-14);
}

TEST(SpecParser, CoordinateHooksAndSharp) {
  EXPECT_EQ(parse_function_spec("x")(2.0, 5.0), Complex(2.0));
  EXPECT_EQ(parse_function_spec("y2")(2.0, 5.0), Complex(25.0));
  EXPECT_EQ(parse_function_spec("sharp(const:1)")(0.0, 1.0), Complex(0.5, 0.5));
  EXPECT_FALSE(parse_function_spec("sum(x, plane_wave:1,0)").has_modes());
}

TEST(SpecParser, Errors) {
  EXPECT_THROW(parse_function_spec(""), ValidationError);
  EXPECT_THROW(parse_function_spec("plane_wave:1"), ValidationError);
  EXPECT_THROW(parse_function_spec("sum(x"), ValidationError);
  EXPECT_THROW(parse_function_spec("wobble:1,2"), ValidationError);
  EXPECT_THROW(parse_function_spec("x y"), ValidationError);
}
