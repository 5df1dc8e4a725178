#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fracadi/bench_harness.hpp"
#include "fracadi/core_model.hpp"
#include "fracadi/errors.hpp"

using namespace fracadi;

namespace {

AxisSpec unit_axis(int n, double mu = 1.5) {
  return AxisSpec(0.0, 1.0, n, FracOrder(mu), constant(1), constant(1), constant(0));
}

}  // namespace

TEST(FracOrder, AcceptsOpenInterval) {
  EXPECT_DOUBLE_EQ(FracOrder(1.5).value(), 1.5);
  EXPECT_NO_THROW(FracOrder(1.0001));
  EXPECT_NO_THROW(FracOrder(1.9999));
}

TEST(FracOrder, RejectsEndpointsAndOutside) {
  for (double v : {1.0, 2.0, 0.5, 2.5, std::nan("")}) EXPECT_THROW(FracOrder{v}, Error) << v;
}

TEST(AxisSpec, RejectsInvalidGeometry) {
  EXPECT_THROW(AxisSpec(1, 0, 4, FracOrder(1.5), constant(1), constant(1), constant(0)), Error);
  EXPECT_THROW(AxisSpec(0, 1, 1, FracOrder(1.5), constant(1), constant(1), constant(0)), Error);
}

TEST(AxisSpec, RejectsNegativeDiffusionAtInteriorNode) {
  auto d = [](double x) { return x - 0.5; };
  EXPECT_THROW(AxisSpec(0, 1, 4, FracOrder(1.5), d, constant(1), constant(0)), Error);
  EXPECT_THROW(AxisSpec(0, 1, 4, FracOrder(1.5), constant(1), d, constant(0)), Error);
  // Negative advection is allowed.
  EXPECT_NO_THROW(AxisSpec(0, 1, 4, FracOrder(1.5), constant(1), constant(1), constant(-3)));
}

TEST(BuildMesh, UnitIntervalFourCells) {
  const auto m = build_mesh(unit_axis(4));
  ASSERT_EQ(m.size(), 5u);
  const double expect[] = {0, 0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(m[i], expect[i]);
}

TEST(BuildMesh, NodeThreeOnZeroToTwo) {
  const AxisSpec a(0, 2, 10, FracOrder(1.5), constant(1), constant(1), constant(0));
  EXPECT_NEAR(build_mesh(a)[3], 0.6, 1e-15);
}

TEST(BuildMesh, FinestTableSpacing) {
  const auto a = unit_axis(160);
  EXPECT_DOUBLE_EQ(a.step(), 1.0 / 160);
  const auto m = build_mesh(a);
  EXPECT_EQ(m.size(), 161u);
  EXPECT_DOUBLE_EQ(m.back(), 1.0);
}

TEST(TimeSpec, StepAndTimes) {
  const TimeSpec t(1.0, 8);
  EXPECT_DOUBLE_EQ(t.tau(), 0.125);
  EXPECT_DOUBLE_EQ(t.at(3), 0.375);
  EXPECT_THROW(TimeSpec(0.0, 4), Error);
  EXPECT_THROW(TimeSpec(1.0, -1), Error);
}

TEST(Field, ShapeAndArithmetic) {
  Field a({2, 3}, 1.0), b({2, 3}, 2.0);
  EXPECT_EQ(a.size(), 6u);
  EXPECT_EQ((a + b).values()[5], 3.0);
  EXPECT_EQ((b - a).values()[0], 1.0);
  EXPECT_EQ((2.0 * b).values()[2], 4.0);
  a.axpy(-0.5, b);
  EXPECT_EQ(a.max_abs(), 0.0);
  EXPECT_THROW(a += Field({3, 2}), DimensionError);
  EXPECT_THROW(Field(std::vector<int>{}), DimensionError);
  EXPECT_THROW(Field({1, 1, 1, 1}), DimensionError);
  EXPECT_THROW(Field({0}), DimensionError);
}

TEST(Field, RequireFiniteNamesIndex) {
  Field f({4});
  f(2) = std::nan("");
  try {
    f.require_finite("probe");
    FAIL();
  } catch (const NonFiniteError& e) {
    EXPECT_NE(std::string(e.what()).find("index 2"), std::string::npos);
  }
}

TEST(Field, ThreeDimensionalIndexIsBijective) {
  Field f({3, 4, 5});
  std::set<std::size_t> seen;
  for (int m = 0; m < 5; ++m)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 3; ++i) {
        const std::size_t k = f.index(i, j, m);
        EXPECT_EQ(k, static_cast<std::size_t>(i + 3 * (j + 4 * m)));
        seen.insert(k);
      }
  EXPECT_EQ(seen.size(), 60u);
  EXPECT_EQ(*seen.rbegin(), 59u);
}

TEST(SampleField, OneDimensionalInitial) {
  Problem p = make_problem(CatalogId::P1d, {}, 4, 1);
  const Field u = sample_field(p, Sample::Initial);
  ASSERT_EQ(u.size(), 3u);
  EXPECT_NEAR(u(0), 0.03515625, 1e-16);
  EXPECT_NEAR(u(1), 0.0625, 1e-16);
  EXPECT_NEAR(u(2), 0.03515625, 1e-16);
}

TEST(SampleField, ZeroFunction) {
  const Field z = sample_function({unit_axis(5), unit_axis(3)}, [](const Point&) { return 0.0; });
  EXPECT_EQ(z.extents(), (std::vector<int>{4, 2}));
  EXPECT_EQ(z.max_abs(), 0.0);
}

TEST(SampleField, ExactAtZeroMatchesInitialFor2d) {
  Problem p = make_problem(CatalogId::P2d, {1.5, 1.4}, 10, 1);
  const Field a = sample_field(p, Sample::Initial);
  const Field b = sample_field(p, Sample::Exact, 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_DOUBLE_EQ(a.values()[k], b.values()[k]);
}

TEST(SampleField, MissingExactIsError) {
  Problem p = make_constant_problem(1, 1.5, 8, 1, 1.0);
  EXPECT_THROW(sample_field(p, Sample::Exact, 0.5), Error);
}

TEST(SampleField, PolynomialRoundTrip) {
  const std::vector<AxisSpec> axes{unit_axis(7), unit_axis(5), unit_axis(4)};
  auto poly = [](const Point& x) { return 1 + 2 * x[0] - x[1] * x[1] + 3 * x[0] * x[1] * x[2]; };
  const Field f = sample_function(axes, poly);
  for (int m = 0; m < 3; ++m)
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 6; ++i) {
        const Point p{(i + 1) / 7.0, (j + 1) / 5.0, (m + 1) / 4.0};
        EXPECT_DOUBLE_EQ(f(i, j, m), poly(p));
      }
}

TEST(ValidateProblem, CatalogProblemsAreValid) {
  for (auto id : {CatalogId::P1d, CatalogId::P2d, CatalogId::P3d, CatalogId::Riesz2d})
    EXPECT_NO_THROW(validate_problem(make_problem(id, {}, 6, 2))) << to_string(id);
}

TEST(ValidateProblem, RejectsNonzeroBoundary) {
  Problem p = make_constant_problem(2, 1.5, 6, 1, 1.0);
  p.initial = [](const Point& x) { return 1.0 + x[0]; };
  EXPECT_THROW(validate_problem(p), Error);
}

TEST(ValidateProblem, RejectsExactInitialMismatch) {
  Problem p = make_problem(CatalogId::P1d, {}, 8, 1);
  p.exact = [](const Point& x, double) { return 2 * x[0] * x[0] * (1 - x[0]) * (1 - x[0]); };
  EXPECT_THROW(validate_problem(p), Error);
}
