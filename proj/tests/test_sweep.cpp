#include "annulus/sweep.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

using namespace annulus;

TEST(Bisection, FindsSignChange) {
  int calls = 0;
  const auto r = bisect_sign([&](double x) { ++calls; return std::tanh(x - 7.123456); }, 5.0, 15.0);
  ASSERT_TRUE(r.flipped);
  EXPECT_LT(r.hi - r.lo, 1e-4);
  EXPECT_LE(r.lo, 7.123456);
  EXPECT_GE(r.hi, 7.123456);
  EXPECT_LE(r.iterations, 40);
  EXPECT_EQ(calls, r.iterations + 2);
  EXPECT_NE(std::signbit(r.f_lo), std::signbit(r.f_hi));
}

TEST(Bisection, SameSignIsNotAnError) {
  const auto r = bisect_sign([](double x) { return -x * x - 1; }, -1.0, 2.0);
  EXPECT_FALSE(r.flipped);
  EXPECT_EQ(r.iterations, 0);
}

TEST(Bisection, IterationCap) {
  const auto r = bisect_sign([](double x) { return x - 0.3; }, 0.0, 1.0, 0.0, 40);
  EXPECT_EQ(r.iterations, 40);
}

TEST(Bisection, ShrunkBracketGivesSameRoot) {
  auto f = [](double x) { return std::sin(x) - 0.2; };
  const auto wide = bisect_sign(f, 0.0, 1.5);
  const double root = 0.5 * (wide.lo + wide.hi);
  const auto narrow = bisect_sign(f, root - 0.01, root + 0.02);
  EXPECT_NEAR(0.5 * (narrow.lo + narrow.hi), root, 1e-4);
}

TEST(SweepSpec, Validation) {
  SweepSpec s;
  EXPECT_NO_THROW(s.validate());
  s.alpha.count = 0;
  EXPECT_THROW(s.validate(), Error);
  s = {};
  s.b.lo = 20;
  EXPECT_THROW(s.validate(), Error);
  s = {};
  s.mu_offset = 0.05;
  EXPECT_THROW(s.validate(), Error);
  s = {};
  s.b.lo = 0.5;
  EXPECT_THROW(s.validate(), Error);
  EXPECT_EQ((SampleRange{4.99, 5.02, 4}).samples().size(), 4u);
  EXPECT_EQ((SampleRange{2, 2, 1}).samples(), std::vector<double>{2});
}

TEST(Sweep, RowMajorAndDeterministic) {
  SweepSpec s;
  s.alpha = {5, 15, 3};
  s.b = {3, 9, 4};
  s.n = 32;
  s.threads = 3;
  const auto rows = sweep_l(s);
  ASSERT_EQ(rows.size(), 12u);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(rows[i * 4 + j].alpha, s.alpha.samples()[i]);
      EXPECT_EQ(rows[i * 4 + j].b, s.b.samples()[j]);
      EXPECT_TRUE(rows[i * 4 + j].ok());
    }
  }
  s.threads = 1;
  const auto again = sweep_l(s);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(std::memcmp(&rows[k].l, &again[k].l, sizeof(double)), 0);
    EXPECT_EQ(rows[k].lambda1, again[k].lambda1);
  }
}

TEST(Sweep, ReferencePointIsSupercritical) {
  const auto row = evaluate_point(1, 5, 3, -1e-4, 48);
  ASSERT_TRUE(row.ok());
  EXPECT_LT(row.l, 0.0);
  EXPECT_GT(row.lambda1, 0.0);
  EXPECT_EQ(row.classification, Classification::Supercritical);
}

TEST(Sweep, FailuresStayInTheirRow) {
  const auto row = evaluate_point(1, 5, 0.5, -1e-4, 32);
  EXPECT_FALSE(row.ok());
  EXPECT_EQ(row.status, "InvalidGeometry");
  EXPECT_TRUE(std::isnan(row.l));
}

TEST(Sweep, ResumeReusesRows) {
  SweepSpec s;
  s.alpha = {5, 6, 2};
  s.b = {4, 5, 2};
  s.n = 32;
  auto previous = sweep_l(s);
  previous[1].l = 42.0;  // marker: reused rows are copied, not recomputed
  previous[2].status = "SolverFailure";
  const auto rows = sweep_l(s, previous);
  EXPECT_EQ(rows[1].l, 42.0);
  EXPECT_TRUE(rows[2].ok());
}

TEST(Sweep, ResolutionStable) {
  for (double b : {5.0, 10.0, 15.0}) {
    const auto lo = evaluate_point(1, 5, b, -1e-4, 48);
    const auto hi = evaluate_point(1, 5, b, -1e-4, 96);
    EXPECT_LT(std::abs(lo.l - hi.l), 1e-4 * std::abs(hi.l)) << "b=" << b;
  }
}

TEST(Boundary, NoFlipIsAResult) {
  SweepSpec s;
  s.alpha = {5, 5, 1};
  s.b = {5, 15, 2};
  s.n = 40;
  const auto pt = boundary_bisect(s, 5.0);
  EXPECT_EQ(pt.status, "ok");
  EXPECT_TRUE(pt.no_flip);
  EXPECT_TRUE(std::isnan(pt.b_star));
  EXPECT_EQ(std::signbit(pt.l_lo), std::signbit(pt.l_hi));
}
