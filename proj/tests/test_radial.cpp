#include "annulus/modal_field.hpp"
#include "annulus/modal_operators.hpp"
#include "annulus/params.hpp"
#include "annulus/radial_grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

using namespace annulus;

namespace {

Eigen::VectorXd eval(const RadialGrid<double>& g, double (*f)(double)) {
  Eigen::VectorXd v(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) v(i) = f(g.nodes(i));
  return v;
}

template <typename Scalar, typename F>
Vec<Scalar> eval_q(const RadialGrid<Scalar>& g, F f) {
  Vec<Scalar> v(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) v(i) = f(g.nodes(i));
  return v;
}

}  // namespace

TEST(Params, RejectsBadGeometry) {
  EXPECT_NO_THROW(validate(DomainParams{1, 3, 5, 1}));
  for (auto p : {DomainParams{1, 1, 5, 1}, DomainParams{0, 3, 5, 1}, DomainParams{2, 1, 5, 1}}) {
    try {
      validate(p);
      ADD_FAILURE() << "accepted a=" << p.a << " b=" << p.b << " alpha=" << p.alpha;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidGeometry);
    }
  }
  for (auto p : {DomainParams{1, 3, 0, 1}, DomainParams{1, 3, -1, 1}, DomainParams{1, 3, 5, 0}}) {
    try {
      validate(p);
      ADD_FAILURE() << "accepted alpha=" << p.alpha << " mu=" << p.mu;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidPhysics);
    }
  }
  EXPECT_DOUBLE_EQ((DomainParams{1, 3, 5, 1}).sigma(), 3.0);
}

TEST(Grid, NodesAndOrdering) {
  const auto g = build_grid<double>(1.0, 3.0, 16);
  EXPECT_EQ(g.size(), 17);
  EXPECT_DOUBLE_EQ(g.nodes(g.outer()), 3.0);
  EXPECT_DOUBLE_EQ(g.nodes(g.inner()), 1.0);
  for (Eigen::Index i = 1; i < g.size(); ++i) EXPECT_LT(g.nodes(i), g.nodes(i - 1));
  EXPECT_THROW(build_grid<double>(1.0, 3.0, 7), Error);
}

TEST(Grid, DifferentiatesPolynomialsExactly) {
  const auto g = build_grid<double>(1.0, 3.0, 24);
  const Eigen::VectorXd p = eval(g, [](double r) { return std::pow(r, 7) - 3 * r * r + 2; });
  const Eigen::VectorXd dp = eval(g, [](double r) { return 7 * std::pow(r, 6) - 6 * r; });
  const Eigen::VectorXd d2p = eval(g, [](double r) { return 42 * std::pow(r, 5) - 6; });
  EXPECT_LT((g.d1 * p - dp).cwiseAbs().maxCoeff(), 1e-10 * dp.cwiseAbs().maxCoeff());
  EXPECT_LT((g.d2 * p - d2p).cwiseAbs().maxCoeff(), 1e-9 * d2p.cwiseAbs().maxCoeff());
  EXPECT_LT((g.d1 * Eigen::VectorXd::Ones(g.size())).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Grid, QuadratureWeights) {
  const auto g = build_grid<double>(1.0, 3.0, 20);
  // ∫₁³ r^k · r dr = (3^{k+2} − 1)/(k + 2)
  for (int k = 0; k <= 15; ++k) {
    const Eigen::VectorXd f = g.nodes.array().pow(k);
    const double exact = (std::pow(3.0, k + 2) - 1.0) / (k + 2);
    EXPECT_NEAR(integrate_r(g, f), exact, 1e-12 * exact) << "k=" << k;
  }
  EXPECT_NEAR(g.plain_weights.sum(), 2.0, 1e-14);
}

TEST(Grid, InterpolationReproducesPolynomials) {
  const auto g = build_grid<double>(1.0, 3.0, 16);
  const Eigen::VectorXd v = eval(g, [](double r) { return std::pow(r, 5) - r; });
  Eigen::VectorXd pts(4);
  pts << 1.0, 1.37, 2.5, 3.0;
  const Eigen::VectorXd got = interpolate(g, v, pts);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(got(k), std::pow(pts(k), 5) - pts(k), 1e-11);
}

TEST(ModalField, UnitModeIsCosine) {
  const auto g = build_grid<double>(1.0, 3.0, 8);
  // a stored mode carries its conjugate partner, so c₁ = ½ gives cos θ
  ModalField<double> m{1, Eigen::VectorXcd::Constant(g.size(), 0.5)};
  const auto f = synthesize_physical(g, {m}, 16);
  for (Eigen::Index j = 0; j < f.ntheta(); ++j) {
    EXPECT_NEAR(f.values(3, j), std::cos(f.theta(j)), 1e-15);
  }
}

TEST(ModalField, AnalyzeInvertsSynthesize) {
  const auto g = build_grid<double>(1.0, 3.0, 12);
  std::vector<ModalField<double>> modes;
  modes.push_back({0, Eigen::VectorXcd(g.nodes.cast<std::complex<double>>())});
  for (int n = 1; n <= 4; ++n) {
    Eigen::VectorXcd v(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) v(i) = {std::sin(n * g.nodes(i)), std::cos(i + n)};
    modes.push_back({n, v});
  }
  const auto back = analyze_physical(synthesize_physical(g, modes, 10), 4);
  for (int n = 0; n <= 4; ++n) {
    EXPECT_LT((back[n].values - modes[n].values).cwiseAbs().maxCoeff(), 1e-14) << "n=" << n;
  }
}

TEST(ModalField, RotateShiftsTheField) {
  const auto g = build_grid<double>(1.0, 3.0, 10);
  std::vector<ModalField<double>> modes{{1, Eigen::VectorXcd::Constant(g.size(), {0.3, -0.2})},
                                        {3, Eigen::VectorXcd::Constant(g.size(), {0.1, 0.4})}};
  const int nt = 24;
  const double phi = 2.0 * pi<double>() * 5 / nt;
  const auto f = synthesize_physical(g, modes, nt);
  const auto fr = synthesize_physical(g, rotate(modes, phi), nt);
  for (int j = 0; j < nt; ++j) {
    EXPECT_LT((fr.values.col((j + 5) % nt) - f.values.col(j)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Operators, LaplacianKernel) {
  const auto g = build_grid<double>(1.0, 3.0, 32);
  // Δ_n r^n = 0 and Δ_n r^{-n} = 0
  for (int n = 1; n <= 4; ++n) {
    const auto lap = laplacian_n(g, n).matrix;
    const Eigen::VectorXd up = g.nodes.array().pow(n);
    const Eigen::VectorXd um = g.nodes.array().pow(-n);
    EXPECT_LT((lap * up).cwiseAbs().maxCoeff(), 1e-9 * up.cwiseAbs().maxCoeff());
    EXPECT_LT((lap * um).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Operators, BilaplacianKernelInQuad) {
  using std::log;
  const auto g = build_grid<Quad>(Quad(1), Quad(3), 64);
  const Mat<Quad> bilap = bilaplacian_n(g, 1).matrix;
  const std::vector<std::function<Quad(Quad)>> kernel = {
      [](Quad r) { return r * r * r; }, [](Quad r) { return r; }, [](Quad r) { return r * log(r); },
      [](Quad r) { return Quad(1) / r; }};
  for (const auto& u : kernel) {
    const Vec<Quad> v = eval_q(g, u);
    EXPECT_LT(to_double((bilap * v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff()), 1e-8);
  }
}

TEST(Operators, BvpSolvesPoissonWithDirichletRows) {
  // Δ₁u = 3 has u = r² + c₁r + c₂/r; with u(1) = u(3) = 0, c₁ = −13/4 and c₂ = 9/4.
  const auto g = build_grid<double>(1.0, 3.0, 24);
  const auto op = laplacian_n(g, 1);
  const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(g.size(), 3.0);
  const Eigen::VectorXd u = solve_bvp(op.matrix, rhs, dirichlet_bcs(g));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double r = g.nodes(i);
    EXPECT_NEAR(u(i), r * r - 3.25 * r + 2.25 / r, 1e-12);
  }
  const Eigen::VectorXd res = op.matrix * u - rhs;
  EXPECT_LT(res.segment(1, g.size() - 2).cwiseAbs().maxCoeff(), 1e-9 * rhs.cwiseAbs().maxCoeff());
}

TEST(Operators, BvpHonoursBoundaryValues) {
  const auto g = build_grid<double>(1.0, 3.0, 20);
  const auto op = laplacian_n(g, 2);
  const auto bcs = dirichlet_bcs(g);
  const Eigen::VectorXd u = solve_bvp(op.matrix, Eigen::VectorXd::Zero(g.size()), bcs, {2.0, -1.0});
  EXPECT_NEAR(u(g.outer()), 2.0, 1e-12);
  EXPECT_NEAR(u(g.inner()), -1.0, 1e-12);
}

TEST(Operators, SingularSystemIsReported) {
  const auto g = build_grid<double>(1.0, 3.0, 16);
  // the same functional twice cannot determine the solution
  BoundaryConditionSet<double> bcs;
  bcs.rows.push_back({g.outer(), RowVec<double>::Unit(g.size(), g.outer())});
  bcs.rows.push_back({g.inner(), RowVec<double>::Unit(g.size(), g.outer())});
  try {
    BoundaryValueSolver<double> s(laplacian_n(g, 1).matrix, bcs);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularSystem);
  }
}

TEST(Operators, InnerProduct) {
  const auto g = build_grid<double>(1.0, 3.0, 16);
  ModalField<double> f{1, g.nodes.cast<std::complex<double>>()};
  ModalField<double> h{1, g.inv_r.cast<std::complex<double>>()};
  // 2π ∫₁³ r · (1/r) · r dr = 8π
  EXPECT_NEAR(std::abs(inner_product(f, h, g) - std::complex<double>(8 * pi<double>())), 0.0, 1e-12);
  ModalField<double> other{2, h.values};
  EXPECT_EQ(inner_product(f, other, g), std::complex<double>(0));
  const auto ff = inner_product(f, f, g);
  EXPECT_GT(ff.real(), 0.0);
  EXPECT_EQ(ff.imag(), 0.0);
}

TEST(Operators, GeneralizedEigenOnDirichletLaplacian) {
  // −Δ₀ on [1, 2] with Dirichlet walls against the identity: eigenvalues −j_k² scaled, compared with a fine grid.
  const auto coarse = build_grid<double>(1.0, 2.0, 24);
  const auto fine = build_grid<double>(1.0, 2.0, 40);
  auto first = [](const RadialGrid<double>& g) {
    const Eigen::MatrixXd A = laplacian_n(g, 0).matrix;
    const Eigen::MatrixXd B = Eigen::MatrixXd::Identity(g.size(), g.size());
    return generalized_eig<double>(A, B, dirichlet_bcs(g), 1e8).front().value;
  };
  const auto l1 = first(coarse), l2 = first(fine);
  EXPECT_LT(l1.real(), 0.0);
  EXPECT_NEAR(l1.real(), l2.real(), 1e-9 * std::abs(l2.real()));
  EXPECT_NEAR(l1.imag(), 0.0, 1e-9);
  // the k = 1 eigenvalue of the planar problem is −π²; curvature shifts it only slightly
  EXPECT_NEAR(l1.real(), -pi<double>() * pi<double>(), 0.5);
}
