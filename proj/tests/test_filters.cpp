#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cellopt/filters.hpp"

using namespace cellopt;

namespace {

double field_mass(const UnitCellMesh& mesh, const Eigen::VectorXd& rho) {
  double acc = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    acc += mesh.area(t) * (rho[tri[0]] + rho[tri[1]] + rho[tri[2]]) / 3.0;
  }
  return acc;
}

DensityField random_density(const UnitCellMesh& mesh, unsigned seed, double lo,
                            double hi) {
  std::mt19937_64 rng(seed);
  DensityField rho;
  rho.rho_min = 1e-4;
  rho.values.resize(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    double u = double(rng() >> 11) * 0x1.0p-53;
    rho.values[v] = lo + (hi - lo) * u;
  }
  rho.sync_periodic(mesh);
  return rho;
}

}  // namespace

TEST_CASE("constants are fixed points of the Helmholtz filter") {
  auto mesh = build_structured_mesh(8);
  for (double c : {0.3, 0.9}) {
    auto rho = uniform_density(mesh, c);
    auto out = helmholtz_filter(mesh, rho, 0.05);
    for (int v = 0; v < mesh.num_vertices(); ++v)
      CHECK(out.values[v] == doctest::Approx(c).epsilon(1e-10));
  }
}

TEST_CASE("tau = 0 is the identity") {
  auto mesh = build_structured_mesh(8);
  auto rho = random_density(mesh, 3, 0.2, 0.8);
  auto out = helmholtz_filter(mesh, rho, 0.0);
  CHECK((out.values - rho.values).lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK_THROWS_AS(helmholtz_filter(mesh, rho, -0.1), std::invalid_argument);
}

TEST_CASE("a nodal spike keeps its mean and loses its peak") {
  auto mesh = build_structured_mesh(16);
  auto rho = uniform_density(mesh, 1e-4);
  rho.values[mesh.num_vertices() / 2 + 3] = 1.0;  // interior node
  rho.sync_periodic(mesh);
  auto out = helmholtz_filter(mesh, rho, 0.02);
  CHECK(field_mass(mesh, out.values) ==
        doctest::Approx(field_mass(mesh, rho.values)).epsilon(1e-9));
  CHECK(out.values.maxCoeff() < rho.values.maxCoeff());
}

TEST_CASE("Heaviside projection basics") {
  // symmetry point
  for (double beta : {0.5, 2.0, 5.0, 25.0})
    CHECK(heaviside_point(0.5, beta, 0.5) == doctest::Approx(0.5).epsilon(1e-12));

  // beta -> 0 limit approaches the identity
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    double x = double(rng() >> 11) * 0x1.0p-53;
    CHECK(std::abs(heaviside_point(x, 1e-8, 0.5) - x) <= 1e-9);
  }

  // direct evaluation against a long-double reference
  const double beta = 5.0, eta = 0.5, x = 0.8;
  long double a = std::tanh((long double)(beta * eta));
  long double want = (a + std::tanh((long double)(beta * (x - eta)))) /
                     (a + std::tanh((long double)(beta * (1.0 - eta))));
  CHECK(heaviside_point(x, beta, eta) ==
        doctest::Approx((double)want).epsilon(1e-14));

  // endpoints map to themselves
  CHECK(heaviside_point(0.0, 5.0, 0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(heaviside_point(1.0, 5.0, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Heaviside projection is monotone") {
  std::mt19937_64 rng(13);
  for (double beta : {0.0, 1.0, 5.0, 50.0}) {
    std::vector<double> xs(200);
    for (auto& x : xs) x = double(rng() >> 11) * 0x1.0p-53;
    std::sort(xs.begin(), xs.end());
    for (size_t i = 1; i < xs.size(); ++i)
      CHECK(heaviside_point(xs[i], beta, 0.5) >=
            heaviside_point(xs[i - 1], beta, 0.5));
  }
}

TEST_CASE("filters map the admissible interval into itself") {
  auto mesh = build_structured_mesh(8);
  auto rho = random_density(mesh, 17, 1e-4, 1.0);
  auto smooth = helmholtz_filter(mesh, rho, 0.02);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    CHECK(smooth.values[v] >= rho.rho_min);
    CHECK(smooth.values[v] <= 1.0);
  }
  auto sharp = heaviside_filter(mesh, smooth, 5.0, 0.5);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    CHECK(sharp.values[v] >= rho.rho_min);
    CHECK(sharp.values[v] <= 1.0);
  }
}

TEST_CASE("chain derivative is the identity for degenerate parameters") {
  auto mesh = build_structured_mesh(8);
  FilterParams params;
  params.tau = 0.0;
  params.beta = 0.0;
  FilterChain chain(mesh, params, 1e-4);
  auto rho = random_density(mesh, 29, 0.2, 0.8);
  Eigen::VectorXd g = random_density(mesh, 31, -1.0, 1.0).values;
  CHECK((chain.adjoint(rho.values, g) - g).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK((chain.apply(rho.values) - rho.values).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("chain tangent matches central finite differences") {
  auto mesh = build_structured_mesh(8);
  FilterParams params;  // tau 0.02, beta 5
  FilterChain chain(mesh, params, 1e-4);
  auto rho = random_density(mesh, 37, 0.25, 0.75);

  std::mt19937_64 rng(41);
  const double h = 1e-6;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd d(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v)
      d[v] = 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0;
    for (int v = 0; v < mesh.num_vertices(); ++v)
      d[v] = d[mesh.canonical(v)];
    Eigen::VectorXd fd =
        (chain.apply(rho.values + h * d) - chain.apply(rho.values - h * d)) /
        (2.0 * h);
    Eigen::VectorXd an = chain.tangent(rho.values, d);
    CHECK((fd - an).norm() <= 1e-5 * std::max(1.0, an.norm()));
  }
}

TEST_CASE("tangent and adjoint agree as transposes") {
  auto mesh = build_structured_mesh(6);
  FilterParams params;
  FilterChain chain(mesh, params, 1e-4);
  auto rho = random_density(mesh, 43, 0.3, 0.7);
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd v(mesh.num_vertices()), g(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      v[i] = 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0;
      g[i] = 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0;
    }
    for (int i = 0; i < mesh.num_vertices(); ++i) v[i] = v[mesh.canonical(i)];
    const double lhs = g.dot(chain.tangent(rho.values, v));
    const double rhs = chain.adjoint(rho.values, g).dot(v);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("constant directions scale by the average Heaviside slope") {
  auto mesh = build_structured_mesh(8);
  FilterParams params;
  FilterChain chain(mesh, params, 1e-4);
  auto rho = random_density(mesh, 53, 0.3, 0.7);

  Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_vertices());
  Eigen::VectorXd out = chain.tangent(rho.values, ones);

  Eigen::VectorXd rt = chain.smooth(rho.values);
  double slope_mean = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      s += heaviside_slope(rt[tri[i]], params.beta, params.eta);
    slope_mean += mesh.area(t) * s / 3.0;
  }
  slope_mean /= mesh.total_area();
  CHECK(field_mass(mesh, out) ==
        doctest::Approx(slope_mean * field_mass(mesh, ones)).epsilon(1e-9));
}
