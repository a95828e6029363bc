// Grid layer tests: transforms, spectral derivatives, staggered vertical
// calculus, and quadrature.  Reference values are computed independently in
// tools/gen_oracle_values.py (exact rational arithmetic where possible) and
// frozen here as literals.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "chstokes/grid.h"

using namespace chst;

namespace {

// Fill an array with reproducible random *physical* point values (real),
// then transform to spectral space.  This guarantees Hermitian symmetry.
SpectralArray random_real_spectral(const Grid& g, int nlev, uint64_t seed) {
  SpectralArray f(g.nx(), nlev);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& v : f.data) v = cplx(dist(rng), 0.0);
  g.to_spectral(f);
  return f;
}

}  // namespace

TEST_CASE("constructor validates shape") {
  CHECK_THROWS_AS(Grid(5, 8, 1.0), ValidationError);   // odd nx
  CHECK_THROWS_AS(Grid(2, 8, 1.0), ValidationError);   // nx too small
  CHECK_THROWS_AS(Grid(8, 3, 1.0), ValidationError);   // nz too small
  CHECK_THROWS_AS(Grid(8, 8, 0.0), ValidationError);   // empty channel
  CHECK_THROWS_AS(Grid(8, 8, -1.0), ValidationError);  // negative height
  CHECK_NOTHROW(Grid(4, 4, 0.5));
}

TEST_CASE("wavenumber map and coordinates") {
  Grid g(8, 8, 1.0);
  CHECK(g.wavenumber(0) == 0);
  CHECK(g.wavenumber(3) == 3);
  CHECK(g.wavenumber(4) == 4);   // Nyquist kept positive by convention
  CHECK(g.wavenumber(5) == -3);
  CHECK(g.wavenumber(7) == -1);
  CHECK(g.dz() == 0.125);
  CHECK(g.z_center(0) == doctest::Approx(0.0625));
  CHECK(g.z_node(8) == doctest::Approx(1.0));
  CHECK(g.x_point(2) == doctest::Approx(Grid::kPi / 2.0));
  CHECK(g.dealias_cutoff() == 2);       // floor(8/3)
  CHECK(Grid(64, 8, 1.0).dealias_cutoff() == 21);
}

TEST_CASE("transform round trip is exact to round-off") {
  Grid g(16, 8, 1.0);
  SpectralArray f = random_real_spectral(g, g.nz(), 2024);
  SpectralArray copy = f;
  g.to_physical(f);
  g.to_spectral(f);
  double err = 0.0;
  for (size_t i = 0; i < f.data.size(); ++i)
    err = std::max(err, std::abs(f.data[i] - copy.data[i]));
  CHECK(err < 1e-14);
}

TEST_CASE("to_physical realizes cos(x) from its two coefficients") {
  Grid g(16, 4, 1.0);
  SpectralArray f = g.make_centers();
  // cos(x) = (e^{ix} + e^{-ix}) / 2 -> coefficient 1/2 at k=1 and k=nx-1.
  for (int j = 0; j < g.nz(); ++j) {
    f.at(1, j) = 0.5;
    f.at(g.nx() - 1, j) = 0.5;
  }
  g.to_physical(f);
  for (int i = 0; i < g.nx(); ++i)
    CHECK(f.at(i, 2).real() == doctest::Approx(std::cos(g.x_point(i))));
}

TEST_CASE("ddx differentiates cos(3x) exactly") {
  Grid g(16, 4, 1.0);
  SpectralArray f = g.make_centers();
  for (int j = 0; j < g.nz(); ++j) {
    f.at(3, j) = 0.5;
    f.at(g.nx() - 3, j) = 0.5;
  }
  SpectralArray d = ddx(g, f);
  g.to_physical(d);
  for (int i = 0; i < g.nx(); ++i)
    CHECK(d.at(i, 1).real() ==
          doctest::Approx(-3.0 * std::sin(3.0 * g.x_point(i))).epsilon(1e-12));
}

TEST_CASE("ddx zeroes the Nyquist mode") {
  Grid g(8, 4, 1.0);
  SpectralArray f = g.make_centers();
  f.at(4, 0) = 1.0;  // Nyquist of nx=8
  SpectralArray d = ddx(g, f);
  CHECK(std::abs(d.at(4, 0)) == 0.0);
}

TEST_CASE("dealias keeps |k| <= floor(nx/3) and kills the rest") {
  Grid g(12, 4, 1.0);  // cutoff = 4, Nyquist = 6
  SpectralArray f = g.make_centers();
  for (auto& v : f.data) v = 1.0;
  dealias_inplace(g, f);
  for (int k = 0; k < g.nx(); ++k) {
    const bool kept = std::abs(g.wavenumber(k)) <= 4 && k != 6;
    CHECK(std::abs(f.at(k, 2)) == (kept ? 1.0 : 0.0));
  }
}

TEST_CASE("enforce_reality restores Hermitian symmetry") {
  Grid g(8, 4, 1.0);
  SpectralArray f = g.make_centers();
  f.at(1, 0) = cplx(1.0, 2.0);
  f.at(7, 0) = cplx(5.0, 5.0);  // inconsistent partner
  CHECK(reality_defect(g, f) > 1.0);
  enforce_reality(g, f);
  CHECK(reality_defect(g, f) < 1e-15);
  // The symmetrized pair averages the two inconsistent values.
  CHECK(f.at(1, 0).real() == doctest::Approx(3.0));
  CHECK(f.at(7, 0) == std::conj(f.at(1, 0)));
}

TEST_CASE("dealiased product reproduces cos(x)*cos(2x) coefficients") {
  // cos(x) cos(2x) = cos(3x)/2 + cos(x)/2; with nx=16 (cutoff 5) no mode is
  // lost, so the product coefficients are exact.
  Grid g(16, 4, 1.0);
  SpectralArray f = g.make_centers(), h = g.make_centers();
  for (int j = 0; j < g.nz(); ++j) {
    f.at(1, j) = 0.5;
    f.at(15, j) = 0.5;
    h.at(2, j) = 0.5;
    h.at(14, j) = 0.5;
  }
  SpectralArray p = dealiased_product(g, f, h);
  CHECK(p.at(1, 2).real() == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(p.at(3, 2).real() == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(std::abs(p.at(0, 2)) < 1e-15);
  CHECK(std::abs(p.at(2, 2)) < 1e-15);
  CHECK(std::abs(p.at(4, 2)) < 1e-15);
  CHECK(reality_defect(g, p) < 1e-15);
}

TEST_CASE("midpoint quadrature of z^2, nz=8") {
  // tools/gen_oracle_values.py: sum_{j=0..7} ((j+1/2)/8)^2 / 8 = 170/512.
  Grid g(8, 8, 1.0);
  SpectralArray f = g.make_centers(), one = g.make_centers();
  for (int j = 0; j < g.nz(); ++j) {
    double z = g.z_center(j);
    f.at(0, j) = z * z;
    one.at(0, j) = 1.0;
  }
  double integral = ip_centers(g, f, one) / (2.0 * Grid::kPi);
  CHECK(integral == doctest::Approx(0.33203125).epsilon(1e-15));
}

TEST_CASE("trapezoid quadrature of z^2, nz=8") {
  // tools/gen_oracle_values.py: (0/2 + sum_{j=1..7}(j/8)^2 + 1/2)/8 = 43/128.
  Grid g(8, 8, 1.0);
  SpectralArray f = g.make_nodes(), one = g.make_nodes();
  for (int j = 0; j <= g.nz(); ++j) {
    double z = g.z_node(j);
    f.at(0, j) = z * z;
    one.at(0, j) = 1.0;
  }
  double integral = ip_nodes(g, f, one) / (2.0 * Grid::kPi);
  CHECK(integral == doctest::Approx(0.3359375).epsilon(1e-15));
}

TEST_CASE("quadrature is Parseval-exact in x: integral of cos^2(3x)") {
  // integral over x in [0,2pi), z in [0,1] of cos(3x)^2 = pi * 1.
  Grid g(16, 8, 1.0);
  SpectralArray f = g.make_centers();
  for (int j = 0; j < g.nz(); ++j) {
    f.at(3, j) = 0.5;
    f.at(13, j) = 0.5;
  }
  CHECK(ip_centers(g, f, f) == doctest::Approx(Grid::kPi).epsilon(1e-14));
}

TEST_CASE("vertical operators: exactness on linear profiles") {
  Grid g(8, 8, 0.7);
  // f(z) = c * z has d/dz = c everywhere; with shear datum c the closures
  // reproduce the derivative exactly at both walls too.
  const double c = 1.7;
  SpectralArray f = g.make_centers();
  std::vector<cplx> shear(g.nx(), cplx(0.0, 0.0));
  shear[0] = c;
  for (int j = 0; j < g.nz(); ++j) f.at(0, j) = c * g.z_center(j);
  CenterClosure bc{&shear};
  SpectralArray d = ddz_center_to_node(g, f, bc);
  for (int j = 0; j <= g.nz(); ++j)
    CHECK(d.at(0, j).real() == doctest::Approx(c).epsilon(1e-13));
  // Average of a linear profile is its midpoint value; the bottom wall node
  // uses the Dirichlet mirror, consistent with f(0) = 0.
  SpectralArray m = avg_center_to_node(g, f, bc);
  for (int j = 0; j <= g.nz(); ++j)
    CHECK(m.at(0, j).real() == doctest::Approx(c * g.z_node(j)).epsilon(1e-12));
}

TEST_CASE("node->center operators on quadratics") {
  Grid g(8, 8, 1.0);
  SpectralArray f = g.make_nodes();
  for (int j = 0; j <= g.nz(); ++j) {
    double z = g.z_node(j);
    f.at(0, j) = z * z;
  }
  SpectralArray d = ddz_node_to_center(g, f);
  for (int j = 0; j < g.nz(); ++j)  // centered difference of z^2 is exact
    CHECK(d.at(0, j).real() ==
          doctest::Approx(2.0 * g.z_center(j)).epsilon(1e-12));
  SpectralArray m = avg_node_to_center(g, f);
  double dz = g.dz();
  for (int j = 0; j < g.nz(); ++j) {
    double zc = g.z_center(j);
    // (z-h)^2/2 + (z+h)^2/2 = z^2 + h^2 with h = dz/2.
    CHECK(m.at(0, j).real() ==
          doctest::Approx(zc * zc + 0.25 * dz * dz).epsilon(1e-12));
  }
}

TEST_CASE("centered node derivative of z^3 at interior nodes") {
  Grid g(8, 8, 1.0);
  SpectralArray f = g.make_nodes();
  for (int j = 0; j <= g.nz(); ++j) {
    double z = g.z_node(j);
    f.at(0, j) = z * z * z;
  }
  SpectralArray d = ddz_centered_nodes(g, f);
  double dz = g.dz();
  for (int j = 1; j < g.nz(); ++j) {
    double z = g.z_node(j);
    // ((z+h)^3 - (z-h)^3) / (2h) = 3 z^2 + h^2.
    CHECK(d.at(0, j).real() ==
          doctest::Approx(3.0 * z * z + dz * dz).epsilon(1e-12));
  }
  CHECK(std::abs(d.at(0, 0)) == 0.0);
  CHECK(std::abs(d.at(0, g.nz())) == 0.0);
}

TEST_CASE("summation by parts: <D g, f>_c = -<g, D f>_n for wall-free g") {
  // The discrete duality behind the skew advection form.  g lives on nodes
  // with zero wall rows; f on centers with an arbitrary shear closure.  The
  // identity holds for any closure because the wall rows of the node-side
  // derivative are multiplied by g's zero wall values.
  Grid g(16, 12, 1.3);
  SpectralArray fn = random_real_spectral(g, g.nz() + 1, 11);
  for (int k = 0; k < g.nx(); ++k) {
    fn.at(k, 0) = 0.0;
    fn.at(k, g.nz()) = 0.0;
  }
  SpectralArray fc = random_real_spectral(g, g.nz(), 12);
  std::vector<cplx> shear(g.nx(), cplx(0.0, 0.0));
  shear[0] = 0.4;
  shear[2] = cplx(0.1, -0.2);
  shear[g.nx() - 2] = std::conj(shear[2]);
  CenterClosure bc{&shear};

  double lhs = ip_centers(g, ddz_node_to_center(g, fn), fc);
  double rhs = -ip_nodes(g, fn, ddz_center_to_node(g, fc, bc));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

  // Averaging adjointness: <A g, f>_c = <g, A f>_n under the same closure.
  double la = ip_centers(g, avg_node_to_center(g, fn), fc);
  double ra = ip_nodes(g, fn, avg_center_to_node(g, fc, bc));
  CHECK(la == doctest::Approx(ra).epsilon(1e-12));
}

TEST_CASE("lincomb helpers") {
  Grid g(8, 4, 1.0);
  SpectralArray x = g.make_centers(), y = g.make_centers();
  x.at(1, 1) = cplx(1.0, 1.0);
  y.at(1, 1) = cplx(2.0, -1.0);
  SpectralArray r = lincomb(cplx(2.0, 0.0), x, cplx(-1.0, 0.0), y);
  CHECK(r.at(1, 1) == cplx(0.0, 3.0));
  axpy(cplx(1.0, 0.0), x, r);
  CHECK(r.at(1, 1) == cplx(1.0, 4.0));
  scale(r, 0.5);
  CHECK(r.at(1, 1) == cplx(0.5, 2.0));
}
