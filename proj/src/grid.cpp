// chstokes: grid, transforms, and staggered vertical calculus.
#include "chstokes/grid.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

namespace chst {

namespace {
// The FFTW planner is not thread-safe; serialize plan creation/destruction.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

// ---------------------------------------------------------------------------
// SpectralArray / BoundaryField arithmetic
// ---------------------------------------------------------------------------

void axpy(cplx alpha, const SpectralArray& x, SpectralArray& y) {
  CHST_REQUIRE(x.same_shape(y), "axpy shape mismatch");
  for (size_t i = 0; i < x.data.size(); ++i) y.data[i] += alpha * x.data[i];
}

void scale(SpectralArray& x, double alpha) {
  for (auto& c : x.data) c *= alpha;
}

SpectralArray lincomb(cplx a, const SpectralArray& x, cplx b,
                      const SpectralArray& y) {
  CHST_REQUIRE(x.same_shape(y), "lincomb shape mismatch");
  SpectralArray r(x.nx, x.nlev);
  for (size_t i = 0; i < x.data.size(); ++i)
    r.data[i] = a * x.data[i] + b * y.data[i];
  return r;
}

BoundaryField lincomb(cplx a, const BoundaryField& x, cplx b,
                      const BoundaryField& y) {
  CHST_REQUIRE(x.nx == y.nx, "boundary lincomb shape mismatch");
  BoundaryField r(x.nx);
  for (int k = 0; k < x.nx; ++k) r.coef[k] = a * x.coef[k] + b * y.coef[k];
  return r;
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

Grid::Grid(int nx, int nz, double a) : nx_(nx), nz_(nz), a_(a) {
  // These come straight from user configuration, so they are validation
  // failures rather than broken internal contracts.
  if (nx < 4 || nx % 2 != 0)
    throw ValidationError("grid.nx must be even and >= 4");
  if (nz < 4) throw ValidationError("grid.nz must be >= 4");
  if (!(a > 0.0)) throw ValidationError("grid.a must be positive");
  dz_ = a_ / nz_;
  row_.resize(nx_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto* p = reinterpret_cast<fftw_complex*>(row_.data());
  fwd_ = fftw_plan_dft_1d(nx_, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_1d(nx_, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  CHST_REQUIRE(fwd_ != nullptr && bwd_ != nullptr, "FFT plan creation failed");
}

Grid::~Grid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(fwd_);
  if (bwd_) fftw_destroy_plan(bwd_);
}

void Grid::to_physical(SpectralArray& f) const {
  CHST_REQUIRE(f.nx == nx_, "to_physical: nx mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(row_.data());
  for (int j = 0; j < f.nlev; ++j) {
    for (int k = 0; k < nx_; ++k) row_[k] = f.at(k, j);
    fftw_execute_dft(bwd_, p, p);
    for (int k = 0; k < nx_; ++k) f.at(k, j) = row_[k];
  }
}

void Grid::to_spectral(SpectralArray& f) const {
  CHST_REQUIRE(f.nx == nx_, "to_spectral: nx mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(row_.data());
  const double inv = 1.0 / nx_;
  for (int j = 0; j < f.nlev; ++j) {
    for (int k = 0; k < nx_; ++k) row_[k] = f.at(k, j);
    fftw_execute_dft(fwd_, p, p);
    for (int k = 0; k < nx_; ++k) f.at(k, j) = row_[k] * inv;
  }
}

// ---------------------------------------------------------------------------
// Horizontal operators
// ---------------------------------------------------------------------------

void ddx_inplace(const Grid& g, SpectralArray& f) {
  CHST_REQUIRE(f.nx == g.nx(), "ddx: nx mismatch");
  const int nyq = g.nx() / 2;
  for (int k = 0; k < g.nx(); ++k) {
    const int kk = g.wavenumber(k);
    const cplx factor = (kk == nyq) ? cplx(0.0, 0.0) : cplx(0.0, kk);
    for (int j = 0; j < f.nlev; ++j) f.at(k, j) *= factor;
  }
}

SpectralArray ddx(const Grid& g, const SpectralArray& f) {
  SpectralArray r = f;
  ddx_inplace(g, r);
  return r;
}

void dealias_inplace(const Grid& g, SpectralArray& f) {
  CHST_REQUIRE(f.nx == g.nx(), "dealias: nx mismatch");
  const int cut = g.dealias_cutoff();
  for (int k = 0; k < g.nx(); ++k) {
    if (std::abs(g.wavenumber(k)) <= cut) continue;
    for (int j = 0; j < f.nlev; ++j) f.at(k, j) = cplx(0.0, 0.0);
  }
}

void enforce_reality(const Grid& g, SpectralArray& f) {
  CHST_REQUIRE(f.nx == g.nx(), "enforce_reality: nx mismatch");
  const int nx = g.nx();
  for (int j = 0; j < f.nlev; ++j) {
    f.at(0, j) = cplx(f.at(0, j).real(), 0.0);
    f.at(nx / 2, j) = cplx(f.at(nx / 2, j).real(), 0.0);
    for (int k = 1; k < nx / 2; ++k) {
      const cplx avg = 0.5 * (f.at(k, j) + std::conj(f.at(nx - k, j)));
      f.at(k, j) = avg;
      f.at(nx - k, j) = std::conj(avg);
    }
  }
}

double reality_defect(const Grid& g, const SpectralArray& f) {
  const int nx = g.nx();
  double worst = 0.0;
  for (int j = 0; j < f.nlev; ++j) {
    worst = std::max(worst, std::abs(f.at(0, j).imag()));
    worst = std::max(worst, std::abs(f.at(nx / 2, j).imag()));
    for (int k = 1; k < nx / 2; ++k)
      worst = std::max(worst, std::abs(f.at(k, j) - std::conj(f.at(nx - k, j))));
  }
  return worst;
}

SpectralArray dealiased_product(const Grid& g, const SpectralArray& f,
                                const SpectralArray& h) {
  CHST_REQUIRE(f.same_shape(h), "product shape mismatch");
  SpectralArray a = f;
  SpectralArray b = h;
  dealias_inplace(g, a);
  dealias_inplace(g, b);
  g.to_physical(a);
  g.to_physical(b);
  for (size_t i = 0; i < a.data.size(); ++i) a.data[i] *= b.data[i];
  g.to_spectral(a);
  dealias_inplace(g, a);
  enforce_reality(g, a);
  return a;
}

// ---------------------------------------------------------------------------
// Vertical operators
// ---------------------------------------------------------------------------

namespace {
inline const std::vector<cplx>& shear_of(const Grid& g,
                                         const CenterClosure& bc) {
  CHST_REQUIRE(bc.top_shear != nullptr, "closure needs a top shear datum");
  CHST_REQUIRE(static_cast<int>(bc.top_shear->size()) == g.nx(),
               "top shear length != nx");
  return *bc.top_shear;
}
}  // namespace

SpectralArray ddz_center_to_node(const Grid& g, const SpectralArray& f,
                                 const CenterClosure& bc) {
  CHST_REQUIRE(f.nlev == g.nz(), "ddz_center_to_node wants centers layout");
  const auto& shear = shear_of(g, bc);
  const int nz = g.nz();
  const double idz = 1.0 / g.dz();
  SpectralArray r = g.make_nodes();
  for (int k = 0; k < g.nx(); ++k) {
    // bottom: (f(1/2) - ghost)/dz with ghost = -f(1/2)
    r.at(k, 0) = 2.0 * f.at(k, 0) * idz;
    for (int j = 1; j < nz; ++j)
      r.at(k, j) = (f.at(k, j) - f.at(k, j - 1)) * idz;
    // top: ghost = f(nz-1/2) + dz*shear, so the difference is exactly shear
    r.at(k, nz) = shear[k];
  }
  return r;
}

SpectralArray ddz_node_to_center(const Grid& g, const SpectralArray& f) {
  CHST_REQUIRE(f.nlev == g.nz() + 1, "ddz_node_to_center wants nodes layout");
  const int nz = g.nz();
  const double idz = 1.0 / g.dz();
  SpectralArray r = g.make_centers();
  for (int k = 0; k < g.nx(); ++k)
    for (int j = 0; j < nz; ++j)
      r.at(k, j) = (f.at(k, j + 1) - f.at(k, j)) * idz;
  return r;
}

SpectralArray avg_center_to_node(const Grid& g, const SpectralArray& f,
                                 const CenterClosure& bc) {
  CHST_REQUIRE(f.nlev == g.nz(), "avg_center_to_node wants centers layout");
  const auto& shear = shear_of(g, bc);
  const int nz = g.nz();
  SpectralArray r = g.make_nodes();
  for (int k = 0; k < g.nx(); ++k) {
    // bottom: (ghost + f(1/2))/2 = 0 by the Dirichlet mirror
    r.at(k, 0) = cplx(0.0, 0.0);
    for (int j = 1; j < nz; ++j)
      r.at(k, j) = 0.5 * (f.at(k, j) + f.at(k, j - 1));
    // top: (f(nz-1/2) + ghost)/2 = f(nz-1/2) + dz*shear/2
    r.at(k, nz) = f.at(k, nz - 1) + 0.5 * g.dz() * shear[k];
  }
  return r;
}

SpectralArray avg_node_to_center(const Grid& g, const SpectralArray& f) {
  CHST_REQUIRE(f.nlev == g.nz() + 1, "avg_node_to_center wants nodes layout");
  const int nz = g.nz();
  SpectralArray r = g.make_centers();
  for (int k = 0; k < g.nx(); ++k)
    for (int j = 0; j < nz; ++j)
      r.at(k, j) = 0.5 * (f.at(k, j + 1) + f.at(k, j));
  return r;
}

SpectralArray ddz_centered_nodes(const Grid& g, const SpectralArray& f) {
  CHST_REQUIRE(f.nlev == g.nz() + 1, "ddz_centered_nodes wants nodes layout");
  const int nz = g.nz();
  const double i2dz = 0.5 / g.dz();
  SpectralArray r = g.make_nodes();
  for (int k = 0; k < g.nx(); ++k) {
    r.at(k, 0) = cplx(0.0, 0.0);
    for (int j = 1; j < nz; ++j)
      r.at(k, j) = (f.at(k, j + 1) - f.at(k, j - 1)) * i2dz;
    r.at(k, nz) = cplx(0.0, 0.0);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

double ip_centers(const Grid& g, const SpectralArray& f,
                  const SpectralArray& h) {
  CHST_REQUIRE(f.same_shape(h) && f.nlev == g.nz(), "ip_centers layout");
  double s = 0.0;
  for (size_t i = 0; i < f.data.size(); ++i)
    s += (f.data[i] * std::conj(h.data[i])).real();
  return 2.0 * Grid::kPi * g.dz() * s;
}

double ip_nodes(const Grid& g, const SpectralArray& f, const SpectralArray& h) {
  CHST_REQUIRE(f.same_shape(h) && f.nlev == g.nz() + 1, "ip_nodes layout");
  const int nz = g.nz();
  double s = 0.0;
  for (int k = 0; k < g.nx(); ++k) {
    s += 0.5 * (f.at(k, 0) * std::conj(h.at(k, 0))).real();
    for (int j = 1; j < nz; ++j) s += (f.at(k, j) * std::conj(h.at(k, j))).real();
    s += 0.5 * (f.at(k, nz) * std::conj(h.at(k, nz))).real();
  }
  return 2.0 * Grid::kPi * g.dz() * s;
}

}  // namespace chst
