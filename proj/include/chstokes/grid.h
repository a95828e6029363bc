// chstokes: periodic-channel grid, Fourier transforms in x, and the
// staggered second-order difference calculus in z.
//
// Domain: (x, z) in [0, 2*pi) x [0, a], periodic in x.
// Scalar samples live on one of two vertical layouts:
//   Centers: z_{j+1/2} = (j + 1/2) * dz,  j = 0..nz-1   (nz values)
//   Nodes:   z_j       = j * dz,          j = 0..nz     (nz+1 values)
// with dz = a / nz.
//
// A SpectralArray stores, for every Fourier index k = 0..nx-1 (FFT order)
// and every vertical level j, the complex coefficient c(k, j); storage is
// k-major: data[k * nlev + j].  Real fields satisfy c(nx-k, j) = conj(c(k, j)).
//
// Vertical boundary closures for centers-layout scalars (the horizontal
// velocity component and anything sharing its boundary conditions):
//   bottom ghost  f(-1/2)   = -f(1/2)                  (value 0 at z=0)
//   top ghost     f(nz+1/2) =  f(nz-1/2) + dz*shear(k) (d/dz = shear at z=a)
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "chstokes/errors.h"

// Forward declarations so downstream code does not need fftw3.h.
struct fftw_plan_s;

namespace chst {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// SpectralArray: one scalar component, Fourier in x, collocated in z.
// ---------------------------------------------------------------------------
struct SpectralArray {
  int nx = 0;    // number of Fourier modes == number of x collocation points
  int nlev = 0;  // number of vertical levels (nz for centers, nz+1 for nodes)
  std::vector<cplx> data;  // k-major: data[k * nlev + j]

  SpectralArray() = default;
  SpectralArray(int nx_, int nlev_)
      : nx(nx_), nlev(nlev_), data(static_cast<size_t>(nx_) * nlev_) {}

  cplx& at(int k, int j) { return data[static_cast<size_t>(k) * nlev + j]; }
  const cplx& at(int k, int j) const {
    return data[static_cast<size_t>(k) * nlev + j];
  }
  void fill_zero() { std::fill(data.begin(), data.end(), cplx(0.0, 0.0)); }
  bool same_shape(const SpectralArray& o) const {
    return nx == o.nx && nlev == o.nlev;
  }
};

// In-place linear algebra on identically shaped arrays.
void axpy(cplx alpha, const SpectralArray& x, SpectralArray& y);  // y += a*x
void scale(SpectralArray& x, double alpha);
SpectralArray lincomb(cplx a, const SpectralArray& x, cplx b,
                      const SpectralArray& y);

// ---------------------------------------------------------------------------
// BoundaryField: spectral data on the top boundary circle (one complex
// coefficient per Fourier index).  Used for Neumann data and noise impulses.
// ---------------------------------------------------------------------------
struct BoundaryField {
  int nx = 0;
  std::vector<cplx> coef;  // full spectrum, FFT index order

  BoundaryField() = default;
  explicit BoundaryField(int nx_) : nx(nx_), coef(nx_) {}
  void fill_zero() { std::fill(coef.begin(), coef.end(), cplx(0.0, 0.0)); }
};

BoundaryField lincomb(cplx a, const BoundaryField& x, cplx b,
                      const BoundaryField& y);

// Closure data needed to form vertical ghost values of a centers-layout
// scalar.  `top_shear` points at a full-spectrum coefficient vector
// (length nx) holding the Neumann datum at z = a; the bottom closure is
// always the homogeneous Dirichlet mirror.
struct CenterClosure {
  const std::vector<cplx>* top_shear = nullptr;
};

// ---------------------------------------------------------------------------
// Grid: geometry + FFT plans.  Not copyable; transforms share an internal
// scratch row, so a single Grid must not run transforms from two threads
// concurrently (give each worker thread its own Grid).
// ---------------------------------------------------------------------------
class Grid {
 public:
  Grid(int nx, int nz, double a);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int nx() const { return nx_; }
  int nz() const { return nz_; }
  double a() const { return a_; }
  double dz() const { return dz_; }

  // Fourier index -> signed wavenumber (0..nx/2, then negative).
  int wavenumber(int k_index) const {
    return (k_index <= nx_ / 2) ? k_index : k_index - nx_;
  }
  // Largest |k| kept by dealiasing (2/3 rule): floor(nx/3).
  int dealias_cutoff() const { return nx_ / 3; }

  double x_point(int i) const { return 2.0 * kPi * i / nx_; }
  double z_center(int j) const { return (j + 0.5) * dz_; }
  double z_node(int j) const { return j * dz_; }

  SpectralArray make_centers() const { return SpectralArray(nx_, nz_); }
  SpectralArray make_nodes() const { return SpectralArray(nx_, nz_ + 1); }

  // In-place transforms applied to every vertical level.
  // to_physical: coefficients -> point values (unnormalized inverse DFT),
  // to_spectral: point values -> coefficients (forward DFT scaled by 1/nx).
  void to_physical(SpectralArray& f) const;
  void to_spectral(SpectralArray& f) const;

  static constexpr double kPi = 3.14159265358979323846;

 private:
  int nx_ = 0;
  int nz_ = 0;
  double a_ = 0.0;
  double dz_ = 0.0;
  mutable std::vector<cplx> row_;  // contiguous scratch for one k-row sweep
  fftw_plan_s* fwd_ = nullptr;
  fftw_plan_s* bwd_ = nullptr;
};

// ---------------------------------------------------------------------------
// Horizontal (spectral) operators.
// ---------------------------------------------------------------------------

// d/dx: multiply mode k by i*k; the Nyquist mode is zeroed (its derivative
// has no consistent real representative).
void ddx_inplace(const Grid& g, SpectralArray& f);
SpectralArray ddx(const Grid& g, const SpectralArray& f);

// Zero all modes with |wavenumber| > cutoff (and the Nyquist mode).
void dealias_inplace(const Grid& g, SpectralArray& f);

// Restore exact Hermitian symmetry c(nx-k) = conj(c(k)).
void enforce_reality(const Grid& g, SpectralArray& f);
// Max deviation from Hermitian symmetry (diagnostic).
double reality_defect(const Grid& g, const SpectralArray& f);

// Dealiased pointwise product: both factors are dealiased, multiplied at
// the x collocation points level-by-level, transformed back and dealiased
// again.  Inputs must share the vertical layout.
SpectralArray dealiased_product(const Grid& g, const SpectralArray& f,
                                const SpectralArray& h);

// ---------------------------------------------------------------------------
// Vertical difference/average operators (second order, staggered).
// ---------------------------------------------------------------------------

// d/dz of a centers scalar, result on nodes 0..nz (boundary rows use the
// ghost closures described at the top of this header).
SpectralArray ddz_center_to_node(const Grid& g, const SpectralArray& f,
                                 const CenterClosure& bc);
// d/dz of a nodes scalar, result on centers (no closure needed).
SpectralArray ddz_node_to_center(const Grid& g, const SpectralArray& f);
// Two-point average: centers -> nodes (ghost closures at the walls).
SpectralArray avg_center_to_node(const Grid& g, const SpectralArray& f,
                                 const CenterClosure& bc);
// Two-point average: nodes -> centers.
SpectralArray avg_node_to_center(const Grid& g, const SpectralArray& f);
// Centered d/dz on nodes: (f(j+1) - f(j-1)) / (2 dz) at interior nodes,
// wall rows set to zero (callers only use interior rows).
SpectralArray ddz_centered_nodes(const Grid& g, const SpectralArray& f);

// ---------------------------------------------------------------------------
// Quadrature inner products (real L2 pairings of real fields given
// spectrally).  Centers use the midpoint rule, nodes the trapezoid rule;
// both are exact in x by Parseval.
// ---------------------------------------------------------------------------
double ip_centers(const Grid& g, const SpectralArray& f,
                  const SpectralArray& h);
double ip_nodes(const Grid& g, const SpectralArray& f, const SpectralArray& h);

}  // namespace chst
