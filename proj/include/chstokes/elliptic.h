// chstokes: per-mode elliptic solvers on the staggered channel grid.
//
// HelmholtzProjector removes the gradient part of a vector field:
//   P f = f - grad(psi),  laplace(psi) = div(f),  d(psi)/dz = f2 at walls,
// solved mode by mode with a tridiagonal factorization (k != 0) and exact
// cumulative integration (k = 0, with the mean pinned to zero).  The output
// has zero discrete divergence at every center and zero normal component at
// the walls, and the projection is an orthogonal idempotent with respect to
// the staggered quadrature inner product.
//
// StokesResolvent solves, for fixed lambda >= 0 and nu > 0,
//   lambda u - nu laplace(u) + grad(p) = f,   div u = 0,
//   u = 0 at z=0,   u2 = 0 and d(u1)/dz = g at z=a,
// as one banded linear system per Fourier mode (unknowns u1, p at centers
// and u2 at interior nodes, bandwidth 3).  lambda = 1/dt gives the implicit
// step of the time marchers; lambda = 0 gives the steady problem, whose
// solution operator applied to pure boundary data g is the boundary-to-
// domain map used throughout.
#pragma once

#include <memory>
#include <vector>

#include "chstokes/field.h"
#include "chstokes/grid.h"

namespace chst {

class HelmholtzProjector {
 public:
  explicit HelmholtzProjector(const Grid& g);
  ~HelmholtzProjector();
  HelmholtzProjector(const HelmholtzProjector&) = delete;
  HelmholtzProjector& operator=(const HelmholtzProjector&) = delete;

  // Projected field (solenoidal, u2 = 0 at walls, top shear adjusted by
  // the tangential derivative of the removed potential).
  VelocityField project(const VelocityField& f) const;
  // The scalar potential psi at centers (P f = f - grad psi).
  SpectralArray potential(const VelocityField& f) const;

  const Grid& grid() const { return *grid_; }

 private:
  VelocityField apply(const VelocityField& f, SpectralArray* psi_out) const;

  const Grid* grid_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct StokesSolution {
  VelocityField u;
  SpectralArray p;  // centers; k=0 column pinned to zero mean
};

class StokesResolvent {
 public:
  StokesResolvent(const Grid& g, double lambda, double nu);
  ~StokesResolvent();
  StokesResolvent(const StokesResolvent&) = delete;
  StokesResolvent& operator=(const StokesResolvent&) = delete;

  double lambda() const { return lambda_; }
  double nu() const { return nu_; }
  const Grid& grid() const { return *grid_; }

  // Solve with body force f (f.u1 at centers, f.u2 at interior nodes; the
  // wall rows of f.u2 are ignored) and top shear datum g.
  StokesSolution solve(const VelocityField& f, const BoundaryField& g) const;
  // Convenience: pure boundary data, zero body force.
  StokesSolution solve_boundary(const BoundaryField& g) const;

 private:
  const Grid* grid_;
  double lambda_ = 0.0;
  double nu_ = 0.0;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Steady boundary-to-domain map N: top shear datum g -> velocity field
// (the lambda = 0 resolvent with zero body force).  Builds a solver
// internally; loops over many data should construct a StokesResolvent
// once and call solve_boundary.
VelocityField neumann_map(const Grid& g, const BoundaryField& datum,
                          double nu);

// The projected negative Laplacian A u = -P laplace(u) of a solenoidal
// field (the generator of the linear semigroup, with boundary data frozen
// to zero).  Used by the operator-symmetry checks.
VelocityField stokes_operator_apply(const Grid& g,
                                    const HelmholtzProjector& proj,
                                    const VelocityField& u);

}  // namespace chst
