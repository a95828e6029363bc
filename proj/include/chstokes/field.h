// chstokes: staggered velocity fields on the periodic channel and the
// discrete vector calculus built on them (norms, divergence, vorticity,
// advection, trilinear form).
//
// A VelocityField holds
//   u1 at centers  (horizontal component; value 0 at z=0, d/dz datum at z=a)
//   u2 at nodes    (vertical component; values at both walls stored, and
//                   equal to 0 for admissible fields)
//   top_shear      (the Neumann closure datum of u1 at z=a, per mode)
//
// Advection is assembled in skew form: the operator is the average of the
// convective form u.grad(v) and the divergence form div(v x u), with all
// vertical products collocated at nodes.  With that placement the discrete
// duality <div(v x u), w> = -<u.grad(w), v> holds exactly (the boundary
// terms vanish because u2 and w2 are zero at the walls), so the induced
// trilinear form b(u,v,w) = <advect(u,v), w> obeys b(u,v,w) = -b(u,w,v)
// to round-off, independent of grid resolution.
#pragma once

#include <cstdint>

#include "chstokes/grid.h"

namespace chst {

struct VelocityField {
  SpectralArray u1;         // centers layout
  SpectralArray u2;         // nodes layout
  BoundaryField top_shear;  // Neumann closure datum for u1 at z=a
  double time = 0.0;
  bool solenoidal = false;  // set by the projector / solvers

  CenterClosure closure() const { return CenterClosure{&top_shear.coef}; }
};

VelocityField make_zero_field(const Grid& g);
// r = a*x + b*y (top shear data combine linearly; solenoidal iff both are).
VelocityField field_lincomb(double a, const VelocityField& x, double b,
                            const VelocityField& y);
void field_scale(VelocityField& f, double alpha);

// --------------------------------------------------------------------------
// Measurements
// --------------------------------------------------------------------------
double inner_l2(const Grid& g, const VelocityField& f, const VelocityField& h);
double norm_l2_sq(const Grid& g, const VelocityField& f);
double norm_l2(const Grid& g, const VelocityField& f);
// Integral of |grad u|^2 (all four first derivatives, each measured on the
// layout where the staggered stencil places it).
double grad_sq(const Grid& g, const VelocityField& f);
double norm_h1(const Grid& g, const VelocityField& f);
// L4 norm by collocation quadrature (u2 averaged to centers first).
double norm_l4(const Grid& g, const VelocityField& f);
// Sup over collocation points of |u| (used by blow-up detection).
double max_pointwise(const Grid& g, const VelocityField& f);

// Discrete divergence at centers: ddx(u1) + ddz(u2).
SpectralArray divergence(const Grid& g, const VelocityField& f);
double divergence_max(const Grid& g, const VelocityField& f);

// Discrete vorticity at nodes: ddx(u2) - ddz(u1).  Interior rows are the
// standard second-order stencil; the wall rows use the ghost closures of u1
// (exact for fields satisfying the boundary conditions, one-sided otherwise).
SpectralArray vorticity(const Grid& g, const VelocityField& f);

// --------------------------------------------------------------------------
// Advection
// --------------------------------------------------------------------------
struct AdvectionTerm {
  SpectralArray c1;  // centers (horizontal momentum tendency)
  SpectralArray c2;  // nodes, wall rows identically zero
};

// Skew-form advection (u.grad v); see header comment.  Dealised products.
AdvectionTerm advect(const Grid& g, const VelocityField& u,
                     const VelocityField& v);

// Pairing of an advection term against a test field.
double pair_advection(const Grid& g, const AdvectionTerm& t,
                      const VelocityField& w);

// b(u, v, w) = <advect(u, v), w>; antisymmetric in (v, w) to round-off.
double trilinear_form(const Grid& g, const VelocityField& u,
                      const VelocityField& v, const VelocityField& w);

// --------------------------------------------------------------------------
// Analytic field samplers
// --------------------------------------------------------------------------
// Stream function psi = amplitude * cos(k x) * (1 - cos(2 pi m z / a)) / 2,
// sampled exactly: u1 = d(psi)/dz at centers, u2 = -d(psi)/dx at nodes.
// Satisfies u=0 at both walls analytically; top_shear carries the analytic
// d(u1)/dz at z=a so the ghost closure matches the continuum field.
VelocityField streamfunction_mode_field(const Grid& g, int k, int m,
                                        double amplitude);

}  // namespace chst
