// chstokes: Helmholtz projection and the per-mode Stokes resolvent.
//
// Both solvers work mode by mode in the Fourier index k.  Matrices depend
// on k only through k^2 and i*k, so modes k and -k are related by complex
// conjugation; the solvers factorize k = 0..nx/2 once and obtain negative
// modes of real (Hermitian-symmetric) data by conjugate symmetry.
#include "chstokes/elliptic.h"

#include <complex>
#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>

namespace chst {

namespace {

struct TriFactor {
  lapack_int n = 0;
  std::vector<cplx> dl, d, du, du2;
  std::vector<lapack_int> ipiv;

  void factorize() {
    du2.assign(n > 2 ? n - 2 : 0, cplx(0.0, 0.0));
    ipiv.assign(n, 0);
    const lapack_int info = LAPACKE_zgttrf(n, dl.data(), d.data(), du.data(),
                                           du2.data(), ipiv.data());
    CHST_REQUIRE(info == 0, "tridiagonal factorization failed");
  }
  void solve(cplx* b) const {
    const lapack_int info =
        LAPACKE_zgttrs(LAPACK_COL_MAJOR, 'N', n, 1, dl.data(), d.data(),
                       du.data(), du2.data(), ipiv.data(), b, n);
    CHST_REQUIRE(info == 0, "tridiagonal solve failed");
  }
};

struct BandFactor {
  lapack_int n = 0;
  static constexpr lapack_int kl = 3;
  static constexpr lapack_int ku = 3;
  static constexpr lapack_int ldab = 2 * kl + ku + 1;
  std::vector<cplx> ab;  // column-major band storage
  std::vector<lapack_int> ipiv;

  void init(lapack_int n_) {
    n = n_;
    ab.assign(static_cast<size_t>(ldab) * n, cplx(0.0, 0.0));
    ipiv.assign(n, 0);
  }
  cplx& entry(lapack_int i, lapack_int j) {
    // column-major band layout: A(i,j) -> ab[j*ldab + kl + ku + i - j]
    return ab[static_cast<size_t>(j) * ldab + kl + ku + i - j];
  }
  void factorize() {
    const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku,
                                           ab.data(), ldab, ipiv.data());
    CHST_REQUIRE(info == 0, "banded factorization failed");
  }
  void solve(cplx* b) const {
    const lapack_int info =
        LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n, kl, ku, 1, ab.data(), ldab,
                       ipiv.data(), b, n);
    CHST_REQUIRE(info == 0, "banded solve failed");
  }
};

}  // namespace

// ===========================================================================
// HelmholtzProjector
// ===========================================================================

struct HelmholtzProjector::Impl {
  std::vector<TriFactor> tri;  // index kk = 1..nx/2
};

HelmholtzProjector::HelmholtzProjector(const Grid& g)
    : grid_(&g), impl_(new Impl) {
  const int nz = g.nz();
  const double idz2 = 1.0 / (g.dz() * g.dz());
  // The k = 0 and Nyquist columns are handled by exact integration (their
  // horizontal derivative is zero / zeroed by convention), so factorized
  // systems are only needed for 1 <= kk < nx/2.
  impl_->tri.resize(g.nx() / 2 + 1);
  for (int kk = 1; kk < g.nx() / 2; ++kk) {
    TriFactor& t = impl_->tri[kk];
    t.n = nz;
    t.dl.assign(nz - 1, cplx(idz2, 0.0));
    t.du.assign(nz - 1, cplx(idz2, 0.0));
    t.d.assign(nz, cplx(-2.0 * idz2 - kk * static_cast<double>(kk), 0.0));
    // Neumann ghost closures fold into the wall rows.
    t.d.front() = cplx(-idz2 - kk * static_cast<double>(kk), 0.0);
    t.d.back() = cplx(-idz2 - kk * static_cast<double>(kk), 0.0);
    t.factorize();
  }
}

HelmholtzProjector::~HelmholtzProjector() = default;

VelocityField HelmholtzProjector::apply(const VelocityField& f,
                                        SpectralArray* psi_out) const {
  const Grid& g = *grid_;
  const int nx = g.nx();
  const int nz = g.nz();
  const double dz = g.dz();

  VelocityField out = make_zero_field(g);
  out.time = f.time;
  SpectralArray psi = g.make_centers();

  std::vector<cplx> rhs(nz);
  for (int k = 0; k <= nx / 2; ++k) {
    const int kk = g.wavenumber(k);
    const cplx ik(0.0, static_cast<double>(kk));
    if (kk == 0 || k == nx / 2) {
      // k = 0 and the Nyquist column: the horizontal derivative is zero
      // (zeroed by convention at Nyquist, matching ddx), so only the
      // vertical gradient part is removed.  Exact cumulative integration of
      // the divergence; compatibility holds by telescoping of the u2
      // differences.
      std::vector<cplx> dpsi(nz + 1);  // d(psi)/dz at nodes
      dpsi[0] = f.u2.at(k, 0);
      for (int j = 0; j < nz; ++j) {
        const cplx div_j = (f.u2.at(k, j + 1) - f.u2.at(k, j)) / dz;
        dpsi[j + 1] = dpsi[j] + dz * div_j;
      }
      for (int j = 0; j < nz; ++j) out.u1.at(k, j) = f.u1.at(k, j);
      out.u2.at(k, 0) = cplx(0.0, 0.0);
      out.u2.at(k, nz) = cplx(0.0, 0.0);
      for (int j = 1; j < nz; ++j) out.u2.at(k, j) = f.u2.at(k, j) - dpsi[j];
      // psi itself (for the potential output): integrate dpsi, pin the mean.
      cplx acc(0.0, 0.0);
      cplx mean(0.0, 0.0);
      psi.at(k, 0) = acc;
      for (int j = 1; j < nz; ++j) {
        acc += dz * dpsi[j];
        psi.at(k, j) = acc;
        mean += acc;
      }
      mean /= static_cast<double>(nz);
      for (int j = 0; j < nz; ++j) psi.at(k, j) -= mean;
      out.top_shear.coef[k] = f.top_shear.coef[k];  // tangential part zeroed
      continue;
    }

    // rhs = div(f) with the Neumann data folded into the wall rows.
    for (int j = 0; j < nz; ++j)
      rhs[j] = ik * f.u1.at(k, j) + (f.u2.at(k, j + 1) - f.u2.at(k, j)) / dz;
    rhs[0] += f.u2.at(k, 0) / dz;
    rhs[nz - 1] -= f.u2.at(k, nz) / dz;
    impl_->tri[kk].solve(rhs.data());

    for (int j = 0; j < nz; ++j) {
      psi.at(k, j) = rhs[j];
      out.u1.at(k, j) = f.u1.at(k, j) - ik * rhs[j];
    }
    out.u2.at(k, 0) = cplx(0.0, 0.0);
    out.u2.at(k, nz) = cplx(0.0, 0.0);
    for (int j = 1; j < nz; ++j)
      out.u2.at(k, j) = f.u2.at(k, j) - (rhs[j] - rhs[j - 1]) / dz;
    // Tangential derivative of the removed gradient at the top wall:
    // d/dz (d psi / dx)(a) = i k * d(psi)/dz(a) = i k * f2(a).
    out.top_shear.coef[k] = f.top_shear.coef[k] - ik * f.u2.at(k, nz);
  }

  // Negative modes of real data by conjugate symmetry.
  for (int k = nx / 2 + 1; k < nx; ++k) {
    const int mirror = nx - k;
    for (int j = 0; j < nz; ++j) {
      out.u1.at(k, j) = std::conj(out.u1.at(mirror, j));
      psi.at(k, j) = std::conj(psi.at(mirror, j));
    }
    for (int j = 0; j <= nz; ++j)
      out.u2.at(k, j) = std::conj(out.u2.at(mirror, j));
    out.top_shear.coef[k] = std::conj(out.top_shear.coef[mirror]);
  }

  out.solenoidal = true;
  if (psi_out) *psi_out = std::move(psi);
  return out;
}

VelocityField HelmholtzProjector::project(const VelocityField& f) const {
  return apply(f, nullptr);
}

SpectralArray HelmholtzProjector::potential(const VelocityField& f) const {
  SpectralArray psi;
  apply(f, &psi);
  return psi;
}

// ===========================================================================
// StokesResolvent
// ===========================================================================

struct StokesResolvent::Impl {
  TriFactor k0;                   // horizontal momentum at k = 0
  TriFactor nyq;                  // horizontal momentum at the Nyquist mode
  std::vector<BandFactor> bands;  // index kk = 1..nx/2-1
};

StokesResolvent::StokesResolvent(const Grid& g, double lambda, double nu)
    : grid_(&g), lambda_(lambda), nu_(nu), impl_(new Impl) {
  CHST_REQUIRE(lambda >= 0.0, "resolvent shift must be >= 0");
  CHST_REQUIRE(nu > 0.0, "viscosity must be positive");
  const int nz = g.nz();
  const double dz = g.dz();
  const double idz2 = 1.0 / (dz * dz);

  // k = 0: tridiagonal system for u1 alone.
  {
    TriFactor& t = impl_->k0;
    t.n = nz;
    t.dl.assign(nz - 1, cplx(-nu * idz2, 0.0));
    t.du.assign(nz - 1, cplx(-nu * idz2, 0.0));
    t.d.assign(nz, cplx(lambda + 2.0 * nu * idz2, 0.0));
    t.d.front() = cplx(lambda + 3.0 * nu * idz2, 0.0);
    t.d.back() = cplx(lambda + nu * idz2, 0.0);
    t.factorize();
  }

  // Nyquist mode: the first x-derivative is zeroed by convention (see ddx),
  // which decouples u1 from the pressure and forces u2 = 0 just like k = 0;
  // the second x-derivative is well defined, so the k^2 shift stays.
  {
    const double k2 = 0.25 * static_cast<double>(g.nx()) * g.nx();
    TriFactor& t = impl_->nyq;
    t.n = nz;
    t.dl.assign(nz - 1, cplx(-nu * idz2, 0.0));
    t.du.assign(nz - 1, cplx(-nu * idz2, 0.0));
    t.d.assign(nz, cplx(lambda + nu * (k2 + 2.0 * idz2), 0.0));
    t.d.front() = cplx(lambda + nu * (k2 + 3.0 * idz2), 0.0);
    t.d.back() = cplx(lambda + nu * (k2 + idz2), 0.0);
    t.factorize();
  }

  // 1 <= kk < nx/2: coupled banded systems, unknowns (u1_j, p_j, u2_{j+1}).
  impl_->bands.resize(g.nx() / 2 + 1);
  for (int kk = 1; kk < g.nx() / 2; ++kk) {
    BandFactor& bf = impl_->bands[kk];
    bf.init(3 * nz - 1);
    const double k2 = static_cast<double>(kk) * kk;
    const cplx ik(0.0, static_cast<double>(kk));
    for (int j = 0; j < nz; ++j) {
      // Horizontal momentum at center j.
      const int r1 = 3 * j;
      double cj = 2.0;
      if (j == 0) cj = 3.0;            // Dirichlet mirror ghost below
      if (j == nz - 1) cj = 1.0;       // Neumann ghost above (datum in rhs)
      bf.entry(r1, 3 * j) = cplx(lambda + nu * (k2 + cj * idz2), 0.0);
      if (j >= 1) bf.entry(r1, 3 * (j - 1)) = cplx(-nu * idz2, 0.0);
      if (j <= nz - 2) bf.entry(r1, 3 * (j + 1)) = cplx(-nu * idz2, 0.0);
      bf.entry(r1, 3 * j + 1) = ik;

      // Continuity at center j.
      const int r2 = 3 * j + 1;
      bf.entry(r2, 3 * j) = ik;
      if (j <= nz - 2) bf.entry(r2, 3 * j + 2) = cplx(1.0 / dz, 0.0);
      if (j >= 1) bf.entry(r2, 3 * j - 1) = cplx(-1.0 / dz, 0.0);

      // Vertical momentum at node j+1 (interior nodes only).
      if (j <= nz - 2) {
        const int r3 = 3 * j + 2;
        bf.entry(r3, 3 * j + 2) = cplx(lambda + nu * (k2 + 2.0 * idz2), 0.0);
        if (j >= 1) bf.entry(r3, 3 * j - 1) = cplx(-nu * idz2, 0.0);
        if (j <= nz - 3) bf.entry(r3, 3 * j + 5) = cplx(-nu * idz2, 0.0);
        bf.entry(r3, 3 * j + 1) = cplx(-1.0 / dz, 0.0);
        bf.entry(r3, 3 * j + 4) = cplx(1.0 / dz, 0.0);
      }
    }
    bf.factorize();
  }
}

StokesResolvent::~StokesResolvent() = default;

StokesSolution StokesResolvent::solve(const VelocityField& f,
                                      const BoundaryField& g) const {
  const Grid& gr = *grid_;
  const int nx = gr.nx();
  const int nz = gr.nz();
  const double dz = gr.dz();
  CHST_REQUIRE(f.u1.nlev == nz && f.u2.nlev == nz + 1, "rhs layout mismatch");
  CHST_REQUIRE(g.nx == nx, "boundary datum length mismatch");

  StokesSolution sol;
  sol.u = make_zero_field(gr);
  sol.p = gr.make_centers();
  sol.u.time = f.time;

  std::vector<cplx> b(3 * nz - 1);
  for (int k = 0; k <= nx / 2; ++k) {
    const int kk = gr.wavenumber(k);
    if (kk == 0 || k == nx / 2) {
      // u1: tridiagonal heat solve with the shear datum in the top row.
      // The pressure gradient and the continuity coupling vanish for these
      // columns (zeroed first x-derivative), so u2 stays zero and the
      // pressure balances the vertical body force (mean pinned).
      std::vector<cplx> rhs(nz);
      for (int j = 0; j < nz; ++j) rhs[j] = f.u1.at(k, j);
      rhs[nz - 1] += nu_ * g.coef[k] / dz;
      (kk == 0 ? impl_->k0 : impl_->nyq).solve(rhs.data());
      for (int j = 0; j < nz; ++j) sol.u.u1.at(k, j) = rhs[j];
      cplx acc(0.0, 0.0), mean(0.0, 0.0);
      sol.p.at(k, 0) = acc;
      mean += acc;
      for (int j = 1; j < nz; ++j) {
        acc += dz * f.u2.at(k, j);
        sol.p.at(k, j) = acc;
        mean += acc;
      }
      mean /= static_cast<double>(nz);
      for (int j = 0; j < nz; ++j) sol.p.at(k, j) -= mean;
      continue;
    }

    const BandFactor& bf = impl_->bands[kk];
    for (int j = 0; j < nz; ++j) {
      b[3 * j] = f.u1.at(k, j);
      b[3 * j + 1] = cplx(0.0, 0.0);
      if (j <= nz - 2) b[3 * j + 2] = f.u2.at(k, j + 1);
    }
    b[3 * (nz - 1)] += nu_ * g.coef[k] / dz;
    bf.solve(b.data());
    for (int j = 0; j < nz; ++j) {
      sol.u.u1.at(k, j) = b[3 * j];
      sol.p.at(k, j) = b[3 * j + 1];
      if (j <= nz - 2) sol.u.u2.at(k, j + 1) = b[3 * j + 2];
    }
  }

  // Negative modes of real data by conjugate symmetry.
  for (int k = nx / 2 + 1; k < nx; ++k) {
    const int mirror = nx - k;
    for (int j = 0; j < nz; ++j) {
      sol.u.u1.at(k, j) = std::conj(sol.u.u1.at(mirror, j));
      sol.p.at(k, j) = std::conj(sol.p.at(mirror, j));
    }
    for (int j = 1; j < nz; ++j)
      sol.u.u2.at(k, j) = std::conj(sol.u.u2.at(mirror, j));
  }

  sol.u.top_shear.coef = g.coef;
  sol.u.solenoidal = true;
  return sol;
}

StokesSolution StokesResolvent::solve_boundary(const BoundaryField& g) const {
  return solve(make_zero_field(*grid_), g);
}

VelocityField neumann_map(const Grid& g, const BoundaryField& datum,
                          double nu) {
  StokesResolvent steady(g, 0.0, nu);
  return steady.solve_boundary(datum).u;
}

VelocityField stokes_operator_apply(const Grid& g,
                                    const HelmholtzProjector& proj,
                                    const VelocityField& u) {
  const int nx = g.nx();
  const int nz = g.nz();
  const double idz2 = 1.0 / (g.dz() * g.dz());

  VelocityField lap = make_zero_field(g);
  const auto& shear = u.top_shear.coef;
  for (int k = 0; k < nx; ++k) {
    const int kk = g.wavenumber(k);
    const double k2 = static_cast<double>(kk) * kk;
    // Horizontal component at centers (ghost closures at the walls).
    for (int j = 0; j < nz; ++j) {
      cplx dzz;
      if (j == 0) {
        dzz = (-3.0 * u.u1.at(k, 0) + u.u1.at(k, 1)) * idz2;
      } else if (j == nz - 1) {
        dzz = (u.u1.at(k, nz - 2) - u.u1.at(k, nz - 1)) * idz2 +
              shear[k] / g.dz();
      } else {
        dzz = (u.u1.at(k, j - 1) - 2.0 * u.u1.at(k, j) + u.u1.at(k, j + 1)) *
              idz2;
      }
      lap.u1.at(k, j) = -k2 * u.u1.at(k, j) + dzz;
    }
    // Vertical component at interior nodes (walls stay zero).
    for (int j = 1; j < nz; ++j) {
      const cplx dzz =
          (u.u2.at(k, j - 1) - 2.0 * u.u2.at(k, j) + u.u2.at(k, j + 1)) * idz2;
      lap.u2.at(k, j) = -k2 * u.u2.at(k, j) + dzz;
    }
  }
  lap.solenoidal = false;
  VelocityField r = proj.project(lap);
  field_scale(r, -1.0);
  r.time = u.time;
  return r;
}

}  // namespace chst
