// chstokes: binary state snapshots and CSV series output.
//
// Snapshot format "CHST" version 1 (fixed little-endian layout, 40-byte
// header, then complex doubles in k-major order):
//   bytes 0..3    magic "CHST"
//   u16           format version (1)
//   u16           kind: 1 velocity, 2 scalar at centers, 3 scalar at
//                 nodes, 4 boundary field
//   u32           nx
//   u32           nz
//   u8            flags (bit 0: solenoidal)
//   7 bytes       reserved (zero)
//   f64           a  (channel height)
//   f64           t  (sample time)
// Velocity payload: u1 (nx*nz), then u2 (nx*(nz+1)), then top shear (nx).
// Writers produce byte-identical files for identical states; no
// timestamps or environment data are embedded.
//
// CSV output follows RFC 4180: CRLF line endings, fields quoted when they
// contain separators or quotes; numbers are rendered with %.17g so a
// round trip through text is exact.
#pragma once

#include <string>
#include <vector>

#include "chstokes/field.h"
#include "chstokes/grid.h"

namespace chst {

void write_velocity_snapshot(const std::string& path, const Grid& g,
                             const VelocityField& f);
VelocityField read_velocity_snapshot(const std::string& path, const Grid& g);

void write_scalar_snapshot(const std::string& path, const Grid& g,
                           const SpectralArray& f, double t);
SpectralArray read_scalar_snapshot(const std::string& path, const Grid& g,
                                   double* t_out = nullptr);

// Boundary fields record nx and a only; they may be read back on a grid
// with a different vertical resolution.
void write_boundary_snapshot(const std::string& path, const Grid& g,
                             const BoundaryField& f, double t);
BoundaryField read_boundary_snapshot(const std::string& path, const Grid& g,
                                     double* t_out = nullptr);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& cells);
  static std::string num(double v);  // %.17g
  static std::string num(int v);

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace chst
