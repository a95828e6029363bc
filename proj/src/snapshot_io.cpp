// chstokes: snapshot and CSV writers.
#include "chstokes/snapshot_io.h"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "chstokes/errors.h"

namespace chst {

namespace {

constexpr uint16_t kFormatVersion = 1;
enum Kind : uint16_t {
  kVelocity = 1,
  kScalarCenters = 2,
  kScalarNodes = 3,
  kBoundary = 4
};

struct Header {
  char magic[4];
  uint16_t version;
  uint16_t kind;
  uint32_t nx;
  uint32_t nz;
  uint8_t flags;
  uint8_t reserved[7];
  double a;
  double t;
};
static_assert(sizeof(Header) == 40, "snapshot header must be 40 bytes");

void write_header(std::ofstream& out, uint16_t kind, const Grid& g,
                  uint8_t flags, double t) {
  Header h{};
  std::memcpy(h.magic, "CHST", 4);
  h.version = kFormatVersion;
  h.kind = kind;
  h.nx = static_cast<uint32_t>(g.nx());
  h.nz = static_cast<uint32_t>(g.nz());
  h.flags = flags;
  h.a = g.a();
  h.t = t;
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
}

Header read_header(std::ifstream& in, const std::string& path) {
  Header h{};
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (!in || std::memcmp(h.magic, "CHST", 4) != 0)
    throw ValidationError("'" + path + "' is not a CHST snapshot");
  if (h.version != kFormatVersion)
    throw ValidationError("'" + path + "' has unsupported format version " +
                          std::to_string(h.version));
  return h;
}

void check_grid(const Header& h, const Grid& g, const std::string& path) {
  if (static_cast<int>(h.nx) != g.nx() || static_cast<int>(h.nz) != g.nz() ||
      h.a != g.a())
    throw ValidationError("'" + path + "' was written on a different grid (" +
                          std::to_string(h.nx) + "x" + std::to_string(h.nz) +
                          ", a=" + std::to_string(h.a) + ")");
}

void write_block(std::ofstream& out, const std::vector<cplx>& data) {
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(cplx)));
}

void read_block(std::ifstream& in, std::vector<cplx>& data,
                const std::string& path) {
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(cplx)));
  if (!in) throw ValidationError("'" + path + "' is truncated");
}

}  // namespace

void write_velocity_snapshot(const std::string& path, const Grid& g,
                             const VelocityField& f) {
  CHST_REQUIRE(f.u1.nlev == g.nz() && f.u2.nlev == g.nz() + 1,
               "field layout mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write snapshot '" + path + "'");
  write_header(out, kVelocity, g, f.solenoidal ? 1 : 0, f.time);
  write_block(out, f.u1.data);
  write_block(out, f.u2.data);
  write_block(out, f.top_shear.coef);
  if (!out) throw ValidationError("short write on snapshot '" + path + "'");
}

VelocityField read_velocity_snapshot(const std::string& path, const Grid& g) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open snapshot '" + path + "'");
  const Header h = read_header(in, path);
  if (h.kind != kVelocity)
    throw ValidationError("'" + path + "' does not hold a velocity state");
  check_grid(h, g, path);
  VelocityField f = make_zero_field(g);
  read_block(in, f.u1.data, path);
  read_block(in, f.u2.data, path);
  read_block(in, f.top_shear.coef, path);
  f.time = h.t;
  f.solenoidal = (h.flags & 1u) != 0;
  return f;
}

void write_scalar_snapshot(const std::string& path, const Grid& g,
                           const SpectralArray& f, double t) {
  const bool nodes = f.nlev == g.nz() + 1;
  CHST_REQUIRE(nodes || f.nlev == g.nz(), "scalar layout mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write snapshot '" + path + "'");
  write_header(out, nodes ? kScalarNodes : kScalarCenters, g, 0, t);
  write_block(out, f.data);
  if (!out) throw ValidationError("short write on snapshot '" + path + "'");
}

SpectralArray read_scalar_snapshot(const std::string& path, const Grid& g,
                                   double* t_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open snapshot '" + path + "'");
  const Header h = read_header(in, path);
  if (h.kind != kScalarCenters && h.kind != kScalarNodes)
    throw ValidationError("'" + path + "' does not hold a scalar field");
  check_grid(h, g, path);
  SpectralArray f =
      (h.kind == kScalarNodes) ? g.make_nodes() : g.make_centers();
  read_block(in, f.data, path);
  if (t_out) *t_out = h.t;
  return f;
}

void write_boundary_snapshot(const std::string& path, const Grid& g,
                             const BoundaryField& f, double t) {
  CHST_REQUIRE(f.nx == g.nx(), "boundary layout mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write snapshot '" + path + "'");
  write_header(out, kBoundary, g, 0, t);
  write_block(out, f.coef);
  if (!out) throw ValidationError("short write on snapshot '" + path + "'");
}

BoundaryField read_boundary_snapshot(const std::string& path, const Grid& g,
                                     double* t_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open snapshot '" + path + "'");
  const Header h = read_header(in, path);
  if (h.kind != kBoundary)
    throw ValidationError("'" + path + "' does not hold a boundary field");
  if (static_cast<int>(h.nx) != g.nx() || h.a != g.a())
    throw ValidationError("'" + path + "' was written for a different circle (" +
                          std::to_string(h.nx) + " modes, a=" +
                          std::to_string(h.a) + ")");
  BoundaryField f(g.nx());
  read_block(in, f.coef, path);
  if (t_out) *t_out = h.t;
  return f;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

struct CsvWriter::Impl {
  std::ofstream out;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->out.open(path, std::ios::binary | std::ios::trunc);
  if (!impl_->out) {
    delete impl_;
    throw ValidationError("cannot write CSV file '" + path + "'");
  }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<std::string>& cells) {
  std::string line;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\r\n") != std::string::npos) {
      line += '"';
      for (const char ch : c) {
        if (ch == '"') line += '"';
        line += ch;
      }
      line += '"';
    } else {
      line += c;
    }
  }
  line += "\r\n";
  impl_->out.write(line.data(), static_cast<std::streamsize>(line.size()));
}

std::string CsvWriter::num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvWriter::num(int v) { return std::to_string(v); }

}  // namespace chst
