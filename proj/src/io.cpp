#include "lognls/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "lognls/errors.hpp"

namespace lognls {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  Reader(const std::string& data, const std::string& path) : data_(data), path_(path) {}

  std::uint64_t bytes(int n) {
    if (pos_ + n > data_.size()) throw Error(ErrorCode::IoError, path_ + ": truncated snapshot");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += n;
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(bytes(4)); }
  double f64() { return std::bit_cast<double>(bytes(8)); }
  bool done() const { return pos_ == data_.size(); }

 private:
  const std::string& data_;
  const std::string& path_;
  std::size_t pos_ = 4;
};

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& snap) {
  const Grid& g = snap.field.grid();
  std::string out = "NLSF";
  out.reserve(64 + 16 * snap.field.size());
  put_u32(out, kSnapshotVersion);
  put_u32(out, static_cast<std::uint32_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) put_u32(out, static_cast<std::uint32_t>(g.n));
  for (int a = 0; a < g.dim; ++a) put_f64(out, g.half_width);
  put_f64(out, snap.lambda);
  put_f64(out, snap.omega);
  put_f64(out, snap.time);
  for (const auto& v : snap.field.values()) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorCode::IoError, "write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path);
  const std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (data.size() < 4 || data.compare(0, 4, "NLSF") != 0) {
    throw Error(ErrorCode::IoError, path + ": not an NLSF snapshot");
  }
  Reader r(data, path);
  const auto version = r.u32();
  if (version != kSnapshotVersion) throw Error(ErrorCode::IoError, path + ": unsupported snapshot version");
  const auto dim = static_cast<int>(r.u32());
  if (dim != 1 && dim != 2) throw Error(ErrorCode::IoError, path + ": bad dimension");
  int n[2] = {0, 0};
  double L[2] = {0, 0};
  for (int a = 0; a < dim; ++a) n[a] = static_cast<int>(r.u32());
  for (int a = 0; a < dim; ++a) L[a] = r.f64();
  if (dim == 2 && (n[0] != n[1] || L[0] != L[1])) {
    throw Error(ErrorCode::IoError, path + ": anisotropic grids are not supported");
  }
  const Grid grid = Grid::make(dim, n[0], L[0]);
  Snapshot snap{ComplexField(grid), 0.0, 0.0, 0.0};
  snap.lambda = r.f64();
  snap.omega = r.f64();
  snap.time = r.f64();
  for (auto& v : snap.field.values()) {
    const double re = r.f64();
    const double im = r.f64();
    v = Complex(re, im);
  }
  if (!r.done()) throw Error(ErrorCode::IoError, path + ": trailing bytes in snapshot");
  return snap;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header_comments,
               const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (const auto& c : header_comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += fmt17(row[i]);
    }
    out += "\n";
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  f << out;
  if (!f) throw Error(ErrorCode::IoError, "write failed: " + path);
}

void write_profile_csv(const std::string& path, const RadialProfile& profile,
                       const std::vector<std::string>& extra_comments) {
  std::vector<std::string> header = extra_comments;
  header.push_back("family=" + std::string(to_string(profile.model.family)));
  header.push_back("lambda=" + fmt17(profile.model.lambda));
  header.push_back("omega=" + fmt17(profile.model.omega.value_or(std::nan(""))));
  header.push_back("tail_rate=" + fmt17(profile.tail_rate));
  header.push_back("tail_coeff=" + fmt17(profile.tail_coeff));
  header.push_back(std::string("tail_model=") + (profile.dim() == 2 ? "C*exp(-delta*r)/sqrt(r)" : "C*exp(-delta*r)"));
  std::vector<std::vector<double>> rows;
  rows.reserve(profile.r_nodes.size());
  for (std::size_t j = 0; j < profile.r_nodes.size(); ++j) {
    rows.push_back({profile.r_nodes[j], profile.values[j], profile.derivs[j]});
  }
  write_csv(path, header, {"r", "phi", "dphi"}, rows);
}

}  // namespace lognls
