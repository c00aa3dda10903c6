#include "envelope/snapshot_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "envelope/format.hpp"

namespace envelope {

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& is, const std::filesystem::path& path) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("truncated snapshot: " + path.string());
  return v;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const SpectralField& f, double t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  put<std::int64_t>(os, f.size());
  put<std::int64_t>(os, f.n());
  put<double>(os, t);
  for (const cplx& c : f.data()) {
    put<double>(os, c.real());
    put<double>(os, c.imag());
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path, double length) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  const auto N = get<std::int64_t>(is, path);
  const auto n = get<std::int64_t>(is, path);
  if (N < 2 || N > (1 << 26) || n < 1 || n > 64) throw std::runtime_error("bad snapshot header: " + path.string());
  Snapshot s{SpectralField(Grid(length, static_cast<int>(N)), static_cast<int>(n)), get<double>(is, path)};
  for (cplx& c : s.field.data()) {
    const double re = get<double>(is, path);
    c = cplx(re, get<double>(is, path));
  }
  return s;
}

void write_snapshot_csv(const std::filesystem::path& path, const SpectralField& f, double t) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "# t=" << fmt17(t) << "\nmode,k,component,re,im\n";
  for (int i = 0; i < f.size(); ++i) {
    for (int c = 0; c < f.n(); ++c) {
      const cplx v = f.at(i)[c];
      os << f.grid().mode(i) << ',' << fmt17(f.grid().k(i)) << ',' << c << ',' << fmt17(v.real()) << ','
         << fmt17(v.imag()) << '\n';
    }
  }
}

}  // namespace envelope
