#include "fracgrad/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace fracgrad {

namespace {

static_assert(std::endian::native == std::endian::little,
              "FSF1 I/O assumes a little-endian host");

void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}

void write_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), 8);
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

double read_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

GridSpec read_header(std::istream& is, const char* magic, const std::string& path) {
  char m[4];
  is.read(m, 4);
  if (!is || std::memcmp(m, magic, 4) != 0)
    throw ValidationError("bad magic in " + path);
  GridSpec spec;
  spec.d = static_cast<int>(read_u32(is));
  spec.n = static_cast<int>(read_u32(is));
  spec.L = read_f64(is);
  if (!is) throw ValidationError("truncated header in " + path);
  spec.validate();
  return spec;
}

}  // namespace

void write_field(const std::string& path, const ScalarField& f) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ValidationError("cannot open " + path + " for writing");
  os.write("FSF1", 4);
  write_u32(os, static_cast<std::uint32_t>(f.spec().d));
  write_u32(os, static_cast<std::uint32_t>(f.spec().n));
  write_f64(os, f.spec().L);
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!os) throw NumericError("short write to " + path);
}

ScalarField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path);
  GridSpec spec = read_header(is, "FSF1", path);
  std::vector<double> values(spec.size());
  is.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!is) throw ValidationError("truncated field data in " + path);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw ValidationError("non-finite value in " + path);
  return ScalarField(spec, std::move(values));
}

void write_mask(const std::string& path, const GridSpec& spec, const Mask& mask) {
  spec.validate();
  if (mask.size() != spec.size()) throw ValidationError("write_mask: mask length mismatch");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ValidationError("cannot open " + path + " for writing");
  os.write("FSM1", 4);
  write_u32(os, static_cast<std::uint32_t>(spec.d));
  write_u32(os, static_cast<std::uint32_t>(spec.n));
  write_f64(os, spec.L);
  os.write(reinterpret_cast<const char*>(mask.data()),
           static_cast<std::streamsize>(mask.size()));
  if (!os) throw NumericError("short write to " + path);
}

std::pair<GridSpec, Mask> read_mask(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open " + path);
  GridSpec spec = read_header(is, "FSM1", path);
  Mask mask(spec.size());
  is.read(reinterpret_cast<char*>(mask.data()), static_cast<std::streamsize>(mask.size()));
  if (!is) throw ValidationError("truncated mask data in " + path);
  for (auto v : mask)
    if (v > 1) throw ValidationError("mask values must be 0 or 1 in " + path);
  return {spec, std::move(mask)};
}

}  // namespace fracgrad
