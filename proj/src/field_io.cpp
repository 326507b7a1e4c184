#include "nsdamp/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "nsdamp/errors.hpp"

namespace nsdamp {

namespace {

static_assert(sizeof(double) == 8);

template <class T>
void put(std::ostream& os, T value) {
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, 8);
  os.write(buf, 8);
}

template <class T>
T get(std::istream& is) {
  char buf[8];
  if (!is.read(buf, 8)) throw ParseError("field file truncated");
  std::uint64_t bits;
  std::memcpy(&bits, buf, 8);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

void write_header(std::ostream& os, const TorusGrid& g, std::int64_t components) {
  put<std::int64_t>(os, g.n());
  put<double>(os, g.period());
  put<std::int64_t>(os, components);
  put<std::int64_t>(os, kLayoutFullSpectrum);
}

void write_coeffs(std::ostream& os, const Coeffs& c) {
  for (const auto& v : c) {
    put<double>(os, v.real());
    put<double>(os, v.imag());
  }
}

struct Header {
  TorusGrid grid;
  std::int64_t components;
};

Header read_header(std::istream& is, double pad) {
  const auto n = get<std::int64_t>(is);
  const auto period = get<double>(is);
  const auto comps = get<std::int64_t>(is);
  const auto tag = get<std::int64_t>(is);
  if (tag != kLayoutFullSpectrum) throw ParseError("field file: unknown layout tag");
  if (n < 4 || n > 4096 || n % 2 != 0) throw ParseError("field file: bad mode count");
  if (!(period > 0.0)) throw ParseError("field file: bad period");
  try {
    return {TorusGrid(static_cast<int>(n), period, pad), comps};
  } catch (const std::exception& e) {
    throw ParseError(std::string("field file: ") + e.what());
  }
}

Coeffs read_coeffs(std::istream& is, std::size_t count) {
  Coeffs c(count);
  for (auto& v : c) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    v = {re, im};
  }
  return c;
}

}  // namespace

void write_field(std::ostream& os, const VectorFieldK& u) {
  write_header(os, u.grid(), 3);
  for (const auto& c : u.components()) write_coeffs(os, c);
}

void write_field(std::ostream& os, const ScalarFieldK& u) {
  write_header(os, u.grid(), 1);
  write_coeffs(os, u.coeffs());
}

void write_field_file(const std::string& path, const VectorFieldK& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_field(os, u);
  if (!os) throw std::runtime_error("write failed: " + path);
}

VectorFieldK read_vector_field(std::istream& is, double pad_factor) {
  const auto h = read_header(is, pad_factor);
  if (h.components != 3) throw ParseError("field file: expected 3 components");
  std::array<Coeffs, 3> comps;
  for (auto& c : comps) c = read_coeffs(is, h.grid.size());
  VectorFieldK u(h.grid, std::move(comps));
  u.set_divergence_free(u.check_divergence_free());
  return u;
}

ScalarFieldK read_scalar_field(std::istream& is, double pad_factor) {
  const auto h = read_header(is, pad_factor);
  if (h.components != 1) throw ParseError("field file: expected 1 component");
  return ScalarFieldK(h.grid, read_coeffs(is, h.grid.size()));
}

VectorFieldK read_field_file(const std::string& path, double pad_factor) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open field file " + path);
  return read_vector_field(is, pad_factor);
}

}  // namespace nsdamp
