#pragma once

/// @file field_io.hpp
/// @brief Binary snapshot format for coefficient fields.
///
/// Layout, all little-endian 64-bit:
///   int64   n_modes
///   float64 period
///   int64   component_count (1 or 3)
///   int64   layout_tag (kLayoutFullSpectrum)
/// then, per component, n^3 coefficients in row-major FFT-order wavenumber
/// layout, each stored as (re, im) float64.

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "nsdamp/field.hpp"

namespace nsdamp {

inline constexpr std::int64_t kLayoutFullSpectrum = 1;

void write_field(std::ostream& os, const VectorFieldK& u);
void write_field(std::ostream& os, const ScalarFieldK& u);
void write_field_file(const std::string& path, const VectorFieldK& u);

/// Reads a 3-component field. The padding factor is not stored; the caller
/// supplies it. Throws ParseError on malformed input.
VectorFieldK read_vector_field(std::istream& is, double pad_factor = 2.0);
ScalarFieldK read_scalar_field(std::istream& is, double pad_factor = 2.0);
VectorFieldK read_field_file(const std::string& path, double pad_factor = 2.0);

}  // namespace nsdamp
