#include "nsdamp/grid.hpp"

#include <string>

#include "nsdamp/errors.hpp"
#include "nsdamp/text.hpp"

namespace nsdamp {

TorusGrid::TorusGrid(int n, double period, double pad_factor)
    : n_(n), period_(period), pad_(pad_factor), padded_n_(0) {
  if (n < 4 || n % 2 != 0) {
    throw DomainError("grid: n_modes must be even and >= 4, got " + std::to_string(n));
  }
  if (!(period > 0.0)) throw DomainError("grid: period must be positive");
  if (pad_factor != 1.0 && pad_factor != 1.5 && pad_factor != 2.0) {
    throw DomainError("grid: pad_factor must be 1, 1.5 or 2, got " + text::format_double(pad_factor));
  }
  const double padded = pad_factor * n;
  padded_n_ = static_cast<int>(padded);
  if (padded_n_ != padded || padded_n_ % 2 != 0) {
    throw DomainError("grid: pad_factor * n must be an even integer");
  }
}

}  // namespace nsdamp
