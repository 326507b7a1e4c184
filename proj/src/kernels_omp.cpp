#include <vector>

#include "kernels_impl.hpp"

namespace nsdamp::kernels::omp {

using namespace detail;

namespace {

// Runs body(b) for every block in parallel and sums the partials in block order.
template <class Body>
double blocked_sum(std::size_t size, Body&& body) {
  const auto blocks = static_cast<std::ptrdiff_t>(block_count(size));
  std::vector<double> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const auto ub = static_cast<std::size_t>(b);
    partial[ub] = body(ub * kReductionBlock, block_end(ub, size));
  }
  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

}  // namespace

double pointwise_products(const VelocitySamples& u, const ProductPointers* prod,
                          const DampingPointers* damp, const DampingLaw& law) {
  return blocked_sum(u.size, [&](std::size_t begin, std::size_t end) {
    return products_block(u, prod, damp, law, begin, end);
  });
}

double assemble_forcing(const ModeTables& t, const ForcingInputs& in,
                        const std::array<const Complex*, 3>& u_hat,
                        const std::array<Complex*, 3>& out) {
  const std::size_t size = static_cast<std::size_t>(t.n) * t.n * t.n;
  return blocked_sum(size, [&](std::size_t begin, std::size_t end) {
    return forcing_block(t, in, u_hat, out, begin, end);
  });
}

double weighted_sq_sum(const Complex* c, const double* w, std::size_t size) {
  return blocked_sum(size, [&](std::size_t begin, std::size_t end) {
    return sq_block(c, w, begin, end);
  });
}

double weighted_sq_diff_sum(const Complex* a, const Complex* b, const double* w,
                            std::size_t size) {
  return blocked_sum(size, [&](std::size_t begin, std::size_t end) {
    return sq_diff_block(a, b, w, begin, end);
  });
}

}  // namespace nsdamp::kernels::omp
