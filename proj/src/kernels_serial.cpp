#include "kernels_impl.hpp"

namespace nsdamp::kernels::serial {

using namespace detail;

double pointwise_products(const VelocitySamples& u, const ProductPointers* prod,
                          const DampingPointers* damp, const DampingLaw& law) {
  CompensatedSum total;
  const std::size_t blocks = block_count(u.size);
  for (std::size_t b = 0; b < blocks; ++b) {
    total.add(products_block(u, prod, damp, law, b * kReductionBlock, block_end(b, u.size)));
  }
  return total.value();
}

double assemble_forcing(const ModeTables& t, const ForcingInputs& in,
                        const std::array<const Complex*, 3>& u_hat,
                        const std::array<Complex*, 3>& out) {
  const std::size_t size = static_cast<std::size_t>(t.n) * t.n * t.n;
  CompensatedSum total;
  for (std::size_t b = 0; b < block_count(size); ++b) {
    total.add(forcing_block(t, in, u_hat, out, b * kReductionBlock, block_end(b, size)));
  }
  return total.value();
}

double weighted_sq_sum(const Complex* c, const double* w, std::size_t size) {
  CompensatedSum total;
  for (std::size_t b = 0; b < block_count(size); ++b) {
    total.add(sq_block(c, w, b * kReductionBlock, block_end(b, size)));
  }
  return total.value();
}

double weighted_sq_diff_sum(const Complex* a, const Complex* b, const double* w,
                            std::size_t size) {
  CompensatedSum total;
  for (std::size_t k = 0; k < block_count(size); ++k) {
    total.add(sq_diff_block(a, b, w, k * kReductionBlock, block_end(k, size)));
  }
  return total.value();
}

}  // namespace nsdamp::kernels::serial
