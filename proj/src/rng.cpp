#include "pointdr/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pointdr {

std::vector<std::uint32_t> Rng::sample_indices(std::uint32_t n, std::uint32_t k) {
  if (k > n) throw std::invalid_argument("sample_indices: k > n");
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::uint32_t>(uniform_index(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace pointdr
