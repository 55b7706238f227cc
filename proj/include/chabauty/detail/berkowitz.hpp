#pragma once

#include <vector>

namespace chabauty::detail {

// Division-free characteristic polynomial det(t*Id - A), ascending coefficients.
// T needs +, -, unary -, *.
template <class T>
std::vector<T> berkowitz(const std::vector<std::vector<T>>& a, const T& zero, const T& one) {
  const size_t n = a.size();
  if (n == 0) return {one};
  std::vector<T> vect{one, -a[0][0]};
  for (size_t r = 1; r < n; ++r) {
    std::vector<T> t(r + 2, zero);
    t[0] = one;
    t[1] = -a[r][r];
    std::vector<T> x(r, zero);
    for (size_t i = 0; i < r; ++i) x[i] = a[i][r];
    for (size_t k = 2; k <= r + 1; ++k) {
      T dot = zero;
      for (size_t i = 0; i < r; ++i) dot = dot + a[r][i] * x[i];
      t[k] = -dot;
      if (k == r + 1) break;
      std::vector<T> y(r, zero);
      for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) y[i] = y[i] + a[i][j] * x[j];
      x = std::move(y);
    }
    std::vector<T> next(r + 2, zero);
    for (size_t i = 0; i < r + 2; ++i)
      for (size_t j = 0; j <= std::min(i, r); ++j) next[i] = next[i] + t[i - j] * vect[j];
    vect = std::move(next);
  }
  return std::vector<T>(vect.rbegin(), vect.rend());
}

}  // namespace chabauty::detail
