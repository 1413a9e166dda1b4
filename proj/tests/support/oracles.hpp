// SPDX-License-Identifier: Apache-2.0
// Straightforward reference implementations used as test oracles. They are
// written independently of the library code paths (different loop order,
// explicit bounds checks) so agreement is meaningful.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "convrec/nnkit/tensor.hpp"

namespace oracle {

using convrec::nn::Tensor;

inline Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b) {
  const std::size_t out = w.dim(0), in = w.dim(1);
  Tensor y({out});
  for (std::size_t o = 0; o < out; ++o) {
    double s = 0.0;
    for (std::size_t i = 0; i < in; ++i) s += x[i] * w[o * in + i];
    y[o] = s + b[o];
  }
  return y;
}

// x [C, H, W], w [Co, C, k, k], "same" padding k/2.
inline Tensor conv(const Tensor& x, const Tensor& w, const Tensor& b, std::size_t stride) {
  const long c = static_cast<long>(x.dim(0)), h = static_cast<long>(x.dim(1)),
             wd = static_cast<long>(x.dim(2));
  const long co = static_cast<long>(w.dim(0)), k = static_cast<long>(w.dim(2));
  const long pad = k / 2, s = static_cast<long>(stride);
  const long ho = (h + 2 * pad - k) / s + 1, wo = (wd + 2 * pad - k) / s + 1;
  Tensor y({static_cast<std::size_t>(co), static_cast<std::size_t>(ho),
            static_cast<std::size_t>(wo)});
  for (long oc = 0; oc < co; ++oc)
    for (long oy = 0; oy < ho; ++oy)
      for (long ox = 0; ox < wo; ++ox) {
        double acc = b[oc];
        for (long ic = 0; ic < c; ++ic)
          for (long ky = 0; ky < k; ++ky)
            for (long kx = 0; kx < k; ++kx) {
              const long iy = oy * s + ky - pad, ix = ox * s + kx - pad;
              if (iy < 0 || iy >= h || ix < 0 || ix >= wd) continue;
              acc += w[((oc * c + ic) * k + ky) * k + kx] * x[(ic * h + iy) * wd + ix];
            }
        y[(oc * ho + oy) * wo + ox] = acc;
      }
  return y;
}

inline Tensor relu(Tensor x) {
  for (double& v : x.values()) v = v < 0.0 ? 0.0 : v;
  return x;
}

inline Tensor add(Tensor a, const Tensor& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Tensor concat(const Tensor& a, const std::vector<double>& b) {
  std::vector<double> v(a.values().begin(), a.values().end());
  v.insert(v.end(), b.begin(), b.end());
  return Tensor({v.size()}, v);
}

inline Tensor flatten(Tensor x) {
  x.reshape({x.size()});
  return x;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ma += a[i], mb += b[i];
  ma /= n, mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace oracle
