#pragma once

#include <complex>
#include <vector>

#include "pfh/grid.hpp"

namespace pfh {

/// Fourier coefficients under the convention
///   f(x) = sum_k c_k exp(2 pi i k (x - origin) / L),
/// integer wavenumbers k in {-n/2, .., n/2-1} stored in standard FFT order
/// (index idx maps to k = idx for idx < n/2, k = idx - n otherwise).
/// A constant field c has c_0 = c and all other modes zero.
struct Spectrum {
  GridSpec grid;
  std::vector<std::complex<double>> coefficients;

  static int wavenumber(int idx, int n) { return idx < n / 2 ? idx : idx - n; }
};

namespace detail {

// Iterative radix-2 FFT, power-of-two lengths only. Deterministic: twiddles
// come from the shared table, summation order is fixed.
inline void fft_pow2(std::complex<double>* a, int n,
                     const std::vector<std::complex<double>>& twiddle, bool inverse) {
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const int half = len / 2;
    const int stride = n / len;
    for (int i = 0; i < n; i += len) {
      for (int j = 0; j < half; ++j) {
        std::complex<double> w = twiddle[static_cast<std::size_t>(j) * stride];
        if (inverse) w = std::conj(w);
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + half] * w;
        a[i + j] = u + v;
        a[i + j + half] = u - v;
      }
    }
  }
}

inline std::vector<std::complex<double>> make_twiddles(int n) {
  std::vector<std::complex<double>> tw(static_cast<std::size_t>(n) / 2);
  for (int j = 0; j < n / 2; ++j) {
    const double ang = -2.0 * pi * j / n;
    tw[j] = std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return tw;
}

inline void transpose(std::vector<std::complex<double>>& a, int n) {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      std::swap(a[static_cast<std::size_t>(i) * n + j], a[static_cast<std::size_t>(j) * n + i]);
}

inline void fft_nd(std::vector<std::complex<double>>& a, const GridSpec& g, bool inverse) {
  const int n = g.n;
  const auto tw = make_twiddles(n);
  if (g.dim == 1) {
    fft_pow2(a.data(), n, tw, inverse);
    return;
  }
  for (int r = 0; r < n; ++r) fft_pow2(a.data() + static_cast<std::size_t>(r) * n, n, tw, inverse);
  transpose(a, n);
  for (int r = 0; r < n; ++r) fft_pow2(a.data() + static_cast<std::size_t>(r) * n, n, tw, inverse);
  transpose(a, n);
}

} // namespace detail

inline Spectrum forward_transform(const ScalarField& f) {
  f.grid.validate();
  std::vector<std::complex<double>> a(f.values.begin(), f.values.end());
  detail::fft_nd(a, f.grid, /*inverse=*/false);
  const double scale = 1.0 / static_cast<double>(f.grid.node_count());
  for (auto& c : a) c *= scale;
  return Spectrum{f.grid, std::move(a)};
}

inline ScalarField inverse_transform(const Spectrum& s) {
  std::vector<std::complex<double>> a = s.coefficients;
  detail::fft_nd(a, s.grid, /*inverse=*/true);
  ScalarField out{s.grid, std::vector<double>(s.grid.node_count())};
  for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a[i].real();
  return out;
}

/// Symbol of the periodic Laplacian: entry at wavenumber k is -4 pi^2 |xi|^2
/// with xi_j = k_j / L, so dividing modewise by (1 - tau*eps*symbol) realizes
/// the implicit (1 + 4 pi^2 tau eps |xi|^2) factor of the time stepper.
inline std::vector<double> laplacian_symbol(const GridSpec& g) {
  g.validate();
  std::vector<double> sym(g.node_count());
  const double f = -4.0 * pi * pi / (g.length * g.length);
  if (g.dim == 1) {
    for (int i = 0; i < g.n; ++i) {
      const double k = Spectrum::wavenumber(i, g.n);
      sym[i] = f * k * k;
    }
    return sym;
  }
  for (int i0 = 0; i0 < g.n; ++i0) {
    const double k0 = Spectrum::wavenumber(i0, g.n);
    for (int i1 = 0; i1 < g.n; ++i1) {
      const double k1 = Spectrum::wavenumber(i1, g.n);
      sym[static_cast<std::size_t>(i0) * g.n + i1] = f * (k0 * k0 + k1 * k1);
    }
  }
  return sym;
}

} // namespace pfh
