#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace tdalab::detail {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// iterative radix-2 Cooley-Tukey, n must be a power of two
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
	const std::size_t n = a.size();
	for (std::size_t i = 1, j = 0; i < n; ++i) {
		std::size_t bit = n >> 1;
		for (; j & bit; bit >>= 1) j ^= bit;
		j ^= bit;
		if (i < j) std::swap(a[i], a[j]);
	}
	for (std::size_t len = 2; len <= n; len <<= 1) {
		double ang = kTwoPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
		cplx wl(std::cos(ang), std::sin(ang));
		for (std::size_t i = 0; i < n; i += len) {
			cplx w(1.0, 0.0);
			for (std::size_t k = 0; k < len / 2; ++k) {
				cplx u = a[i + k], v = a[i + k + len / 2] * w;
				a[i + k] = u + v;
				a[i + k + len / 2] = u - v;
				w *= wl;
			}
		}
	}
	if (inverse)
		for (cplx& x : a) x /= static_cast<double>(n);
}

// Bluestein's algorithm: DFT of arbitrary length via a power-of-two convolution
inline void fft_any(std::vector<cplx>& a, bool inverse) {
	const std::size_t n = a.size();
	if (n == 0) return;
	if ((n & (n - 1)) == 0) {
		fft_pow2(a, inverse);
		return;
	}
	std::size_t m = 1;
	while (m < 2 * n - 1) m <<= 1;
	std::vector<cplx> w(n);  // chirp: exp(+/- i pi k^2 / n)
	for (std::size_t k = 0; k < n; ++k) {
		// k^2 mod 2n avoids precision loss for large k
		std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
		double ang = kTwoPi / 2.0 / static_cast<double>(n) * static_cast<double>(k2);
		if (!inverse) ang = -ang;
		w[k] = cplx(std::cos(ang), std::sin(ang));
	}
	std::vector<cplx> x(m, cplx(0, 0)), y(m, cplx(0, 0));
	for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * w[k];
	y[0] = cplx(1, 0);
	for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(w[k]);
	fft_pow2(x, false);
	fft_pow2(y, false);
	for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
	fft_pow2(x, true);
	for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * w[k];
	if (inverse)
		for (cplx& v : a) v /= static_cast<double>(n);
}

// n-dimensional DFT over a row-major array with the given axis sizes
inline void fft_nd(std::vector<cplx>& a, const std::vector<int>& sizes, bool inverse) {
	std::size_t total = a.size();
	std::size_t stride = 1;
	for (int ax = static_cast<int>(sizes.size()) - 1; ax >= 0; --ax) {
		const std::size_t n = static_cast<std::size_t>(sizes[static_cast<std::size_t>(ax)]);
		const std::size_t block = stride * n;
		std::vector<cplx> line(n);
		for (std::size_t base = 0; base < total; base += block) {
			for (std::size_t off = 0; off < stride; ++off) {
				for (std::size_t k = 0; k < n; ++k) line[k] = a[base + off + k * stride];
				fft_any(line, inverse);
				for (std::size_t k = 0; k < n; ++k) a[base + off + k * stride] = line[k];
			}
		}
		stride = block;
	}
}

}  // namespace tdalab::detail
