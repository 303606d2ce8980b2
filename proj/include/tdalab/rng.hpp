#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tdalab {

inline std::uint64_t splitmix64(std::uint64_t x) {
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

// per-realization stream: base_seed XOR splitmix of the realization index
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
	return base_seed ^ splitmix64(index);
}

// mt19937_64 with hand-rolled output transforms so that identical seeds give
// bit-identical streams everywhere (std distributions are implementation-defined)
class rng {
public:
	explicit rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

	double uniform01() {
		// in (0,1], never 0, so log() below is safe
		return static_cast<double>((engine_() >> 11) + 1) * 0x1p-53;
	}

	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

	double normal() {
		if (have_spare_) {
			have_spare_ = false;
			return spare_;
		}
		double u1 = uniform01(), u2 = uniform01();
		double r = std::sqrt(-2.0 * std::log(u1));
		double a = 6.283185307179586476925286766559 * u2;
		spare_ = r * std::sin(a);
		have_spare_ = true;
		return r * std::cos(a);
	}

	std::uint64_t next_u64() { return engine_(); }

	std::uint64_t below(std::uint64_t n) { return engine_() % n; }

private:
	std::mt19937_64 engine_;
	double spare_ = 0;
	bool have_spare_ = false;
};

}  // namespace tdalab
