#include "tdalab/field_sim.hpp"

#include <algorithm>
#include <cmath>

#include "tdalab/fft.hpp"

namespace tdalab {

double second_spectral_moment(const covariance_model& model) { return 2.0 * model.alpha; }

std::vector<double> covariance_matrix(const grid_spec& spec, const covariance_model& model) {
	const std::int64_t n = spec.num_points();
	if (n > kCholeskyCap) throw std::invalid_argument("covariance_matrix: grid too large for dense path");
	std::vector<double> cov(static_cast<std::size_t>(n * n));
	std::vector<std::array<int, 3>> pts(static_cast<std::size_t>(n));
	for (std::int64_t i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = spec.point_of(i);
	for (std::int64_t i = 0; i < n; ++i) {
		for (std::int64_t j = 0; j <= i; ++j) {
			double sq = 0;
			for (int a = 0; a < spec.dim; ++a) {
				double l = spec.lag(a, pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)],
				                    pts[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)]);
				sq += l * l;
			}
			double r = model(sq);
			cov[static_cast<std::size_t>(i * n + j)] = r;
			cov[static_cast<std::size_t>(j * n + i)] = r;
		}
	}
	return cov;
}

namespace {

// in-place lower Cholesky; returns false on a non-positive pivot
bool cholesky_inplace(std::vector<double>& a, std::int64_t n) {
	for (std::int64_t j = 0; j < n; ++j) {
		double d = a[static_cast<std::size_t>(j * n + j)];
		for (std::int64_t k = 0; k < j; ++k) {
			double l = a[static_cast<std::size_t>(j * n + k)];
			d -= l * l;
		}
		if (!(d > 0)) return false;
		d = std::sqrt(d);
		a[static_cast<std::size_t>(j * n + j)] = d;
		for (std::int64_t i = j + 1; i < n; ++i) {
			double s = a[static_cast<std::size_t>(i * n + j)];
			const double* ri = &a[static_cast<std::size_t>(i * n)];
			const double* rj = &a[static_cast<std::size_t>(j * n)];
			for (std::int64_t k = 0; k < j; ++k) s -= ri[k] * rj[k];
			a[static_cast<std::size_t>(i * n + j)] = s / d;
		}
	}
	// zero the strict upper triangle so the factor can be used directly
	for (std::int64_t i = 0; i < n; ++i)
		for (std::int64_t j = i + 1; j < n; ++j) a[static_cast<std::size_t>(i * n + j)] = 0;
	return true;
}

}  // namespace

field_sampler::field_sampler(const grid_spec& spec, const covariance_model& model)
    : spec_(spec), model_(model) {
	spec_.validate();
	if (spec_.topo == topology::torus) {
		build_spectral();
		if (!spectral_) build_cholesky();
	} else if (spec_.num_points() > kCholeskyCap) {
		build_separable();
	} else {
		build_cholesky();
	}
}

void field_sampler::build_cholesky() {
	const std::int64_t n = spec_.num_points();
	if (n > kCholeskyCap)
		throw std::invalid_argument("field_sampler: grid too large for dense Cholesky path");
	const double jitters[] = {0.0, 1e-12, 1e-11, 1e-10};
	for (double jitter : jitters) {
		chol_ = covariance_matrix(spec_, model_);
		for (std::int64_t i = 0; i < n; ++i) chol_[static_cast<std::size_t>(i * n + i)] += jitter;
		if (cholesky_inplace(chol_, n)) {
			if (jitter > 0)
				warnings_.push_back("cholesky succeeded with diagonal jitter " + std::to_string(jitter));
			return;
		}
	}
	throw std::runtime_error("field_sampler: covariance not positive definite after max jitter");
}

void field_sampler::build_spectral() {
	// on the torus the covariance matrix is block-circulant, so the DFT of the
	// wrapped kernel gives its exact eigenvalues
	const std::int64_t n = spec_.num_points();
	std::vector<detail::cplx> kernel(static_cast<std::size_t>(n));
	for (std::int64_t i = 0; i < n; ++i) {
		auto p = spec_.point_of(i);
		double sq = 0;
		for (int a = 0; a < spec_.dim; ++a) {
			double l = spec_.lag(a, p[static_cast<std::size_t>(a)], 0);
			sq += l * l;
		}
		kernel[static_cast<std::size_t>(i)] = detail::cplx(model_(sq), 0.0);
	}
	std::vector<int> sizes(spec_.sizes.begin(), spec_.sizes.begin() + spec_.dim);
	detail::fft_nd(kernel, sizes, false);
	double max_ev = 0;
	for (auto& ev : kernel) max_ev = std::max(max_ev, ev.real());
	// anything past FFT roundoff means the wrapped kernel is genuinely indefinite
	const double tol = 1e-13 * std::max(max_ev, 1.0);
	for (auto& ev : kernel) {
		if (ev.real() < -tol) {
			warnings_.push_back("circulant spectrum not nonnegative definite, falling back to Cholesky");
			return;
		}
	}
	spectral_amp_.resize(static_cast<std::size_t>(n));
	for (std::int64_t i = 0; i < n; ++i) {
		double ev = std::max(kernel[static_cast<std::size_t>(i)].real(), 0.0);
		spectral_amp_[static_cast<std::size_t>(i)] = std::sqrt(ev * static_cast<double>(n));
	}
	spectral_ = true;
}

void field_sampler::build_separable() {
	// exp(-alpha |p|^2) factors across axes, so C = C_1 (x) ... (x) C_d and the
	// Kronecker product of the per-axis Cholesky factors is a Cholesky factor of C
	const double jitters[] = {0.0, 1e-12, 1e-11, 1e-10};
	for (int a = 0; a < spec_.dim; ++a) {
		const std::int64_t s = spec_.sizes[static_cast<std::size_t>(a)];
		bool done = false;
		for (double jitter : jitters) {
			auto& m = axis_chol_[static_cast<std::size_t>(a)];
			m.assign(static_cast<std::size_t>(s * s), 0.0);
			for (std::int64_t i = 0; i < s; ++i)
				for (std::int64_t j = 0; j < s; ++j) {
					double l = spec_.lag(a, static_cast<int>(i), static_cast<int>(j));
					m[static_cast<std::size_t>(i * s + j)] = model_(l * l) + (i == j ? jitter : 0.0);
				}
			if (cholesky_inplace(m, s)) {
				if (jitter > 0)
					warnings_.push_back("axis cholesky succeeded with diagonal jitter " + std::to_string(jitter));
				done = true;
				break;
			}
		}
		if (!done)
			throw std::runtime_error("field_sampler: axis covariance not positive definite after max jitter");
	}
	separable_ = true;
}

grid_field field_sampler::sample(std::uint64_t seed) const {
	const std::int64_t n = spec_.num_points();
	rng gen(seed);
	std::vector<double> out(static_cast<std::size_t>(n));
	if (spectral_) {
		std::vector<detail::cplx> a(static_cast<std::size_t>(n));
		for (std::int64_t i = 0; i < n; ++i) {
			double re = gen.normal(), im = gen.normal();
			a[static_cast<std::size_t>(i)] = spectral_amp_[static_cast<std::size_t>(i)] * detail::cplx(re, im);
		}
		std::vector<int> sizes(spec_.sizes.begin(), spec_.sizes.begin() + spec_.dim);
		detail::fft_nd(a, sizes, true);
		for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)].real();
	} else if (separable_) {
		for (double& v : out) v = gen.normal();
		// apply the per-axis lower factor along each axis in turn
		std::vector<double> fiber, result;
		std::int64_t inner = 1;
		for (int a = spec_.dim - 1; a >= 0; --a) {
			const std::int64_t s = spec_.sizes[static_cast<std::size_t>(a)];
			const auto& m = axis_chol_[static_cast<std::size_t>(a)];
			const std::int64_t outer = n / (inner * s);
			fiber.resize(static_cast<std::size_t>(s));
			result.resize(static_cast<std::size_t>(s));
			for (std::int64_t o = 0; o < outer; ++o) {
				for (std::int64_t in = 0; in < inner; ++in) {
					double* base = out.data() + o * s * inner + in;
					for (std::int64_t i = 0; i < s; ++i) fiber[static_cast<std::size_t>(i)] = base[i * inner];
					for (std::int64_t i = 0; i < s; ++i) {
						const double* row = &m[static_cast<std::size_t>(i * s)];
						double acc = 0;
						for (std::int64_t k = 0; k <= i; ++k) acc += row[k] * fiber[static_cast<std::size_t>(k)];
						result[static_cast<std::size_t>(i)] = acc;
					}
					for (std::int64_t i = 0; i < s; ++i) base[i * inner] = result[static_cast<std::size_t>(i)];
				}
			}
			inner *= s;
		}
	} else {
		std::vector<double> z(static_cast<std::size_t>(n));
		for (double& v : z) v = gen.normal();
		for (std::int64_t i = 0; i < n; ++i) {
			const double* row = &chol_[static_cast<std::size_t>(i * n)];
			double s = 0;
			for (std::int64_t k = 0; k <= i; ++k) s += row[k] * z[static_cast<std::size_t>(k)];
			out[static_cast<std::size_t>(i)] = s;
		}
	}
	return grid_field(spec_, std::move(out));
}

grid_field sample_field(const grid_spec& spec, const covariance_model& model, std::uint64_t seed) {
	return field_sampler(spec, model).sample(seed);
}

double empirical_cov_check(const std::vector<grid_field>& fields, const covariance_model& model) {
	if (fields.size() < 100) throw std::invalid_argument("empirical_cov_check: need at least 100 fields");
	const grid_spec& spec = fields.front().spec;
	for (const auto& f : fields)
		if (!(f.spec == spec)) throw std::invalid_argument("empirical_cov_check: mismatched specs");

	struct lag_probe {
		int axis;     // -1 means lag zero
		int steps;
	};
	std::vector<lag_probe> probes = {{-1, 0}};
	for (int a = 0; a < spec.dim; ++a) {
		probes.push_back({a, 1});
		probes.push_back({a, 2});
	}

	const std::int64_t n = spec.num_points();
	double worst = 0;
	for (const auto& pr : probes) {
		double model_cov = 1.0;
		bool wrap = spec.topo == topology::torus;
		int axis_size = 1;
		if (pr.axis >= 0) {
			double l = spec.spacing(pr.axis) * pr.steps;
			model_cov = model(l * l);
			axis_size = spec.sizes[static_cast<std::size_t>(pr.axis)];
		}
		double sum = 0;
		std::int64_t count = 0;
		for (const auto& f : fields) {
			for (std::int64_t i = 0; i < n; ++i) {
				std::int64_t j = i;
				if (pr.axis >= 0) {
					auto p = spec.point_of(i);
					int& c = p[static_cast<std::size_t>(pr.axis)];
					if (c + pr.steps < axis_size) {
						c += pr.steps;
					} else if (wrap) {
						c = (c + pr.steps) % axis_size;
					} else {
						continue;
					}
					j = spec.index_of(p);
				}
				sum += f[i] * f[j];
				++count;
			}
		}
		double emp = sum / static_cast<double>(count);
		worst = std::max(worst, std::abs(emp - model_cov));
	}
	return worst;
}

}  // namespace tdalab
