#include "tdalab/closed_forms.hpp"

#include <algorithm>

namespace tdalab {

double hermite(int n, double x) {
	if (n < -1) throw std::invalid_argument("hermite: degree must be >= -1");
	if (n == -1) return 0.5 * std::erfc(x * 0.70710678118654752440) / normal_pdf(x);
	double prev = 1.0;  // H_0
	if (n == 0) return prev;
	double cur = x;  // H_1
	for (int k = 1; k < n; ++k) {
		double next = x * cur - static_cast<double>(k) * prev;
		prev = cur;
		cur = next;
	}
	return cur;
}

namespace {

constexpr double kTruncation = 12.0;

// nodes of the probabilists' Hermite polynomial by interlacing bisection;
// weights from the orthonormal Christoffel sum
void hermite_rule(int n, std::vector<double>& nodes, std::vector<double>& weights) {
	std::vector<double> prev;  // roots of He_{k-1}
	nodes.clear();
	for (int k = 1; k <= n; ++k) {
		std::vector<double> cur(static_cast<std::size_t>(k));
		double bound = 2.0 * std::sqrt(static_cast<double>(k)) + 2.0;
		for (int i = 0; i < k; ++i) {
			double lo = i == 0 ? -bound : prev[static_cast<std::size_t>(i - 1)];
			double hi = i == k - 1 ? bound : prev[static_cast<std::size_t>(i)];
			for (int it = 0; it < 120; ++it) {
				double mid = 0.5 * (lo + hi);
				if ((hermite(k, lo) <= 0) == (hermite(k, mid) <= 0)) lo = mid;
				else hi = mid;
			}
			cur[static_cast<std::size_t>(i)] = 0.5 * (lo + hi);
		}
		prev = std::move(cur);
	}
	nodes = prev;
	weights.resize(nodes.size());
	for (std::size_t i = 0; i < nodes.size(); ++i) {
		double sum = 0, fact = 1;
		for (int k = 0; k < n; ++k) {
			if (k > 0) fact *= static_cast<double>(k);
			double h = hermite(k, nodes[i]);
			sum += h * h / fact;
		}
		weights[i] = 1.0 / sum;
	}
}

double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
	double h = (hi - lo) / panels;
	double sum = f(lo) + f(hi);
	for (int i = 1; i < panels; ++i) sum += f(lo + h * i) * (i % 2 ? 4.0 : 2.0);
	// odd interior ordinates carry weight 4
	return sum * h / 3.0;
}

}  // namespace

double gaussian_inner_product(const std::function<double(double)>& a,
                              const std::function<double(double)>& b, const quadrature_spec& q) {
	auto integrand = [&](double x) { return a(x) * b(x) * normal_pdf(x); };
	if (q.rule == quadrature_spec::rule_kind::weighted) {
		std::vector<double> nodes, weights;
		hermite_rule(q.nodes, nodes, weights);
		double sum = 0;
		for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * a(nodes[i]) * b(nodes[i]);
		return sum;
	}
	double prev = simpson(integrand, -kTruncation, kTruncation, 64);
	for (int panels = 128; panels <= (1 << 22); panels *= 2) {
		double cur = simpson(integrand, -kTruncation, kTruncation, panels);
		if (std::abs(cur - prev) < q.tolerance * std::max(1.0, std::abs(cur))) return cur;
		prev = cur;
	}
	throw std::runtime_error("gaussian_inner_product: adaptive refinement did not converge");
}

namespace {

double binomial(int n, int k) {
	double r = 1;
	for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
	return r;
}

}  // namespace

lk_vector lk_box(int dim, double side, double lambda2) {
	if (dim < 0 || dim > 3) throw std::invalid_argument("lk_box: dim must be in 0..3");
	if (dim > 0 && (!(side > 0) || !(lambda2 > 0)))
		throw std::invalid_argument("lk_box: side and lambda2 must be positive");
	lk_vector lk;
	lk.dim = dim;
	double scaled = side * std::sqrt(lambda2);
	for (int j = 0; j <= dim; ++j) lk.values.push_back(binomial(dim, j) * std::pow(scaled, j));
	return lk;
}

double gaussian_minkowski_halfline(int j, double u) {
	if (j < 0) throw std::invalid_argument("gaussian_minkowski_halfline: j must be >= 0");
	if (j == 0) return 1.0 - normal_cdf(u);
	return hermite(j - 1, u) * normal_pdf(u);
}

double flag_coefficient(int n, int j) {
	if (j < 0 || j > n) throw std::invalid_argument("flag_coefficient: need 0 <= j <= n");
	auto log_omega = [](int m) {
		// unit-ball volume omega_m = pi^(m/2) / Gamma(m/2 + 1)
		return 0.5 * m * std::log(3.14159265358979323846) - std::lgamma(0.5 * m + 1.0);
	};
	return binomial(n, j) * std::exp(log_omega(n) - log_omega(n - j) - log_omega(j));
}

double expected_ec_excursion(double u, const lk_vector& lk) {
	double sum = 0;
	for (int j = 0; j <= lk.dim; ++j)
		sum += std::pow(6.28318530717958647693, -0.5 * j) * lk[j] * gaussian_minkowski_halfline(j, u);
	return sum;
}

double expected_lk_excursion(int i, double u, const lk_vector& lk) {
	if (i < 0 || i > lk.dim) throw std::invalid_argument("expected_lk_excursion: i out of range");
	double sum = 0;
	for (int j = 0; j + i <= lk.dim; ++j)
		sum += flag_coefficient(i + j, j) * std::pow(6.28318530717958647693, -0.5 * j) * lk[i + j] *
		       gaussian_minkowski_halfline(j, u);
	return sum;
}

double transform_spec::value(double x) const {
	for (const auto& p : pieces)
		if (x >= p.lo && x < p.hi) return p.value(x);
	throw std::invalid_argument("transform_spec: x not covered by any piece");
}

double transform_spec::derivative(double x) const {
	for (const auto& p : pieces)
		if (x >= p.lo && x < p.hi) return p.derivative(x);
	throw std::invalid_argument("transform_spec: x not covered by any piece");
}

namespace {

constexpr double kWholeLine = std::numeric_limits<double>::infinity();

}

transform_spec transform_spec::identity() {
	transform_spec ts;
	ts.pieces.push_back({-kWholeLine, kWholeLine, [](double x) { return x; }, [](double) { return 1.0; }});
	ts.mono = monotonicity::increasing;
	ts.is_identity = true;
	return ts;
}

transform_spec transform_spec::negated_identity() {
	transform_spec ts;
	ts.pieces.push_back({-kWholeLine, kWholeLine, [](double x) { return -x; }, [](double) { return -1.0; }});
	ts.mono = monotonicity::decreasing;
	return ts;
}

transform_spec transform_spec::cubic() {
	transform_spec ts;
	ts.pieces.push_back({-kWholeLine, kWholeLine, [](double x) { return x * x * x; },
	                     [](double x) { return 3.0 * x * x; }});
	ts.mono = monotonicity::increasing;
	return ts;
}

double expected_euler_integral(const transform_spec& ts, const lk_vector& lk, const quadrature_spec& q) {
	if (ts.pieces.empty()) throw std::invalid_argument("expected_euler_integral: empty transform");
	if (ts.is_identity) {
		// quadrature-free special case: E = -L1 / sqrt(2 pi)
		return -lk[1] * 0.39894228040143267794;
	}
	const double two_pi = 6.28318530717958647693;
	auto one = [](double) { return 1.0; };
	auto g = [&ts](double x) { return ts.value(x); };

	double general = lk[0] * gaussian_inner_product(one, g, q);
	for (int j = 1; j <= lk.dim; ++j) {
		auto weighted = [&ts, j](double x) {
			double d = ts.derivative(x);
			double sgn = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
			return (j % 2 == 0 ? 1.0 : sgn) * d;  // (sgn G')^j G'
		};
		double ip = gaussian_inner_product([j](double x) { return hermite(j - 1, x); }, weighted, q);
		double term = lk[j] * ip / std::pow(two_pi, 0.5 * j);
		general += j % 2 == 0 ? term : -term;
	}

	if (ts.mono != monotonicity::general) {
		double monotone = 0;
		for (int j = 0; j <= lk.dim; ++j) {
			double ip = gaussian_inner_product([j](double x) { return hermite(j, x); }, g, q);
			double term = lk[j] * ip / std::pow(two_pi, 0.5 * j);
			if (ts.mono == monotonicity::increasing)
				monotone += j % 2 == 0 ? term : -term;
			else
				monotone += term;
		}
		double scale = std::max({1.0, std::abs(general), std::abs(monotone)});
		if (std::abs(general - monotone) > 100.0 * q.tolerance * scale)
			throw std::runtime_error("expected_euler_integral: general and monotone formulas disagree");
	}
	return general;
}

void expected_euler_integral_vector(int k) {
	throw std::runtime_error("expected_euler_integral_vector: k = " + std::to_string(k) +
	                         " unsupported (needs general Gaussian Minkowski functionals)");
}

double expected_barcode_ec(double a, const lk_vector& lk, double chi_m) {
	double sum = chi_m * (normal_pdf(a) + a * normal_cdf(a));
	for (int j = 1; j <= lk.dim; ++j)
		sum += normal_pdf(a) * std::pow(6.28318530717958647693, -0.5 * j) * lk[j] * hermite(j - 2, -a);
	return sum;
}

double coverage_polynomial::eval(double tau) const {
	double v = 0;
	for (std::size_t k = coeffs.size(); k-- > 0;) v = v * tau + coeffs[k];
	return v;
}

coverage_polynomial coverage_polynomial_for(int n, int d, bool printed_base_case) {
	if (n < 1 || d < 1) throw std::invalid_argument("coverage_polynomial: need n >= 1, d >= 1");
	coverage_polynomial p;
	p.n = n;
	p.d = d;
	if (printed_base_case) {
		// the printed form n(1 - tau^(n-1)); gives 0 at n = 1, kept for comparison
		p.coeffs.assign(static_cast<std::size_t>(n), 0.0);
		p.coeffs[0] = n;
		if (n > 1) p.coeffs[static_cast<std::size_t>(n - 1)] = -static_cast<double>(n);
		else p.coeffs[0] = 0.0;
	} else {
		// n(1-tau)^(n-1), the expected number of exposed arc endpoints on the circle
		p.coeffs.resize(static_cast<std::size_t>(n), 0.0);
		for (int k = 0; k <= n - 1; ++k)
			p.coeffs[static_cast<std::size_t>(k)] = n * binomial(n - 1, k) * (k % 2 == 0 ? 1.0 : -1.0);
	}
	for (int dim = 2; dim <= d; ++dim) {
		// E_d(tau) = d/dtau [ tau E_{d-1}(tau) ]
		std::vector<double> shifted(p.coeffs.size() + 1, 0.0);
		for (std::size_t k = 0; k < p.coeffs.size(); ++k) shifted[k + 1] = p.coeffs[k];
		std::vector<double> deriv(shifted.size() - 1, 0.0);
		for (std::size_t k = 1; k < shifted.size(); ++k)
			deriv[k - 1] = shifted[k] * static_cast<double>(k);
		p.coeffs = std::move(deriv);
	}
	return p;
}

double torus_coverage_expectation(int n, int d, double tau) {
	if (!(tau > 0.0) || !(tau < 1.0))
		throw std::invalid_argument("torus_coverage_expectation: tau must lie in (0,1)");
	return coverage_polynomial_for(n, d).eval(tau);
}

double coverage_scale(double tau) {
	if (!(tau > 0.0) || !(tau < 1.0)) throw std::invalid_argument("coverage_scale: tau must lie in (0,1)");
	return std::log(1.0 / tau) / tau;
}

}  // namespace tdalab
