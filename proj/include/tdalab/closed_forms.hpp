#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace tdalab {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) * 0.39894228040143267794; }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// probabilists' Hermite polynomial; H_{-1}(x) = (1 - Phi(x)) / phi(x)
double hermite(int n, double x);

struct quadrature_spec {
	enum class rule_kind { weighted, adaptive } rule = rule_kind::adaptive;
	int nodes = 64;          // weighted rule only
	double tolerance = 1e-9;
};

// integral of a(x) b(x) phi(x) over the real line; integrands of polynomial
// growth only (domain truncated at |x| = 12, phi mass beyond is < 1e-31)
double gaussian_inner_product(const std::function<double(double)>& a,
                              const std::function<double(double)>& b, const quadrature_spec& q);

// Lipschitz-Killing curvatures L_0..L_N of the domain under the field-induced
// metric; only flat boxes are supported, where L_j = C(N,j) (T sqrt(lambda2))^j
struct lk_vector {
	int dim = 0;
	std::vector<double> values;  // L_0..L_N

	double operator[](int j) const { return values[static_cast<std::size_t>(j)]; }
};

lk_vector lk_box(int dim, double side, double lambda2);

// Gaussian Minkowski functionals of the half-line [u, inf):
// M_0 = 1 - Phi(u), M_j = H_{j-1}(u) phi(u) for j >= 1
double gaussian_minkowski_halfline(int j, double u);

double flag_coefficient(int n, int j);

// kinematic formula at i = 0: expected Euler characteristic of {f >= u}
double expected_ec_excursion(double u, const lk_vector& lk);

// full kinematic formula: expected L_i of the excursion set
double expected_lk_excursion(int i, double u, const lk_vector& lk);

enum class monotonicity { increasing, decreasing, general };

// piecewise-C2 transform G with its derivative; derivative sign must be
// constant on each piece
struct transform_spec {
	struct piece {
		double lo, hi;  // half-open [lo, hi)
		std::function<double(double)> value;
		std::function<double(double)> derivative;
	};
	std::vector<piece> pieces;
	monotonicity mono = monotonicity::general;
	bool is_identity = false;

	double value(double x) const;
	double derivative(double x) const;

	static transform_spec identity();
	static transform_spec negated_identity();
	static transform_spec cubic();
};

// E[ integral of G(f) d chi ] for the sublevel-entrance integral. Monotone
// transforms are evaluated by both the general formula and the monotone
// corollary, which must agree within quadrature tolerance.
double expected_euler_integral(const transform_spec& ts, const lk_vector& lk, const quadrature_spec& q);

// vector-valued fields (k > 1) need general Gaussian Minkowski functionals
[[noreturn]] void expected_euler_integral_vector(int k);

// E[ chi(B(f,a)) ] of the sublevel barcode truncated at level a
double expected_barcode_ec(double a, const lk_vector& lk, double chi_m);

// expected Euler characteristic of a union of n L-infinity balls on the
// d-torus, as a polynomial in tau = (2 eps)^d
struct coverage_polynomial {
	int n = 1;
	int d = 1;
	std::vector<double> coeffs;  // ascending powers of tau

	double eval(double tau) const;
};

// base case n(1-tau)^(n-1); the printed variant n(1-tau^(n-1)) is kept
// computable behind the flag for comparison
coverage_polynomial coverage_polynomial_for(int n, int d, bool printed_base_case = false);

double torus_coverage_expectation(int n, int d, double tau);

// (1/tau) log(1/tau): the scale at which coverage is first complete
double coverage_scale(double tau);

}  // namespace tdalab
