#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdalab/grid.hpp"
#include "tdalab/rng.hpp"

namespace tdalab {

// stationary isotropic covariance R(p) = exp(-alpha |p|^2), unit variance at lag 0
struct covariance_model {
	double alpha = 100.0;

	explicit covariance_model(double a) : alpha(a) {
		if (!(a > 0)) throw std::invalid_argument("covariance_model: alpha must be positive");
	}
	double operator()(double squared_lag) const { return std::exp(-alpha * squared_lag); }
};

// lambda_2 = -d^2 R / dp_i^2 at 0; scales the metric the field induces on its domain
double second_spectral_moment(const covariance_model& model);

inline constexpr std::int64_t kCholeskyCap = 4096;

// dense covariance matrix (row-major n x n); torus lags wrap minimally per axis
std::vector<double> covariance_matrix(const grid_spec& spec, const covariance_model& model);

// Exact Gaussian sampling. Boxes under the cap factor the dense covariance once
// (Cholesky with a jitter schedule up to 1e-10); larger boxes exploit the
// separable kernel, whose covariance is a Kronecker product of per-axis
// matrices, so the Cholesky factors per axis and scales to any grid. Torus
// grids of any size go through the exact spectral (circulant) route, falling
// back to Cholesky when the lattice kernel is not nonnegative definite.
class field_sampler {
public:
	field_sampler(const grid_spec& spec, const covariance_model& model);

	grid_field sample(std::uint64_t seed) const;

	const grid_spec& spec() const { return spec_; }
	const std::vector<std::string>& warnings() const { return warnings_; }
	bool used_spectral() const { return spectral_; }
	bool used_separable() const { return separable_; }

private:
	void build_cholesky();
	void build_spectral();
	void build_separable();

	grid_spec spec_;
	covariance_model model_;
	bool spectral_ = false;
	bool separable_ = false;
	std::vector<double> chol_;                    // lower factor, row-major
	std::vector<double> spectral_amp_;            // sqrt(max(lambda_k,0) * n)
	std::array<std::vector<double>, 3> axis_chol_;  // per-axis lower factors
	std::vector<std::string> warnings_;
};

grid_field sample_field(const grid_spec& spec, const covariance_model& model, std::uint64_t seed);

// max |empirical - model| covariance over lags {0, h, 2h} per axis; the
// simulation QA hook. Requires >= 100 fields sharing one spec.
double empirical_cov_check(const std::vector<grid_field>& fields, const covariance_model& model);

}  // namespace tdalab
