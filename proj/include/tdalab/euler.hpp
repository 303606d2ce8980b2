#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "tdalab/complex.hpp"
#include "tdalab/cubical.hpp"
#include "tdalab/grid.hpp"

namespace tdalab {

// explicit open-cell decomposition, for the locally finite Euler characteristic
struct open_cell_complex {
	std::map<int, std::int64_t> counts;  // dim -> number of open cells
};

// chi as alternating count of open cells: additive but not homotopy invariant
std::int64_t euler_char_lf(const open_cell_complex& oc);

// chi of a face-closed cell set as the alternating cell count
std::int64_t euler_char_closed(const filtered_complex& fc, std::span<const cell_id> cells);
std::int64_t euler_char_closed(const filtered_complex& fc);

// u -> chi{f >= u} (closed superlevel cells: min corner value >= u), a
// left-continuous integer step function changing only at vertex values
class ec_curve {
public:
	ec_curve() = default;
	ec_curve(std::vector<double> breakpoints, std::vector<std::int64_t> suffix_chi);

	std::int64_t value(double u) const;
	std::int64_t chi_domain() const { return suffix_.empty() ? 0 : suffix_.front(); }

	// integral of value(u) over (0, +inf)
	double integral_positive() const;

	const std::vector<double>& breakpoints() const { return breaks_; }
	const std::vector<std::int64_t>& values() const { return suffix_; }

private:
	std::vector<double> breaks_;        // ascending distinct entrance values
	std::vector<std::int64_t> suffix_;  // suffix_[i] = chi at u in (breaks_[i-1], breaks_[i]]
};

ec_curve ec_curve_superlevel(const grid_field& field);

// Symmetric-convention Euler integral of a real grid function:
//   integral_0^inf [ chi{f >= u} - chi{f <= -u} ] du
// with closed cubical level sets. Computed both per-cell and by the stepwise
// sweep, which are asserted to agree. Reproduces the worked unit-interval
// examples (integral of x over [0,1] is 1) and is additive on constructible
// inputs, but is odd under f -> -f.
double euler_integral_real(const grid_field& field);

// Sublevel-entrance (Morse) Euler integral: the alternating sum of sublevel
// entrance times, sum_c (-1)^dim max_{corners} f. This is the functional the
// barcode identity chi(B(f,fmax)) = fmax*chi(M) - integral pairs with, and the
// one whose Gaussian expectation is -L1/sqrt(2*pi).
double euler_integral_sublevel(const grid_field& field);

struct constructible_field {
	grid_spec spec;
	std::vector<std::int64_t> values;  // per vertex

	constructible_field() = default;
	constructible_field(grid_spec s, std::vector<std::int64_t> v);
};

// exact integer Euler integral, levelwise over the integer range
std::int64_t euler_integral_constructible(const constructible_field& h);

// face-closed target supports over one domain; each support must have chi == gamma
struct target_scene {
	grid_spec domain;
	std::vector<std::vector<cell_id>> supports;  // sorted cell ids in cubical_layout order
	std::int64_t gamma = 1;
};

// cell included iff every corner vertex satisfies the predicate; the resulting
// set is vertex-determined and automatically face-closed
std::vector<cell_id> rasterize(const grid_spec& spec,
                               const std::function<bool(const std::array<double, 3>&)>& inside);
std::vector<cell_id> rasterize_rect(const grid_spec& spec, const std::array<double, 3>& lo,
                                    const std::array<double, 3>& hi);
std::vector<cell_id> rasterize_disc(const grid_spec& spec, const std::array<double, 3>& center,
                                    double radius);

void validate_scene(const target_scene& scene);

// #targets = (1/gamma) * integral of the sensor field h(x) = #supports covering x
std::int64_t count_targets(const target_scene& scene);

struct identity_check {
	double lhs = 0;  // chi of the sublevel barcode truncated at f_max
	double rhs = 0;  // f_max * chi(M) - sublevel Euler integral
};

identity_check barcode_identity_check(const grid_field& field);

}  // namespace tdalab
