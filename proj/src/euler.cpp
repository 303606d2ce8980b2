#include "tdalab/euler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tdalab/persistence.hpp"

namespace tdalab {

std::int64_t euler_char_lf(const open_cell_complex& oc) {
	std::int64_t chi = 0;
	for (const auto& [dim, count] : oc.counts) {
		if (count < 0) throw std::invalid_argument("euler_char_lf: negative cell count");
		chi += dim % 2 == 0 ? count : -count;
	}
	return chi;
}

std::int64_t euler_char_closed(const filtered_complex& fc, std::span<const cell_id> cells) {
	std::int64_t chi = 0;
	for (cell_id c : cells) chi += fc.dim(c) % 2 == 0 ? 1 : -1;
	return chi;
}

std::int64_t euler_char_closed(const filtered_complex& fc) {
	std::int64_t chi = 0;
	for (cell_id c = 0; c < fc.size(); ++c) chi += fc.dim(c) % 2 == 0 ? 1 : -1;
	return chi;
}

ec_curve::ec_curve(std::vector<double> breakpoints, std::vector<std::int64_t> suffix_chi)
    : breaks_(std::move(breakpoints)), suffix_(std::move(suffix_chi)) {
	if (breaks_.size() != suffix_.size()) throw std::invalid_argument("ec_curve: size mismatch");
}

std::int64_t ec_curve::value(double u) const {
	if (breaks_.empty()) return 0;
	auto it = std::lower_bound(breaks_.begin(), breaks_.end(), u);
	if (it == breaks_.end()) return 0;
	return suffix_[static_cast<std::size_t>(it - breaks_.begin())];
}

double ec_curve::integral_positive() const {
	double total = 0;
	for (std::size_t i = 0; i < breaks_.size(); ++i) {
		if (breaks_[i] <= 0) continue;
		double lo = i == 0 ? 0.0 : std::max(breaks_[i - 1], 0.0);
		total += static_cast<double>(suffix_[i]) * (breaks_[i] - lo);
	}
	return total;
}

namespace {

ec_curve curve_from_extremes(const std::vector<std::int8_t>& dims, const std::vector<double>& entry) {
	// chi{level set at u} = sum over cells with entry >= u of (-1)^dim
	std::vector<std::size_t> order(entry.size());
	for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
	std::sort(order.begin(), order.end(), [&entry](std::size_t a, std::size_t b) { return entry[a] < entry[b]; });
	std::vector<double> breaks;
	std::vector<std::int64_t> suffix;
	// sweep descending, accumulating the alternating count
	std::int64_t acc = 0;
	for (std::size_t k = order.size(); k-- > 0;) {
		std::size_t c = order[k];
		acc += dims[c] % 2 == 0 ? 1 : -1;
		if (k == 0 || entry[order[k - 1]] != entry[c]) {
			breaks.push_back(entry[c]);
			suffix.push_back(acc);
		}
	}
	std::reverse(breaks.begin(), breaks.end());
	std::reverse(suffix.begin(), suffix.end());
	return ec_curve(std::move(breaks), std::move(suffix));
}

}  // namespace

ec_curve ec_curve_superlevel(const grid_field& field) {
	cell_value_table t = cell_extremes(field);
	return curve_from_extremes(t.dim, t.vmin);
}

double euler_integral_real(const grid_field& field) {
	cell_value_table t = cell_extremes(field);
	double per_cell = 0;
	for (std::size_t c = 0; c < t.dim.size(); ++c) {
		double v = std::max(t.vmin[c], 0.0) - std::max(-t.vmax[c], 0.0);
		per_cell += t.dim[c] % 2 == 0 ? v : -v;
	}
	// stepwise route: integrate the two EC curves and assert agreement
	ec_curve super = curve_from_extremes(t.dim, t.vmin);
	std::vector<double> neg_vmax(t.vmax.size());
	for (std::size_t c = 0; c < t.vmax.size(); ++c) neg_vmax[c] = -t.vmax[c];
	ec_curve sub = curve_from_extremes(t.dim, neg_vmax);  // chi{f <= -u} = chi{-f >= u}
	double stepwise = super.integral_positive() - sub.integral_positive();
	double scale = std::max({1.0, std::abs(per_cell), std::abs(stepwise)});
	if (std::abs(per_cell - stepwise) > 1e-12 * scale)
		throw std::runtime_error("euler_integral_real: per-cell and stepwise routes disagree");
	return per_cell;
}

double euler_integral_sublevel(const grid_field& field) {
	cell_value_table t = cell_extremes(field);
	double total = 0;
	for (std::size_t c = 0; c < t.dim.size(); ++c)
		total += t.dim[c] % 2 == 0 ? t.vmax[c] : -t.vmax[c];
	return total;
}

constructible_field::constructible_field(grid_spec s, std::vector<std::int64_t> v)
    : spec(s), values(std::move(v)) {
	if (static_cast<std::int64_t>(values.size()) != spec.num_points())
		throw std::invalid_argument("constructible_field: value count does not match spec");
}

std::int64_t euler_integral_constructible(const constructible_field& h) {
	// integer specialization of the per-cell formula; exact in 64-bit
	const cubical_layout lay(h.spec);
	std::vector<cell_id> corners;
	std::int64_t total = 0;
	for (int r = 0; r < lay.num_classes(); ++r) {
		const auto& ext = lay.class_extent(r);
		const int sign = lay.class_dim(r) % 2 == 0 ? 1 : -1;
		std::array<int, 3> base = {0, 0, 0};
		for (std::int64_t i = 0; i < lay.class_count(r); ++i) {
			lay.corners(r, base, corners);
			std::int64_t lo = h.values[corners[0]], hi = lo;
			for (std::size_t k = 1; k < corners.size(); ++k) {
				lo = std::min(lo, h.values[corners[k]]);
				hi = std::max(hi, h.values[corners[k]]);
			}
			total += sign * (std::max<std::int64_t>(lo, 0) - std::max<std::int64_t>(-hi, 0));
			for (int a = h.spec.dim - 1; a >= 0; --a) {
				int& c = base[static_cast<std::size_t>(a)];
				if (++c < ext[static_cast<std::size_t>(a)]) break;
				c = 0;
			}
		}
	}
	return total;
}

std::vector<cell_id> rasterize(const grid_spec& spec,
                               const std::function<bool(const std::array<double, 3>&)>& inside) {
	const cubical_layout lay(spec);
	const std::int64_t nv = spec.num_points();
	std::vector<std::uint8_t> vertex_in(static_cast<std::size_t>(nv), 0);
	for (std::int64_t v = 0; v < nv; ++v) {
		auto p = spec.point_of(v);
		std::array<double, 3> x = {0, 0, 0};
		for (int a = 0; a < spec.dim; ++a)
			x[static_cast<std::size_t>(a)] = spec.coord(a, p[static_cast<std::size_t>(a)]);
		vertex_in[static_cast<std::size_t>(v)] = inside(x) ? 1 : 0;
	}
	std::vector<cell_id> out;
	std::vector<cell_id> corners;
	std::int64_t id = 0;
	for (int r = 0; r < lay.num_classes(); ++r) {
		const auto& ext = lay.class_extent(r);
		std::array<int, 3> base = {0, 0, 0};
		for (std::int64_t i = 0; i < lay.class_count(r); ++i, ++id) {
			lay.corners(r, base, corners);
			bool all = true;
			for (cell_id v : corners)
				if (!vertex_in[v]) {
					all = false;
					break;
				}
			if (all) out.push_back(static_cast<cell_id>(id));
			for (int a = spec.dim - 1; a >= 0; --a) {
				int& c = base[static_cast<std::size_t>(a)];
				if (++c < ext[static_cast<std::size_t>(a)]) break;
				c = 0;
			}
		}
	}
	return out;
}

std::vector<cell_id> rasterize_rect(const grid_spec& spec, const std::array<double, 3>& lo,
                                    const std::array<double, 3>& hi) {
	return rasterize(spec, [&](const std::array<double, 3>& x) {
		for (int a = 0; a < spec.dim; ++a) {
			std::size_t s = static_cast<std::size_t>(a);
			if (x[s] < lo[s] || x[s] > hi[s]) return false;
		}
		return true;
	});
}

std::vector<cell_id> rasterize_disc(const grid_spec& spec, const std::array<double, 3>& center,
                                    double radius) {
	return rasterize(spec, [&](const std::array<double, 3>& x) {
		double r2 = 0;
		for (int a = 0; a < spec.dim; ++a) {
			std::size_t s = static_cast<std::size_t>(a);
			double d = x[s] - center[s];
			r2 += d * d;
		}
		return r2 <= radius * radius;
	});
}

namespace {

// chi of a sorted cell-id set plus face-closure check, against the layout
std::int64_t support_chi_checked(const cubical_layout& lay, const std::vector<cell_id>& cells) {
	std::int64_t chi = 0;
	std::vector<cell_id> faces;
	for (cell_id c : cells) {
		// locate the cell's class by offset
		int r = 0;
		while (r + 1 < lay.num_classes() && lay.class_offset(r + 1) <= static_cast<std::int64_t>(c)) ++r;
		chi += lay.class_dim(r) % 2 == 0 ? 1 : -1;
		lay.faces(r, lay.base_of(r, c), faces);
		for (cell_id f : faces)
			if (!std::binary_search(cells.begin(), cells.end(), f))
				throw std::invalid_argument("target_scene: support not closed under faces");
	}
	return chi;
}

}  // namespace

void validate_scene(const target_scene& scene) {
	if (scene.gamma == 0) throw std::invalid_argument("target_scene: gamma must be nonzero");
	const cubical_layout lay(scene.domain);
	for (const auto& sup : scene.supports) {
		if (!std::is_sorted(sup.begin(), sup.end()))
			throw std::invalid_argument("target_scene: support ids must be sorted");
		if (support_chi_checked(lay, sup) != scene.gamma)
			throw std::invalid_argument("target_scene: support Euler characteristic differs from gamma");
	}
}

std::int64_t count_targets(const target_scene& scene) {
	validate_scene(scene);
	const std::int64_t nv = scene.domain.num_points();
	std::vector<std::int64_t> h(static_cast<std::size_t>(nv), 0);
	for (const auto& sup : scene.supports) {
		// vertex cells occupy ids [0, nv)
		for (cell_id c : sup) {
			if (static_cast<std::int64_t>(c) >= nv) break;
			++h[c];
		}
	}
	std::int64_t integral = euler_integral_constructible(constructible_field(scene.domain, std::move(h)));
	if (integral % scene.gamma != 0)
		throw std::runtime_error("count_targets: integral not divisible by gamma (rasterization violates tameness)");
	return integral / scene.gamma;
}

identity_check barcode_identity_check(const grid_field& field) {
	filtered_complex fc = sublevel_filtration(field);
	barcode bc = reduce(fc);
	double fmax = *std::max_element(field.values.begin(), field.values.end());
	identity_check out;
	out.lhs = barcode_euler_char(bc, fmax);
	out.rhs = fmax * static_cast<double>(euler_char_closed(fc)) - euler_integral_sublevel(field);
	return out;
}

}  // namespace tdalab
