#include "tdalab/cubical.hpp"

#include <algorithm>
#include <bit>
#include <limits>

namespace tdalab {

cubical_layout::cubical_layout(const grid_spec& spec) : spec_(spec) {
	spec_.validate();
	nclasses_ = 1 << spec_.dim;
	std::vector<int> masks(static_cast<std::size_t>(nclasses_));
	for (int m = 0; m < nclasses_; ++m) masks[static_cast<std::size_t>(m)] = m;
	std::sort(masks.begin(), masks.end(), [](int a, int b) {
		int pa = std::popcount(static_cast<unsigned>(a)), pb = std::popcount(static_cast<unsigned>(b));
		return pa != pb ? pa < pb : a < b;
	});
	total_ = 0;
	for (int r = 0; r < nclasses_; ++r) {
		int mask = masks[static_cast<std::size_t>(r)];
		class_mask_[static_cast<std::size_t>(r)] = mask;
		class_dim_[static_cast<std::size_t>(r)] = std::popcount(static_cast<unsigned>(mask));
		rank_of_mask_[static_cast<std::size_t>(mask)] = r;
		auto& ext = class_extent_[static_cast<std::size_t>(r)];
		ext = {1, 1, 1};
		std::int64_t count = 1;
		for (int a = 0; a < spec_.dim; ++a) {
			int s = spec_.sizes[static_cast<std::size_t>(a)];
			int e = (mask >> a) & 1 ? (spec_.topo == topology::box ? s - 1 : s) : s;
			ext[static_cast<std::size_t>(a)] = e;
			count *= e;
		}
		class_offset_[static_cast<std::size_t>(r)] = total_;
		class_count_[static_cast<std::size_t>(r)] = count;
		total_ += count;
	}
}

void cubical_layout::corners(int rank, const std::array<int, 3>& base, std::vector<cell_id>& out) const {
	out.clear();
	int mask = class_mask_[static_cast<std::size_t>(rank)];
	int d = class_dim_[static_cast<std::size_t>(rank)];
	for (int b = 0; b < (1 << d); ++b) {
		std::array<int, 3> p = base;
		int bit = 0;
		for (int a = 0; a < spec_.dim; ++a) {
			if (!((mask >> a) & 1)) continue;
			if ((b >> bit) & 1) {
				int s = spec_.sizes[static_cast<std::size_t>(a)];
				int& c = p[static_cast<std::size_t>(a)];
				c = c + 1 == s && spec_.topo == topology::torus ? 0 : c + 1;
			}
			++bit;
		}
		out.push_back(static_cast<cell_id>(spec_.index_of(p)));
	}
}

void cubical_layout::faces(int rank, const std::array<int, 3>& base, std::vector<cell_id>& out) const {
	out.clear();
	int mask = class_mask_[static_cast<std::size_t>(rank)];
	for (int a = 0; a < spec_.dim; ++a) {
		if (!((mask >> a) & 1)) continue;
		int sub = rank_of_mask_[static_cast<std::size_t>(mask & ~(1 << a))];
		out.push_back(static_cast<cell_id>(id_of(sub, base)));
		std::array<int, 3> far = base;
		int s = spec_.sizes[static_cast<std::size_t>(a)];
		int& c = far[static_cast<std::size_t>(a)];
		c = c + 1 == s && spec_.topo == topology::torus ? 0 : c + 1;
		out.push_back(static_cast<cell_id>(id_of(sub, far)));
	}
}

namespace {

filtered_complex build_filtration(const grid_field& field, bool negate) {
	const cubical_layout lay(field.spec);
	filtered_complex fc;
	fc.family = cell_family::cubical;
	std::size_t ncells = static_cast<std::size_t>(lay.num_cells());
	std::size_t nb = 0, nv = 0;
	for (int r = 0; r < lay.num_classes(); ++r) {
		int d = lay.class_dim(r);
		nb += static_cast<std::size_t>(lay.class_count(r)) * static_cast<std::size_t>(2 * d);
		nv += static_cast<std::size_t>(lay.class_count(r)) << d;
	}
	fc.reserve(ncells, nb, nv);

	std::vector<cell_id> corner_buf, face_buf;
	for (int r = 0; r < lay.num_classes(); ++r) {
		const auto& ext = lay.class_extent(r);
		std::array<int, 3> base = {0, 0, 0};
		for (std::int64_t i = 0; i < lay.class_count(r); ++i) {
			lay.corners(r, base, corner_buf);
			lay.faces(r, base, face_buf);
			double t = -std::numeric_limits<double>::infinity();
			for (cell_id v : corner_buf) {
				double x = negate ? -field[v] : field[v];
				t = std::max(t, x);
			}
			fc.add_cell(lay.class_dim(r), std::span<const cell_id>(face_buf),
			            std::span<const cell_id>(corner_buf), t);
			// advance row-major
			for (int a = field.spec.dim - 1; a >= 0; --a) {
				int& c = base[static_cast<std::size_t>(a)];
				if (++c < ext[static_cast<std::size_t>(a)]) break;
				c = 0;
			}
		}
	}
	return fc;
}

}  // namespace

filtered_complex sublevel_filtration(const grid_field& field) {
	filtered_complex fc = build_filtration(field, false);
	fc.kind = filtration_kind::sublevel;
	return fc;
}

filtered_complex superlevel_filtration(const grid_field& field) {
	filtered_complex fc = build_filtration(field, true);
	fc.kind = filtration_kind::superlevel_negated;
	return fc;
}

cell_value_table cell_extremes(const grid_field& field) {
	const cubical_layout lay(field.spec);
	cell_value_table out;
	out.dim.resize(static_cast<std::size_t>(lay.num_cells()));
	out.vmin.resize(static_cast<std::size_t>(lay.num_cells()));
	out.vmax.resize(static_cast<std::size_t>(lay.num_cells()));
	std::vector<cell_id> corner_buf;
	std::int64_t id = 0;
	for (int r = 0; r < lay.num_classes(); ++r) {
		const auto& ext = lay.class_extent(r);
		std::array<int, 3> base = {0, 0, 0};
		for (std::int64_t i = 0; i < lay.class_count(r); ++i, ++id) {
			lay.corners(r, base, corner_buf);
			double lo = field[corner_buf[0]], hi = lo;
			for (std::size_t k = 1; k < corner_buf.size(); ++k) {
				double x = field[corner_buf[k]];
				lo = std::min(lo, x);
				hi = std::max(hi, x);
			}
			out.dim[static_cast<std::size_t>(id)] = static_cast<std::int8_t>(lay.class_dim(r));
			out.vmin[static_cast<std::size_t>(id)] = lo;
			out.vmax[static_cast<std::size_t>(id)] = hi;
			for (int a = field.spec.dim - 1; a >= 0; --a) {
				int& c = base[static_cast<std::size_t>(a)];
				if (++c < ext[static_cast<std::size_t>(a)]) break;
				c = 0;
			}
		}
	}
	return out;
}

std::int64_t chi_covered(const grid_spec& spec, const std::vector<std::uint8_t>& covered) {
	const cubical_layout lay(spec);
	std::vector<cell_id> corner_buf;
	std::int64_t chi = 0;
	for (int r = 0; r < lay.num_classes(); ++r) {
		const auto& ext = lay.class_extent(r);
		const int sign = lay.class_dim(r) % 2 == 0 ? 1 : -1;
		std::array<int, 3> base = {0, 0, 0};
		for (std::int64_t i = 0; i < lay.class_count(r); ++i) {
			lay.corners(r, base, corner_buf);
			bool all = true;
			for (cell_id v : corner_buf)
				if (!covered[v]) {
					all = false;
					break;
				}
			if (all) chi += sign;
			for (int a = spec.dim - 1; a >= 0; --a) {
				int& c = base[static_cast<std::size_t>(a)];
				if (++c < ext[static_cast<std::size_t>(a)]) break;
				c = 0;
			}
		}
	}
	return chi;
}

}  // namespace tdalab
