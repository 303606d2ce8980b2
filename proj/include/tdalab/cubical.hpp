#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tdalab/complex.hpp"
#include "tdalab/grid.hpp"

namespace tdalab {

// Enumeration of the full cubical complex on a grid. Cells are (axis-mask, base
// vertex): the cell spans the masked axes from the base point. Vertices come
// first, then classes ordered by dimension, so cell ids of faces always exist.
class cubical_layout {
public:
	explicit cubical_layout(const grid_spec& spec);

	const grid_spec& spec() const { return spec_; }
	std::int64_t num_cells() const { return total_; }
	int num_classes() const { return nclasses_; }

	int class_mask(int rank) const { return class_mask_[static_cast<std::size_t>(rank)]; }
	int class_dim(int rank) const { return class_dim_[static_cast<std::size_t>(rank)]; }
	std::int64_t class_offset(int rank) const { return class_offset_[static_cast<std::size_t>(rank)]; }
	std::int64_t class_count(int rank) const { return class_count_[static_cast<std::size_t>(rank)]; }
	const std::array<int, 3>& class_extent(int rank) const { return class_extent_[static_cast<std::size_t>(rank)]; }

	std::int64_t id_of(int rank, const std::array<int, 3>& base) const {
		std::int64_t idx = 0;
		const auto& ext = class_extent_[static_cast<std::size_t>(rank)];
		for (int a = 0; a < spec_.dim; ++a) idx = idx * ext[static_cast<std::size_t>(a)] + base[static_cast<std::size_t>(a)];
		return class_offset_[static_cast<std::size_t>(rank)] + idx;
	}

	std::array<int, 3> base_of(int rank, std::int64_t id) const {
		std::int64_t idx = id - class_offset_[static_cast<std::size_t>(rank)];
		std::array<int, 3> p = {0, 0, 0};
		const auto& ext = class_extent_[static_cast<std::size_t>(rank)];
		for (int a = spec_.dim - 1; a >= 0; --a) {
			p[static_cast<std::size_t>(a)] = static_cast<int>(idx % ext[static_cast<std::size_t>(a)]);
			idx /= ext[static_cast<std::size_t>(a)];
		}
		return p;
	}

	int rank_of_mask(int mask) const { return rank_of_mask_[static_cast<std::size_t>(mask)]; }

	// corner vertex indices of the cell (2^dim(cell) of them)
	void corners(int rank, const std::array<int, 3>& base, std::vector<cell_id>& out) const;

	// face ids of the cell: both end-faces along each spanned axis
	void faces(int rank, const std::array<int, 3>& base, std::vector<cell_id>& out) const;

private:
	grid_spec spec_;
	int nclasses_;
	std::int64_t total_;
	std::array<int, 8> class_mask_;
	std::array<int, 8> class_dim_;
	std::array<int, 8> rank_of_mask_;
	std::array<std::int64_t, 8> class_offset_;
	std::array<std::int64_t, 8> class_count_;
	std::array<std::array<int, 3>, 8> class_extent_;
};

// lower-star filtration of sublevel sets: entrance(cell) = max of f over corners
filtered_complex sublevel_filtration(const grid_field& field);

// superlevel sets via negation: equals sublevel_filtration(-f) with the
// time axis t = -u recorded in the kind tag
filtered_complex superlevel_filtration(const grid_field& field);

// per-cell corner extremes without materializing boundaries; vmin drives
// closed superlevel membership, vmax closed sublevel membership
struct cell_value_table {
	std::vector<std::int8_t> dim;
	std::vector<double> vmin;
	std::vector<double> vmax;
};
cell_value_table cell_extremes(const grid_field& field);

// Euler characteristic of the covered region: a cell is present iff all of its
// corner vertices are flagged
std::int64_t chi_covered(const grid_spec& spec, const std::vector<std::uint8_t>& covered);

}  // namespace tdalab
