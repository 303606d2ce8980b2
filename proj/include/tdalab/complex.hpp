#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace tdalab {

using cell_id = std::uint32_t;

// meaning of the entrance-time axis
enum class filtration_kind {
	sublevel,            // entrance = field level u
	superlevel_negated,  // entrance t = -u; report levels as u = -t
	scale,               // geometric scale (point-cloud radius)
};

enum class cell_family { cubical, simplicial };

struct cell_view {
	cell_id id;
	int dim;
	std::span<const cell_id> boundary;
	std::span<const cell_id> vertices;
};

// Cells with entrance times, stored structure-of-arrays; ids are positions.
// Invariant (checked by validate_monotone): entrance(face) <= entrance(cell).
class filtered_complex {
public:
	filtered_complex() = default;

	cell_id add_cell(int dim, std::initializer_list<cell_id> boundary,
	                 std::initializer_list<cell_id> vertices, double entrance) {
		return add_cell(dim, std::span<const cell_id>(boundary.begin(), boundary.size()),
		                std::span<const cell_id>(vertices.begin(), vertices.size()), entrance);
	}

	cell_id add_cell(int dim, std::span<const cell_id> boundary, std::span<const cell_id> vertices,
	                 double entrance) {
		cell_id id = static_cast<cell_id>(dim_.size());
		dim_.push_back(static_cast<std::uint8_t>(dim));
		entrance_.push_back(entrance);
		boundary_flat_.insert(boundary_flat_.end(), boundary.begin(), boundary.end());
		boundary_off_.push_back(static_cast<std::uint64_t>(boundary_flat_.size()));
		vertices_flat_.insert(vertices_flat_.end(), vertices.begin(), vertices.end());
		vertices_off_.push_back(static_cast<std::uint64_t>(vertices_flat_.size()));
		return id;
	}

	std::size_t size() const { return dim_.size(); }
	int dim(cell_id i) const { return dim_[i]; }
	double entrance(cell_id i) const { return entrance_[i]; }
	void set_entrance(cell_id i, double t) { entrance_[i] = t; }

	std::span<const cell_id> boundary(cell_id i) const {
		std::uint64_t b = i == 0 ? 0 : boundary_off_[i - 1];
		return {boundary_flat_.data() + b, boundary_off_[i] - b};
	}
	std::span<const cell_id> vertices(cell_id i) const {
		std::uint64_t b = i == 0 ? 0 : vertices_off_[i - 1];
		return {vertices_flat_.data() + b, vertices_off_[i] - b};
	}
	cell_view cell(cell_id i) const { return {i, dim(i), boundary(i), vertices(i)}; }

	int top_dim() const {
		int d = 0;
		for (auto v : dim_) d = std::max(d, static_cast<int>(v));
		return d;
	}

	filtration_kind kind = filtration_kind::sublevel;
	cell_family family = cell_family::cubical;

	void reserve(std::size_t cells, std::size_t boundary_total, std::size_t vertex_total) {
		dim_.reserve(cells);
		entrance_.reserve(cells);
		boundary_off_.reserve(cells);
		vertices_off_.reserve(cells);
		boundary_flat_.reserve(boundary_total);
		vertices_flat_.reserve(vertex_total);
	}

	// cells ordered by (entrance, dim, id); every face precedes its cofaces
	std::vector<cell_id> reduction_order() const;

	bool is_monotone() const;
	void validate_monotone() const {
		if (!is_monotone()) throw std::invalid_argument("filtered_complex: entrance times not monotone under faces");
	}

	// boundary-of-boundary cancels over Z2
	bool boundary_squares_to_zero() const;

private:
	std::vector<std::uint8_t> dim_;
	std::vector<double> entrance_;
	std::vector<cell_id> boundary_flat_;
	std::vector<std::uint64_t> boundary_off_;
	std::vector<cell_id> vertices_flat_;
	std::vector<std::uint64_t> vertices_off_;
};

// ids of cells with entrance <= t; closed under faces by monotonicity
std::vector<cell_id> complex_at(const filtered_complex& fc, double t);

// entrance(cell) = max of raw over all faces of the cell, including itself
// (the max-completion that turns an arbitrary assignment into an entrance field)
void monotone_completion(filtered_complex& fc, const std::vector<double>& raw);

}  // namespace tdalab
