#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdalab {

enum class topology { box, torus };

// regular grid over [0,side]^dim (box) or the flat torus of circumference side
struct grid_spec {
	int dim = 2;
	std::array<int, 3> sizes = {0, 0, 0};
	double side = 1.0;
	topology topo = topology::box;

	grid_spec() = default;
	grid_spec(int d, std::array<int, 3> s, double side_len, topology t)
	    : dim(d), sizes(s), side(side_len), topo(t) {
		validate();
	}
	static grid_spec square(int n, double side_len = 1.0, topology t = topology::box) {
		return grid_spec(2, {n, n, 1}, side_len, t);
	}
	static grid_spec line(int n, double side_len = 1.0, topology t = topology::box) {
		return grid_spec(1, {n, 1, 1}, side_len, t);
	}
	static grid_spec cube(int n, double side_len = 1.0, topology t = topology::box) {
		return grid_spec(3, {n, n, n}, side_len, t);
	}

	void validate() const {
		if (dim < 1 || dim > 3) throw std::invalid_argument("grid_spec: dim must be 1, 2 or 3");
		if (side <= 0) throw std::invalid_argument("grid_spec: side must be positive");
		for (int a = 0; a < dim; ++a)
			if (sizes[static_cast<std::size_t>(a)] < 2)
				throw std::invalid_argument("grid_spec: need at least 2 points per axis");
	}

	std::int64_t num_points() const {
		std::int64_t n = 1;
		for (int a = 0; a < dim; ++a) n *= sizes[static_cast<std::size_t>(a)];
		return n;
	}

	double spacing(int axis) const {
		int s = sizes[static_cast<std::size_t>(axis)];
		return topo == topology::box ? side / (s - 1) : side / s;
	}

	// physical coordinate of a grid index along an axis
	double coord(int axis, int i) const { return spacing(axis) * i; }

	// minimal lag between indices i and j along an axis (wrapped for torus)
	double lag(int axis, int i, int j) const {
		int s = sizes[static_cast<std::size_t>(axis)];
		int d = i > j ? i - j : j - i;
		if (topo == topology::torus && d > s - d) d = s - d;
		return spacing(axis) * d;
	}

	std::int64_t index_of(const std::array<int, 3>& p) const {
		std::int64_t idx = 0;
		for (int a = 0; a < dim; ++a) idx = idx * sizes[static_cast<std::size_t>(a)] + p[static_cast<std::size_t>(a)];
		return idx;
	}

	std::array<int, 3> point_of(std::int64_t idx) const {
		std::array<int, 3> p = {0, 0, 0};
		for (int a = dim - 1; a >= 0; --a) {
			int s = sizes[static_cast<std::size_t>(a)];
			p[static_cast<std::size_t>(a)] = static_cast<int>(idx % s);
			idx /= s;
		}
		return p;
	}

	bool operator==(const grid_spec& o) const {
		if (dim != o.dim || side != o.side || topo != o.topo) return false;
		for (int a = 0; a < dim; ++a)
			if (sizes[static_cast<std::size_t>(a)] != o.sizes[static_cast<std::size_t>(a)]) return false;
		return true;
	}
};

struct grid_field {
	grid_spec spec;
	std::vector<double> values;  // row-major, length spec.num_points()

	grid_field() = default;
	grid_field(grid_spec s, std::vector<double> v) : spec(s), values(std::move(v)) {
		if (static_cast<std::int64_t>(values.size()) != spec.num_points())
			throw std::invalid_argument("grid_field: value count does not match spec");
	}

	double operator[](std::int64_t i) const { return values[static_cast<std::size_t>(i)]; }

	grid_field negated() const {
		grid_field g = *this;
		for (double& v : g.values) v = -v;
		return g;
	}
};

}  // namespace tdalab
