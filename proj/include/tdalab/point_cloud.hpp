#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tdalab/complex.hpp"

namespace tdalab {

enum class metric_kind { l2, linf };

struct point_cloud {
	int dim = 2;
	std::vector<std::vector<double>> points;
	metric_kind metric = metric_kind::l2;

	point_cloud() = default;
	point_cloud(int d, std::vector<std::vector<double>> pts, metric_kind m = metric_kind::l2)
	    : dim(d), points(std::move(pts)), metric(m) {
		if (points.empty()) throw std::invalid_argument("point_cloud: need at least one point");
		for (const auto& p : points) {
			if (static_cast<int>(p.size()) != dim)
				throw std::invalid_argument("point_cloud: point dimension mismatch");
			for (double x : p)
				if (!std::isfinite(x)) throw std::invalid_argument("point_cloud: non-finite coordinate");
		}
	}

	std::size_t size() const { return points.size(); }
	double distance(std::size_t i, std::size_t j) const;
};

inline constexpr std::size_t kPointCountCap = 512;

// ball of smallest radius containing all points; move-to-front Welzl with
// support sets solved in their affine hull
struct ball {
	std::vector<double> center;
	double radius = 0;
};
ball min_enclosing_ball(const std::vector<std::vector<double>>& points);

// Simplexwise filtrations under the radius-epsilon convention: a simplex enters
// at the smallest ball radius at which its defining intersections appear, so an
// edge of length L enters at L/2. max_entrance prunes the enumeration (the
// returned filtration is the full one truncated at that scale).
filtered_complex rips_filtration(const point_cloud& cloud, int maxdim,
                                 double max_entrance = std::numeric_limits<double>::infinity());

// entrance = minimum enclosing ball radius (L2) or half the largest coordinate
// range (Linf, where Cech and Rips coincide)
filtered_complex cech_filtration(const point_cloud& cloud, int maxdim,
                                 double max_entrance = std::numeric_limits<double>::infinity());

}  // namespace tdalab
