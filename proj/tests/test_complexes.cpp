#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "tdalab/cubical.hpp"
#include "tdalab/point_cloud.hpp"
#include "tdalab/rng.hpp"

using namespace tdalab;

namespace {

grid_field make_field(const grid_spec& spec, std::vector<double> vals) {
	return grid_field(spec, std::move(vals));
}

grid_field random_field(const grid_spec& spec, std::uint64_t seed) {
	rng gen(seed);
	std::vector<double> v(static_cast<std::size_t>(spec.num_points()));
	for (double& x : v) x = gen.normal();
	return make_field(spec, std::move(v));
}

point_cloud random_cloud(int n, int dim, std::uint64_t seed, metric_kind metric = metric_kind::l2) {
	rng gen(seed);
	std::vector<std::vector<double>> pts;
	for (int i = 0; i < n; ++i) {
		std::vector<double> p(static_cast<std::size_t>(dim));
		for (double& x : p) x = gen.uniform(-1.0, 1.0);
		pts.push_back(std::move(p));
	}
	return point_cloud(dim, std::move(pts), metric);
}

// independent minimum-enclosing-ball oracle: Badoiu-Clarkson iteration, which
// walks the center toward the farthest point with step 1/(k+1) and converges
// to the optimum of the convex max-distance objective from above
double meb_radius_oracle(const std::vector<std::vector<double>>& pts) {
	const std::size_t d = pts[0].size();
	std::vector<double> c(d, 0.0);
	for (const auto& p : pts)
		for (std::size_t a = 0; a < d; ++a) c[a] += p[a] / static_cast<double>(pts.size());
	auto farthest = [&](const std::vector<double>& center) {
		std::size_t best = 0;
		double worst = -1;
		for (std::size_t i = 0; i < pts.size(); ++i) {
			double s = 0;
			for (std::size_t a = 0; a < d; ++a) s += (pts[i][a] - center[a]) * (pts[i][a] - center[a]);
			if (s > worst) {
				worst = s;
				best = i;
			}
		}
		return std::make_pair(best, std::sqrt(worst));
	};
	for (int k = 1; k <= 400000; ++k) {
		auto [far, dist] = farthest(c);
		double step = 1.0 / (k + 1);
		for (std::size_t a = 0; a < d; ++a) c[a] += (pts[far][a] - c[a]) * step;
	}
	return farthest(c).second;
}

}  // namespace

TEST_CASE("1D sublevel filtration follows the max rule") {
	grid_field f = make_field(grid_spec::line(2), {0.0, 1.0});
	filtered_complex fc = sublevel_filtration(f);
	REQUIRE(fc.size() == 3);
	CHECK(fc.entrance(0) == 0.0);
	CHECK(fc.entrance(1) == 1.0);
	CHECK(fc.entrance(2) == 1.0);  // the edge
	CHECK(fc.dim(2) == 1);
	CHECK(fc.boundary(2).size() == 2);
}

TEST_CASE("constant field enters at once with chi 1") {
	grid_field f = make_field(grid_spec::square(4), std::vector<double>(16, 2.5));
	filtered_complex fc = sublevel_filtration(f);
	std::int64_t chi = 0;
	for (cell_id c = 0; c < fc.size(); ++c) {
		CHECK(fc.entrance(c) == 2.5);
		chi += fc.dim(c) % 2 == 0 ? 1 : -1;
	}
	CHECK(chi == 1);
}

TEST_CASE("strict interior minimum enters first") {
	grid_spec spec = grid_spec::square(3);
	std::vector<double> v(9, 1.0);
	v[static_cast<std::size_t>(spec.index_of({1, 1, 0}))] = -1.0;
	filtered_complex fc = sublevel_filtration(make_field(spec, v));
	auto order = fc.reduction_order();
	CHECK(order.front() == static_cast<cell_id>(spec.index_of({1, 1, 0})));
}

TEST_CASE("superlevel is sublevel of the negated field, cell by cell") {
	grid_field f = random_field(grid_spec::square(6), 31);
	filtered_complex sup = superlevel_filtration(f);
	filtered_complex sub = sublevel_filtration(f.negated());
	REQUIRE(sup.size() == sub.size());
	for (cell_id c = 0; c < sup.size(); ++c) {
		CHECK(sup.entrance(c) == sub.entrance(c));
		CHECK(sup.dim(c) == sub.dim(c));
	}
	CHECK(sup.kind == filtration_kind::superlevel_negated);
}

TEST_CASE("a strict global maximum enters the superlevel filtration first") {
	grid_spec spec = grid_spec::square(4);
	rng gen(12);
	std::vector<double> v(16);
	for (double& x : v) x = gen.uniform(-1.0, 0.5);
	v[static_cast<std::size_t>(spec.index_of({2, 1, 0}))] = 3.0;
	filtered_complex sup = superlevel_filtration(grid_field(spec, v));
	CHECK(sup.reduction_order().front() == static_cast<cell_id>(spec.index_of({2, 1, 0})));
}

TEST_CASE("superlevel complex matches the set-builder oracle") {
	grid_field f = random_field(grid_spec::square(5), 17);
	filtered_complex sup = superlevel_filtration(f);
	cell_value_table t = cell_extremes(f);
	rng gen(3);
	for (int k = 0; k < 20; ++k) {
		double u = gen.uniform(-2.0, 2.0);
		// oracle: cells whose minimum corner value is >= u
		std::set<cell_id> expect;
		for (cell_id c = 0; c < t.dim.size(); ++c)
			if (t.vmin[c] >= u) expect.insert(c);
		auto got = complex_at(sup, -u);
		CHECK(expect == std::set<cell_id>(got.begin(), got.end()));
	}
}

TEST_CASE("cubical boundaries have 2d faces and square to zero") {
	for (topology topo : {topology::box, topology::torus}) {
		grid_field f = random_field(grid_spec::square(4, 1.0, topo), 5);
		filtered_complex fc = sublevel_filtration(f);
		for (cell_id c = 0; c < fc.size(); ++c)
			CHECK(fc.boundary(c).size() == static_cast<std::size_t>(2 * fc.dim(c)));
		CHECK(fc.boundary_squares_to_zero());
		CHECK(fc.is_monotone());
	}
}

TEST_CASE("3D cubical complex has the right cell counts") {
	grid_spec spec = grid_spec::cube(3);
	cubical_layout lay(spec);
	// (2*3-1)^3 cells in total for a box
	CHECK(lay.num_cells() == 125);
	grid_field f = random_field(spec, 23);
	filtered_complex fc = sublevel_filtration(f);
	CHECK(fc.boundary_squares_to_zero());
	std::int64_t chi = 0;
	for (cell_id c = 0; c < fc.size(); ++c) chi += fc.dim(c) % 2 == 0 ? 1 : -1;
	CHECK(chi == 1);
}

TEST_CASE("rips entrance times") {
	point_cloud two(1, {{0.0}, {2.0}});
	filtered_complex fc = rips_filtration(two, 1);
	REQUIRE(fc.size() == 3);
	CHECK(fc.entrance(2) == doctest::Approx(1.0));

	double s = 0.8;
	point_cloud tri(2, {{0.0, 0.0}, {s, 0.0}, {s / 2, s * std::sqrt(3.0) / 2}});
	filtered_complex ft = rips_filtration(tri, 2);
	REQUIRE(ft.size() == 7);
	CHECK(ft.entrance(6) == doctest::Approx(s / 2).epsilon(1e-12));
	for (cell_id c = 0; c < ft.size(); ++c)
		if (ft.dim(c) >= 1) CHECK(ft.boundary(c).size() == static_cast<std::size_t>(ft.dim(c) + 1));

	point_cloud five = random_cloud(5, 2, 71);
	filtered_complex f0 = rips_filtration(five, 0);
	CHECK(f0.size() == 5);
}

TEST_CASE("cech entrance is the minimum enclosing ball radius") {
	double s = 1.3;
	point_cloud tri(2, {{0.0, 0.0}, {s, 0.0}, {s / 2, s * std::sqrt(3.0) / 2}});
	filtered_complex fc = cech_filtration(tri, 2);
	REQUIRE(fc.size() == 7);
	CHECK(fc.entrance(6) == doctest::Approx(s / std::sqrt(3.0)).epsilon(1e-9));
	CHECK(fc.entrance(6) == doctest::Approx(meb_radius_oracle(tri.points)).epsilon(5e-3));

	point_cloud one(2, {{0.4, -0.2}});
	filtered_complex f1 = cech_filtration(one, 2);
	CHECK(f1.size() == 1);
	CHECK(f1.entrance(0) == 0.0);
}

TEST_CASE("welzl agrees with the subset-enumeration oracle") {
	// oracle: smallest circumball over all support subsets that contains everything
	rng gen(2024);
	for (int trial = 0; trial < 40; ++trial) {
		int d = trial % 2 ? 2 : 3;
		int n = 2 + static_cast<int>(gen.below(4));
		std::vector<std::vector<double>> pts;
		for (int i = 0; i < n; ++i) {
			std::vector<double> p(static_cast<std::size_t>(d));
			for (double& x : p) x = gen.uniform(-1.0, 1.0);
			pts.push_back(std::move(p));
		}
		ball b = min_enclosing_ball(pts);
		// minimal up to the oracle's convergence, valid, and above half-diameter
		CHECK(b.radius <= meb_radius_oracle(pts) * (1 + 5e-3) + 1e-12);
		double half_diam = 0;
		for (std::size_t i = 0; i < pts.size(); ++i)
			for (std::size_t j = i + 1; j < pts.size(); ++j) {
				double s2 = 0;
				for (std::size_t a = 0; a < pts[i].size(); ++a)
					s2 += (pts[i][a] - pts[j][a]) * (pts[i][a] - pts[j][a]);
				half_diam = std::max(half_diam, std::sqrt(s2) / 2);
			}
		CHECK(b.radius >= half_diam - 1e-12);
		for (const auto& p : pts) {
			double r2 = 0;
			for (std::size_t a = 0; a < p.size(); ++a) r2 += (p[a] - b.center[a]) * (p[a] - b.center[a]);
			CHECK(std::sqrt(r2) <= b.radius * (1 + 1e-9) + 1e-9);
		}
	}
}

TEST_CASE("cech is sandwiched between rips and the Jung bound") {
	for (int trial = 0; trial < 10; ++trial) {
		int d = trial % 2 ? 3 : 2;
		point_cloud cloud = random_cloud(10, d, 100 + static_cast<std::uint64_t>(trial));
		filtered_complex rips = rips_filtration(cloud, d);
		filtered_complex cech = cech_filtration(cloud, d);
		REQUIRE(rips.size() == cech.size());
		const double jung = std::sqrt(2.0 * d / (d + 1.0));
		for (cell_id c = 0; c < rips.size(); ++c) {
			CHECK(cech.entrance(c) >= rips.entrance(c) - 1e-12);
			CHECK(cech.entrance(c) <= rips.entrance(c) * jung + 1e-12);
		}
	}
}

TEST_CASE("Linf cech and rips coincide cell by cell") {
	point_cloud cloud = random_cloud(12, 2, 55, metric_kind::linf);
	filtered_complex rips = rips_filtration(cloud, 2);
	filtered_complex cech = cech_filtration(cloud, 2);
	REQUIRE(rips.size() == cech.size());
	for (cell_id c = 0; c < rips.size(); ++c) {
		CHECK(rips.entrance(c) == cech.entrance(c));
		CHECK(std::equal(rips.vertices(c).begin(), rips.vertices(c).end(), cech.vertices(c).begin()));
	}
}

TEST_CASE("point count cap is enforced") {
	std::vector<std::vector<double>> pts(513, {0.0, 0.0});
	for (std::size_t i = 0; i < pts.size(); ++i) pts[i][0] = static_cast<double>(i);
	point_cloud big(2, std::move(pts));
	CHECK_THROWS_AS(rips_filtration(big, 1), std::invalid_argument);
}

TEST_CASE("monotone completion") {
	// a path with an edge assigned below its endpoints
	filtered_complex fc;
	fc.add_cell(0, {}, {0}, 1.0);
	fc.add_cell(0, {}, {1}, 2.0);
	fc.add_cell(1, {0, 1}, {0, 1}, 0.0);
	monotone_completion(fc, {1.0, 2.0, 0.0});
	CHECK(fc.entrance(2) == 2.0);
	CHECK(fc.is_monotone());

	// already monotone: unchanged
	filtered_complex ok;
	ok.add_cell(0, {}, {0}, 0.5);
	ok.add_cell(0, {}, {1}, 0.25);
	ok.add_cell(1, {0, 1}, {0, 1}, 0.75);
	monotone_completion(ok, {0.5, 0.25, 0.75});
	CHECK(ok.entrance(0) == 0.5);
	CHECK(ok.entrance(1) == 0.25);
	CHECK(ok.entrance(2) == 0.75);

	// constant raw stays constant
	filtered_complex cc;
	cc.add_cell(0, {}, {0}, 0);
	cc.add_cell(0, {}, {1}, 0);
	cc.add_cell(1, {0, 1}, {0, 1}, 0);
	monotone_completion(cc, {3.0, 3.0, 3.0});
	for (cell_id c = 0; c < cc.size(); ++c) CHECK(cc.entrance(c) == 3.0);
}

TEST_CASE("complex_at respects bounds and face closure") {
	grid_field f = random_field(grid_spec::square(5), 8);
	filtered_complex fc = sublevel_filtration(f);
	double lo = *std::min_element(f.values.begin(), f.values.end());
	double hi = *std::max_element(f.values.begin(), f.values.end());
	CHECK(complex_at(fc, lo - 1.0).empty());
	CHECK(complex_at(fc, hi).size() == fc.size());
	rng gen(4);
	for (int k = 0; k < 10; ++k) {
		double t = gen.uniform(lo, hi);
		auto cells = complex_at(fc, t);
		std::set<cell_id> in(cells.begin(), cells.end());
		for (cell_id c : cells)
			for (cell_id face : fc.boundary(c)) CHECK(in.count(face) == 1);
	}
}
