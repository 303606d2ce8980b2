#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "tdalab/cubical.hpp"
#include "tdalab/experiments.hpp"
#include "tdalab/persistence.hpp"
#include "tdalab/point_cloud.hpp"
#include "tdalab/rng.hpp"

using namespace tdalab;

namespace {

grid_field random_field(const grid_spec& spec, std::uint64_t seed) {
	rng gen(seed);
	std::vector<double> v(static_cast<std::size_t>(spec.num_points()));
	for (double& x : v) x = gen.normal();
	return grid_field(spec, std::move(v));
}

point_cloud random_cloud(int n, int dim, std::uint64_t seed) {
	rng gen(seed);
	std::vector<std::vector<double>> pts;
	for (int i = 0; i < n; ++i) {
		std::vector<double> p(static_cast<std::size_t>(dim));
		for (double& x : p) x = gen.uniform(-1.0, 1.0);
		pts.push_back(std::move(p));
	}
	return point_cloud(dim, std::move(pts));
}

std::vector<double> entrance_times(const filtered_complex& fc) {
	std::vector<double> ts;
	for (cell_id c = 0; c < fc.size(); ++c) ts.push_back(fc.entrance(c));
	std::sort(ts.begin(), ts.end());
	ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
	return ts;
}

void check_oracle_equivalence(const filtered_complex& fc) {
	barcode bc = reduce(fc);
	// every cell is creator or destroyer exactly once
	std::size_t finite = 0, essential = 0;
	for (const bar& b : bc.bars) (b.essential() ? essential : finite) += 1;
	CHECK(2 * finite + essential == bc.num_cells);
	for (double t : entrance_times(fc)) {
		auto cells = complex_at(fc, t);
		betti_vector oracle = brute_force_betti(fc, cells);
		betti_vector fast = betti_at(bc, t);
		for (std::size_t k = 0; k < std::max(oracle.size(), fast.size()); ++k) {
			std::int64_t a = k < oracle.size() ? oracle[k] : 0;
			std::int64_t b = k < fast.size() ? fast[k] : 0;
			CHECK(a == b);
		}
	}
}

}  // namespace

TEST_CASE("a lone vertex yields one essential bar") {
	filtered_complex fc;
	fc.add_cell(0, {}, {0}, 0.0);
	barcode bc = reduce(fc);
	REQUIRE(bc.bars.size() == 1);
	CHECK(bc.bars[0].birth == 0.0);
	CHECK(bc.bars[0].essential());
	CHECK(bc.bars[0].degree == 0);
}

TEST_CASE("4-cycle graph has circle homology") {
	filtered_complex fc;
	for (cell_id v = 0; v < 4; ++v) fc.add_cell(0, {}, {v}, 0.0);
	fc.add_cell(1, {0, 1}, {0, 1}, 0.0);
	fc.add_cell(1, {1, 2}, {1, 2}, 0.0);
	fc.add_cell(1, {2, 3}, {2, 3}, 0.0);
	fc.add_cell(1, {3, 0}, {3, 0}, 0.0);
	barcode bc = reduce(fc);
	int essential0 = 0, essential1 = 0, zero_len = 0;
	for (const bar& b : bc.bars) {
		if (b.essential() && b.degree == 0) ++essential0;
		if (b.essential() && b.degree == 1) ++essential1;
		if (b.birth == b.death) ++zero_len;
	}
	CHECK(essential0 == 1);
	CHECK(essential1 == 1);
	CHECK(zero_len == 3);
	// pairing invariant: every cell is creator or destroyer exactly once
	std::size_t finite = 0, essential = 0;
	for (const bar& b : bc.bars) (b.essential() ? essential : finite) += 1;
	CHECK(2 * finite + essential == bc.num_cells);
}

TEST_CASE("brute force betti on canonical complexes") {
	// filled triangle
	filtered_complex tri;
	for (cell_id v = 0; v < 3; ++v) tri.add_cell(0, {}, {v}, 0.0);
	tri.add_cell(1, {0, 1}, {0, 1}, 0.0);
	tri.add_cell(1, {1, 2}, {1, 2}, 0.0);
	tri.add_cell(1, {0, 2}, {0, 2}, 0.0);
	tri.add_cell(2, {3, 4, 5}, {0, 1, 2}, 0.0);
	std::vector<cell_id> all = {0, 1, 2, 3, 4, 5, 6};
	betti_vector b = brute_force_betti(tri, all);
	REQUIRE(b.size() == 3);
	CHECK(b[0] == 1);
	CHECK(b[1] == 0);
	CHECK(b[2] == 0);

	// empty complex: all zeros
	filtered_complex empty;
	for (std::int64_t v : brute_force_betti(empty, {})) CHECK(v == 0);

	// torus surface: full cubical complex of a 2D periodic grid
	grid_field flat(grid_spec::square(4, 1.0, topology::torus),
	                std::vector<double>(16, 0.0));
	filtered_complex torus = sublevel_filtration(flat);
	std::vector<cell_id> cells(torus.size());
	for (cell_id c = 0; c < torus.size(); ++c) cells[c] = c;
	betti_vector bt = brute_force_betti(torus, cells);
	REQUIRE(bt.size() == 3);
	CHECK(bt[0] == 1);
	CHECK(bt[1] == 2);
	CHECK(bt[2] == 1);
}

TEST_CASE("betti_at counts bars crossing a vertical line") {
	// staged filtration with integer entrance times; at time 4 three classes live
	barcode bc;
	bc.top_degree = 0;
	bc.bars = {
	    bar{0, 5, 0, 0, 0}, bar{1, 3, 0, 0, 0}, bar{3, kInf, 0, 0, 0},
	    bar{4, 6, 0, 0, 0}, bar{5, 6, 0, 0, 0}, bar{6, kInf, 0, 0, 0},
	};
	CHECK(betti_at(bc, 4)[0] == 3);
	CHECK(betti_at(bc, -1)[0] == 0);
	// a bar ending at t does not count at t
	CHECK(betti_at(bc, 3)[0] == 2);
}

TEST_CASE("boundary and coboundary reductions give identical barcodes") {
	auto same_bars = [](const barcode& a, const barcode& b) {
		REQUIRE(a.bars.size() == b.bars.size());
		for (std::size_t i = 0; i < a.bars.size(); ++i) {
			CHECK(a.bars[i].degree == b.bars[i].degree);
			CHECK(a.bars[i].birth == b.bars[i].birth);
			CHECK(a.bars[i].death == b.bars[i].death);
		}
	};
	for (std::uint64_t s = 0; s < 6; ++s) {
		filtered_complex fc = s % 2 == 0
		    ? sublevel_filtration(random_field(grid_spec::square(5), 500 + s))
		    : rips_filtration(random_cloud(7, 2, 500 + s), 2);
		same_bars(reduce(fc, reduction_strategy::boundary),
		          reduce(fc, reduction_strategy::coboundary));
	}
	// torus topology exercises wrapped cofaces
	grid_field tor = random_field(grid_spec::square(4, 1.0, topology::torus), 99);
	filtered_complex fc = sublevel_filtration(tor);
	same_bars(reduce(fc, reduction_strategy::boundary), reduce(fc, reduction_strategy::coboundary));
}

TEST_CASE("reduce agrees with the rank-nullity oracle on random filtrations") {
	// cubical
	for (std::uint64_t s = 0; s < 4; ++s)
		check_oracle_equivalence(sublevel_filtration(random_field(grid_spec::square(4), 60 + s)));
	// rips
	for (std::uint64_t s = 0; s < 4; ++s)
		check_oracle_equivalence(rips_filtration(random_cloud(6, 2, 80 + s), 2));
	// superlevel
	check_oracle_equivalence(superlevel_filtration(random_field(grid_spec::square(4), 91)));
}

TEST_CASE("euler consistency: alternating betti equals alternating cell count") {
	grid_field f = random_field(grid_spec::square(5), 12);
	filtered_complex fc = sublevel_filtration(f);
	barcode bc = reduce(fc);
	for (double t : entrance_times(fc)) {
		auto cells = complex_at(fc, t);
		std::int64_t alt = 0;
		for (cell_id c : cells) alt += fc.dim(c) % 2 == 0 ? 1 : -1;
		betti_vector betti = betti_at(bc, t);
		std::int64_t alt_b = 0;
		for (std::size_t k = 0; k < betti.size(); ++k)
			alt_b += k % 2 == 0 ? betti[k] : -betti[k];
		CHECK(alt == alt_b);
	}
}

TEST_CASE("infinite bars count the final betti numbers") {
	point_cloud cloud = random_cloud(8, 2, 5);
	filtered_complex fc = rips_filtration(cloud, 2);
	barcode bc = reduce(fc);
	std::vector<cell_id> all(fc.size());
	for (cell_id c = 0; c < fc.size(); ++c) all[c] = c;
	betti_vector final_betti = brute_force_betti(fc, all);
	std::vector<std::int64_t> essential(final_betti.size(), 0);
	for (const bar& b : bc.bars)
		if (b.essential()) ++essential[static_cast<std::size_t>(b.degree)];
	for (std::size_t k = 0; k < final_betti.size(); ++k) CHECK(essential[k] == final_betti[k]);
}

TEST_CASE("non-monotone input is rejected") {
	filtered_complex fc;
	fc.add_cell(0, {}, {0}, 1.0);
	fc.add_cell(0, {}, {1}, 1.0);
	fc.add_cell(1, {0, 1}, {0, 1}, 0.5);
	CHECK_THROWS_AS(reduce(fc), std::invalid_argument);
}

TEST_CASE("barcode euler characteristic clipping") {
	barcode bc;
	bc.top_degree = 1;
	bc.bars = {bar{0, 1, 0, 0, 0}};
	CHECK(barcode_euler_char(bc, 1.0) == doctest::Approx(1.0));

	barcode two;
	two.top_degree = 1;
	two.bars = {bar{0, 2, 0, 0, 0}, bar{1, 2, 1, 0, 0}};
	CHECK(barcode_euler_char(two, 2.0) == doctest::Approx(1.0));
	// bars born after the cut are dropped; deaths clip
	CHECK(barcode_euler_char(two, 0.5) == doctest::Approx(0.5));

	barcode inf_bar;
	inf_bar.top_degree = 0;
	inf_bar.bars = {bar{0, kInf, 0, 0, 0}};
	CHECK(barcode_euler_char(inf_bar, 3.0) == doctest::Approx(3.0));
	CHECK_THROWS_AS(barcode_euler_char(inf_bar, -kInf), std::invalid_argument);
}

TEST_CASE("diagram maps superlevel bars back to field levels") {
	grid_spec spec = grid_spec::line(5);
	grid_field f(spec, {0.0, 1.9, 0.3, 1.2, 0.1});
	barcode bc = reduce(superlevel_filtration(f));
	persistence_diagram dg = diagram(bc);
	// the component born at the secondary peak 1.2 merges at the saddle 0.3
	bool found = false;
	for (const auto& p : dg.points)
		if (!p.essential && p.degree == 0 && p.birth == doctest::Approx(1.2) &&
		    p.death == doctest::Approx(0.3))
			found = true;
	CHECK(found);
	for (const auto& p : dg.points)
		if (!p.essential) CHECK(p.birth > p.death);

	// empty barcode gives an empty diagram
	barcode none;
	CHECK(diagram(none).points.empty());

	// round trip recovers the positive-length bars
	std::vector<bar> back = diagram_to_bars(dg);
	std::multiset<std::pair<double, double>> got, want;
	for (const bar& b : back) got.insert({b.birth, b.death});
	for (const bar& b : bc.bars)
		if (b.birth != b.death) want.insert({b.birth, b.death});
	CHECK(got == want);
}

TEST_CASE("negation duality of diagrams") {
	grid_field f = random_field(grid_spec::square(6), 44);
	persistence_diagram sup = diagram(reduce(superlevel_filtration(f)));
	barcode sub = reduce(sublevel_filtration(f.negated()));
	std::multiset<std::tuple<int, double, double>> a, b;
	for (const auto& p : sup.points) a.insert({p.degree, p.birth, p.death});
	for (const bar& x : sub.bars)
		if (x.birth != x.death) b.insert({x.degree, -x.birth, -x.death});
	CHECK(a == b);
}

TEST_CASE("H0 births are local maxima and H1 deaths are interior local minima") {
	for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
		grid_field f = random_field(grid_spec::square(8), 7000 + seed);
		persistence_diagram dg = diagram(reduce(superlevel_filtration(f)));

		std::vector<double> births, deaths;
		double essential_birth = 0;
		for (const auto& p : dg.points) {
			if (p.degree == 0) {
				if (p.essential) essential_birth = p.birth;
				else births.push_back(p.birth);
			}
			if (p.degree == 1 && !p.essential) deaths.push_back(p.death);
		}
		std::vector<double> maxima = local_maxima_heights(f);
		REQUIRE(!maxima.empty());
		CHECK(essential_birth == maxima.back());
		maxima.pop_back();
		std::sort(births.begin(), births.end());
		CHECK(births == maxima);

		std::sort(deaths.begin(), deaths.end());
		CHECK(deaths == interior_local_minima_heights(f));
	}
}

TEST_CASE("marginals pool unit masses") {
	persistence_diagram dg;
	dg.kind = filtration_kind::superlevel_negated;
	dg.points.push_back(diagram_point{1.0, 0.0, 0, false});
	marginals m = birth_death_marginals({dg}, 0, 0.1);
	CHECK(m.births.total() == 1);
	CHECK(m.deaths.total() == 1);
	CHECK_THROWS_AS(birth_death_marginals({}, 0, 0.1), std::invalid_argument);
}
