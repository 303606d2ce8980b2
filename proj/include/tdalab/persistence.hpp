#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "tdalab/complex.hpp"

namespace tdalab {

inline constexpr cell_id kNoCell = std::numeric_limits<cell_id>::max();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct bar {
	double birth = 0;
	double death = kInf;  // +inf marks an essential class
	int degree = 0;
	cell_id creator = kNoCell;
	cell_id destroyer = kNoCell;

	bool essential() const { return death == kInf; }
	double length() const { return death - birth; }
};

// all bars, including zero-length ones (the pairing bookkeeping needs them);
// diagrams and barcode Euler characteristics ignore those
struct barcode {
	std::vector<bar> bars;
	filtration_kind kind = filtration_kind::sublevel;
	int top_degree = 0;
	std::size_t num_cells = 0;
};

// Z2 column reduction with the clearing optimization, deterministic under the
// (entrance, dim, id) order. The default reduces the anti-transpose (coboundary
// columns, dimensions bottom-up), which gives the same pairing and is much
// faster on flag filtrations; the boundary route is kept as the dual witness.
enum class reduction_strategy { coboundary, boundary };
barcode reduce(const filtered_complex& fc, reduction_strategy strategy = reduction_strategy::coboundary);

using betti_vector = std::vector<std::int64_t>;

// beta_k = dim ker d_k - rank d_{k+1} by plain Z2 Gaussian elimination; the
// independent oracle for reduce. Cells must be closed under faces, <= 5000.
betti_vector brute_force_betti(const filtered_complex& fc, std::span<const cell_id> cells);

// bars alive at t: birth <= t < death (a bar ending at t is not counted)
betti_vector betti_at(const barcode& bc, double t);

// chi of the barcode truncated at a: bars born after a dropped, deaths clipped
// to a, then sum of (-1)^degree * length
double barcode_euler_char(const barcode& bc, double a);

struct diagram_point {
	double birth = 0;
	double death = 0;  // for superlevel diagrams these are field levels, birth > death
	int degree = 0;
	bool essential = false;
};

struct persistence_diagram {
	std::vector<diagram_point> points;
	filtration_kind kind = filtration_kind::sublevel;
};

// zero-length bars dropped; superlevel-negated barcodes are mapped back to
// field levels (birth = -t_birth, death = -t_death) so that birth > death
persistence_diagram diagram(const barcode& bc);

// inverse of diagram() modulo zero-length bars, for round-trip checks
std::vector<bar> diagram_to_bars(const persistence_diagram& dg);

struct histogram {
	double lo = 0;
	double bin_width = 0.1;
	std::vector<std::int64_t> counts;

	void add(double x);
	std::int64_t total() const;
};

struct marginals {
	histogram births;
	histogram deaths;
};

// pooled empirical distributions of start and end points in one degree;
// essential points are not pooled (they carry an infinite coordinate)
marginals birth_death_marginals(const std::vector<persistence_diagram>& diagrams, int degree,
                                double bin_width = 0.1);

}  // namespace tdalab
