#include "tdalab/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tdalab {

namespace {

// xor-merge of sorted position lists (Z2 column addition)
void add_column(std::vector<std::uint32_t>& acc, const std::vector<std::uint32_t>& other,
                std::vector<std::uint32_t>& tmp) {
	tmp.clear();
	std::size_t i = 0, j = 0;
	while (i < acc.size() && j < other.size()) {
		if (acc[i] < other[j]) tmp.push_back(acc[i++]);
		else if (other[j] < acc[i]) tmp.push_back(other[j++]);
		else { ++i; ++j; }
	}
	tmp.insert(tmp.end(), acc.begin() + static_cast<std::ptrdiff_t>(i), acc.end());
	tmp.insert(tmp.end(), other.begin() + static_cast<std::ptrdiff_t>(j), other.end());
	acc.swap(tmp);
}

}  // namespace

namespace {

void strip_duplicates_mod2(std::vector<std::uint32_t>& column) {
	std::size_t w = 0;
	for (std::size_t i = 0; i < column.size();) {
		std::size_t j = i;
		while (j < column.size() && column[j] == column[i]) ++j;
		if ((j - i) % 2) column[w++] = column[i];
		i = j;
	}
	column.resize(w);
}

void finish_barcode(const filtered_complex& fc, const std::vector<std::uint8_t>& status, barcode& bc) {
	for (cell_id c = 0; c < fc.size(); ++c)
		if (status[c] == 0)
			bc.bars.push_back(bar{fc.entrance(c), kInf, fc.dim(c), c, kNoCell});
	std::sort(bc.bars.begin(), bc.bars.end(), [](const bar& a, const bar& b) {
		if (a.degree != b.degree) return a.degree < b.degree;
		if (a.birth != b.birth) return a.birth < b.birth;
		if (a.death != b.death) return a.death < b.death;
		return a.creator < b.creator;
	});
}

// textbook route: boundary columns, degrees top-down, clearing below
void reduce_boundary(const filtered_complex& fc, const std::vector<cell_id>& order,
                     const std::vector<std::uint32_t>& pos, barcode& bc) {
	const std::size_t n = fc.size();
	std::vector<std::uint8_t> status(n, 0);  // 0 unknown, 1 paired creator, 2 destroyer
	std::vector<std::int32_t> pivot_owner(n, -1);
	std::vector<std::vector<std::uint32_t>> stored;
	std::vector<std::uint32_t> column, tmp;

	for (int d = bc.top_degree; d >= 1; --d) {
		for (std::uint32_t p = 0; p < n; ++p) {
			cell_id c = order[p];
			if (fc.dim(c) != d || status[c] != 0) continue;
			column.clear();
			for (cell_id f : fc.boundary(c)) column.push_back(pos[f]);
			std::sort(column.begin(), column.end());
			strip_duplicates_mod2(column);
			while (!column.empty()) {
				std::uint32_t low = column.back();
				std::int32_t owner = pivot_owner[low];
				if (owner < 0) {
					cell_id creator = order[low];
					pivot_owner[low] = static_cast<std::int32_t>(stored.size());
					stored.push_back(column);
					status[creator] = 1;  // cleared: its own column reduces to zero
					status[c] = 2;
					bc.bars.push_back(bar{fc.entrance(creator), fc.entrance(c), d - 1, creator, c});
					break;
				}
				add_column(column, stored[static_cast<std::size_t>(owner)], tmp);
			}
		}
	}
	finish_barcode(fc, status, bc);
}

// anti-transpose route: coboundary columns in reverse filtration order,
// dimensions bottom-up; pairs coincide with the boundary reduction's
void reduce_coboundary(const filtered_complex& fc, const std::vector<cell_id>& order,
                       const std::vector<std::uint32_t>& pos, barcode& bc) {
	const std::size_t n = fc.size();
	if (n == 0) return;
	const std::uint32_t last = static_cast<std::uint32_t>(n) - 1;

	// transpose the boundary lists into coface lists (as reversed positions)
	std::vector<std::uint32_t> coface_count(n, 0);
	for (cell_id c = 0; c < n; ++c)
		for (cell_id f : fc.boundary(c)) ++coface_count[f];
	std::vector<std::uint64_t> coface_off(n + 1, 0);
	for (std::size_t i = 0; i < n; ++i) coface_off[i + 1] = coface_off[i] + coface_count[i];
	std::vector<std::uint32_t> coface(coface_off[n]);
	{
		std::vector<std::uint64_t> fill(coface_off.begin(), coface_off.end() - 1);
		for (cell_id c = 0; c < n; ++c)
			for (cell_id f : fc.boundary(c)) coface[fill[f]++] = last - pos[c];
	}

	std::vector<std::uint8_t> status(n, 0);
	std::vector<std::int32_t> pivot_owner(n, -1);
	std::vector<std::vector<std::uint32_t>> stored;
	std::vector<std::uint32_t> column, tmp;

	for (int d = 0; d < bc.top_degree; ++d) {
		for (std::uint32_t rp = 0; rp < n; ++rp) {
			cell_id c = order[last - rp];  // descending filtration order
			if (fc.dim(c) != d || status[c] != 0) continue;
			column.assign(coface.begin() + static_cast<std::ptrdiff_t>(coface_off[c]),
			              coface.begin() + static_cast<std::ptrdiff_t>(coface_off[c + 1]));
			std::sort(column.begin(), column.end());
			strip_duplicates_mod2(column);
			while (!column.empty()) {
				std::uint32_t low = column.back();
				std::int32_t owner = pivot_owner[low];
				if (owner < 0) {
					cell_id destroyer = order[last - low];
					pivot_owner[low] = static_cast<std::int32_t>(stored.size());
					stored.push_back(column);
					status[destroyer] = 2;  // cleared in the next dimension pass
					status[c] = 1;
					bc.bars.push_back(bar{fc.entrance(c), fc.entrance(destroyer), d, c, destroyer});
					break;
				}
				add_column(column, stored[static_cast<std::size_t>(owner)], tmp);
			}
		}
	}
	finish_barcode(fc, status, bc);
}

}  // namespace

barcode reduce(const filtered_complex& fc, reduction_strategy strategy) {
	fc.validate_monotone();
	barcode bc;
	bc.kind = fc.kind;
	bc.top_degree = fc.top_dim();
	bc.num_cells = fc.size();

	std::vector<cell_id> order = fc.reduction_order();
	std::vector<std::uint32_t> pos(fc.size());
	for (std::uint32_t p = 0; p < fc.size(); ++p) pos[order[p]] = p;

	if (strategy == reduction_strategy::boundary) reduce_boundary(fc, order, pos, bc);
	else reduce_coboundary(fc, order, pos, bc);
	return bc;
}

namespace {

// rank over Z2 of the boundary map from k-cells to (k-1)-cells within a subset
std::int64_t boundary_rank(const filtered_complex& fc, const std::vector<cell_id>& cells,
                           const std::vector<std::int64_t>& local, int k) {
	std::vector<std::vector<std::uint64_t>> rows;
	std::size_t ncols = 0;
	for (cell_id c : cells)
		if (fc.dim(c) == k - 1) ++ncols;
	if (ncols == 0) return 0;
	const std::size_t words = (ncols + 63) / 64;
	for (cell_id c : cells) {
		if (fc.dim(c) != k) continue;
		std::vector<std::uint64_t> row(words, 0);
		for (cell_id f : fc.boundary(c)) {
			std::int64_t j = local[f];
			row[static_cast<std::size_t>(j) / 64] ^= 1ULL << (static_cast<std::size_t>(j) % 64);
		}
		rows.push_back(std::move(row));
	}
	std::int64_t rank = 0;
	std::size_t pivot_col = 0;
	for (; pivot_col < ncols && !rows.empty(); ++pivot_col) {
		const std::size_t w = pivot_col / 64;
		const std::uint64_t bit = 1ULL << (pivot_col % 64);
		std::size_t found = rows.size();
		for (std::size_t r = static_cast<std::size_t>(rank); r < rows.size(); ++r)
			if (rows[r][w] & bit) { found = r; break; }
		if (found == rows.size()) continue;
		std::swap(rows[found], rows[static_cast<std::size_t>(rank)]);
		for (std::size_t r = 0; r < rows.size(); ++r) {
			if (r == static_cast<std::size_t>(rank)) continue;
			if (rows[r][w] & bit)
				for (std::size_t t = 0; t < rows[r].size(); ++t) rows[r][t] ^= rows[static_cast<std::size_t>(rank)][t];
		}
		++rank;
	}
	return rank;
}

}  // namespace

betti_vector brute_force_betti(const filtered_complex& fc, std::span<const cell_id> cells) {
	if (cells.size() > 5000) throw std::invalid_argument("brute_force_betti: cell cap exceeded");
	std::vector<cell_id> sorted(cells.begin(), cells.end());
	std::sort(sorted.begin(), sorted.end());
	std::vector<std::int64_t> local(fc.size(), -1);
	// local column index within each dimension
	{
		std::vector<std::int64_t> next_by_dim(static_cast<std::size_t>(fc.top_dim()) + 1, 0);
		for (cell_id c : sorted) local[c] = next_by_dim[static_cast<std::size_t>(fc.dim(c))]++;
	}
	for (cell_id c : sorted)
		for (cell_id f : fc.boundary(c))
			if (local[f] < 0) throw std::invalid_argument("brute_force_betti: cell set not closed under faces");

	int top = 0;
	std::vector<std::int64_t> count_by_dim(static_cast<std::size_t>(fc.top_dim()) + 2, 0);
	for (cell_id c : sorted) {
		top = std::max(top, fc.dim(c));
		++count_by_dim[static_cast<std::size_t>(fc.dim(c))];
	}
	betti_vector betti(static_cast<std::size_t>(top) + 1, 0);
	std::vector<std::int64_t> ranks(static_cast<std::size_t>(top) + 2, 0);
	for (int k = 1; k <= top + 1; ++k) ranks[static_cast<std::size_t>(k)] = boundary_rank(fc, sorted, local, k);
	for (int k = 0; k <= top; ++k) {
		std::int64_t kernel = count_by_dim[static_cast<std::size_t>(k)] - ranks[static_cast<std::size_t>(k)];
		betti[static_cast<std::size_t>(k)] = kernel - ranks[static_cast<std::size_t>(k) + 1];
	}
	return betti;
}

betti_vector betti_at(const barcode& bc, double t) {
	betti_vector betti(static_cast<std::size_t>(bc.top_degree) + 1, 0);
	for (const bar& b : bc.bars)
		if (b.birth <= t && t < b.death) ++betti[static_cast<std::size_t>(b.degree)];
	return betti;
}

double barcode_euler_char(const barcode& bc, double a) {
	if (std::isnan(a) || a == -kInf)
		throw std::invalid_argument("barcode_euler_char: truncation level must be finite or +inf");
	double chi = 0;
	for (const bar& b : bc.bars) {
		if (b.birth > a) continue;
		double len = std::min(b.death, a) - b.birth;
		if (len == 0) continue;
		chi += b.degree % 2 == 0 ? len : -len;
	}
	return chi;
}

persistence_diagram diagram(const barcode& bc) {
	persistence_diagram dg;
	dg.kind = bc.kind;
	for (const bar& b : bc.bars) {
		if (b.birth == b.death) continue;
		diagram_point p;
		p.degree = b.degree;
		p.essential = b.essential();
		if (bc.kind == filtration_kind::superlevel_negated) {
			p.birth = -b.birth;
			p.death = -b.death;  // -inf for essential classes
		} else {
			p.birth = b.birth;
			p.death = b.death;
		}
		dg.points.push_back(p);
	}
	return dg;
}

std::vector<bar> diagram_to_bars(const persistence_diagram& dg) {
	std::vector<bar> bars;
	for (const auto& p : dg.points) {
		bar b;
		b.degree = p.degree;
		if (dg.kind == filtration_kind::superlevel_negated) {
			b.birth = -p.birth;
			b.death = -p.death;
		} else {
			b.birth = p.birth;
			b.death = p.death;
		}
		bars.push_back(b);
	}
	return bars;
}

void histogram::add(double x) {
	if (counts.empty()) {
		lo = std::floor(x / bin_width) * bin_width;
		counts.assign(1, 0);
	}
	while (x < lo) {
		counts.insert(counts.begin(), 0);
		lo -= bin_width;
	}
	std::size_t idx = static_cast<std::size_t>(std::floor((x - lo) / bin_width));
	if (idx >= counts.size()) counts.resize(idx + 1, 0);
	++counts[idx];
}

std::int64_t histogram::total() const {
	std::int64_t t = 0;
	for (auto c : counts) t += c;
	return t;
}

marginals birth_death_marginals(const std::vector<persistence_diagram>& diagrams, int degree,
                                double bin_width) {
	if (diagrams.empty()) throw std::invalid_argument("birth_death_marginals: need at least one diagram");
	marginals m;
	m.births.bin_width = bin_width;
	m.deaths.bin_width = bin_width;
	for (const auto& dg : diagrams) {
		for (const auto& p : dg.points) {
			if (p.degree != degree || p.essential) continue;
			m.births.add(p.birth);
			m.deaths.add(p.death);
		}
	}
	return m;
}

}  // namespace tdalab
