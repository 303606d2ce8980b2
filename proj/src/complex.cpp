#include "tdalab/complex.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace tdalab {

std::vector<cell_id> filtered_complex::reduction_order() const {
	std::vector<cell_id> order(size());
	std::iota(order.begin(), order.end(), 0u);
	std::stable_sort(order.begin(), order.end(), [this](cell_id a, cell_id b) {
		if (entrance_[a] != entrance_[b]) return entrance_[a] < entrance_[b];
		if (dim_[a] != dim_[b]) return dim_[a] < dim_[b];
		return a < b;
	});
	return order;
}

bool filtered_complex::is_monotone() const {
	for (cell_id i = 0; i < size(); ++i)
		for (cell_id f : boundary(i))
			if (entrance_[f] > entrance_[i]) return false;
	return true;
}

bool filtered_complex::boundary_squares_to_zero() const {
	std::map<cell_id, int> counts;
	for (cell_id i = 0; i < size(); ++i) {
		if (dim(i) < 2) continue;
		counts.clear();
		for (cell_id f : boundary(i))
			for (cell_id g : boundary(f)) counts[g] ^= 1;
		for (auto& [g, parity] : counts)
			if (parity) return false;
	}
	return true;
}

std::vector<cell_id> complex_at(const filtered_complex& fc, double t) {
	std::vector<cell_id> out;
	for (cell_id i = 0; i < fc.size(); ++i)
		if (fc.entrance(i) <= t) out.push_back(i);
	return out;
}

void monotone_completion(filtered_complex& fc, const std::vector<double>& raw) {
	if (raw.size() != fc.size())
		throw std::invalid_argument("monotone_completion: raw assignment size mismatch");
	// process in dimension order so faces are final before their cofaces
	std::vector<cell_id> by_dim(fc.size());
	std::iota(by_dim.begin(), by_dim.end(), 0u);
	std::stable_sort(by_dim.begin(), by_dim.end(),
	                 [&fc](cell_id a, cell_id b) { return fc.dim(a) < fc.dim(b); });
	for (cell_id c : by_dim) {
		double t = raw[c];
		for (cell_id f : fc.boundary(c)) t = std::max(t, fc.entrance(f));
		fc.set_entrance(c, t);
	}
}

}  // namespace tdalab
