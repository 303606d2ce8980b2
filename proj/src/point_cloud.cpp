#include "tdalab/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace tdalab {

double point_cloud::distance(std::size_t i, std::size_t j) const {
	const auto& a = points[i];
	const auto& b = points[j];
	if (metric == metric_kind::l2) {
		double s = 0;
		for (int k = 0; k < dim; ++k) {
			double d = a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)];
			s += d * d;
		}
		return std::sqrt(s);
	}
	double m = 0;
	for (int k = 0; k < dim; ++k)
		m = std::max(m, std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]));
	return m;
}

namespace {

// smallest ball with all support points on its boundary: circumcenter within
// the affine hull of the support, solved by Gaussian elimination
ball circumball(const std::vector<const std::vector<double>*>& support) {
	const std::size_t m = support.size();
	const std::size_t d = support[0]->size();
	ball b;
	b.center.assign(d, 0.0);
	if (m == 1) {
		b.center = *support[0];
		b.radius = 0;
		return b;
	}
	// unknowns: coefficients c_i of (p_i - p_0), i = 1..m-1
	const std::size_t k = m - 1;
	std::vector<double> A(k * k), rhs(k);
	for (std::size_t i = 0; i < k; ++i) {
		for (std::size_t j = 0; j < k; ++j) {
			double dot = 0;
			for (std::size_t t = 0; t < d; ++t)
				dot += ((*support[i + 1])[t] - (*support[0])[t]) * ((*support[j + 1])[t] - (*support[0])[t]);
			A[i * k + j] = 2.0 * dot;
		}
		double norm2 = 0;
		for (std::size_t t = 0; t < d; ++t) {
			double v = (*support[i + 1])[t] - (*support[0])[t];
			norm2 += v * v;
		}
		rhs[i] = norm2;
	}
	// partial-pivot elimination
	std::vector<std::size_t> piv(k);
	for (std::size_t i = 0; i < k; ++i) piv[i] = i;
	for (std::size_t col = 0; col < k; ++col) {
		std::size_t best = col;
		for (std::size_t r = col + 1; r < k; ++r)
			if (std::abs(A[r * k + col]) > std::abs(A[best * k + col])) best = r;
		if (best != col) {
			for (std::size_t j = 0; j < k; ++j) std::swap(A[col * k + j], A[best * k + j]);
			std::swap(rhs[col], rhs[best]);
		}
		double p = A[col * k + col];
		if (std::abs(p) < 1e-14) {
			// degenerate support (affinely dependent); signal with negative radius
			b.radius = -1;
			return b;
		}
		for (std::size_t r = col + 1; r < k; ++r) {
			double f = A[r * k + col] / p;
			for (std::size_t j = col; j < k; ++j) A[r * k + j] -= f * A[col * k + j];
			rhs[r] -= f * rhs[col];
		}
	}
	std::vector<double> c(k);
	for (std::size_t i = k; i-- > 0;) {
		double s = rhs[i];
		for (std::size_t j = i + 1; j < k; ++j) s -= A[i * k + j] * c[j];
		c[i] = s / A[i * k + i];
	}
	for (std::size_t t = 0; t < d; ++t) {
		double x = (*support[0])[t];
		for (std::size_t i = 0; i < k; ++i) x += c[i] * ((*support[i + 1])[t] - (*support[0])[t]);
		b.center[t] = x;
	}
	double r2 = 0;
	for (std::size_t t = 0; t < d; ++t) {
		double v = b.center[t] - (*support[0])[t];
		r2 += v * v;
	}
	b.radius = std::sqrt(r2);
	return b;
}

bool inside(const std::vector<double>& p, const ball& b, double eps) {
	double r2 = 0;
	for (std::size_t t = 0; t < p.size(); ++t) {
		double v = p[t] - b.center[t];
		r2 += v * v;
	}
	return r2 <= b.radius * b.radius * (1.0 + eps) + eps * eps;
}

ball welzl(std::vector<const std::vector<double>*>& pts, std::size_t n,
           std::vector<const std::vector<double>*>& support, std::size_t dim) {
	if (n == 0 || support.size() == dim + 1) {
		if (support.empty()) return ball{std::vector<double>(dim, 0.0), -1.0};
		ball b = circumball(support);
		if (b.radius < 0 && support.size() > 1) {
			// degenerate support: drop to the largest proper subset that works
			std::vector<const std::vector<double>*> sub(support.begin(), support.end() - 1);
			b = circumball(sub);
		}
		return b;
	}
	const std::vector<double>* p = pts[n - 1];
	ball b = welzl(pts, n - 1, support, dim);
	if (b.radius >= 0 && inside(*p, b, 1e-12)) return b;
	support.push_back(p);
	b = welzl(pts, n - 1, support, dim);
	support.pop_back();
	// move-to-front keeps expected depth small
	std::memmove(&pts[1], &pts[0], (n - 1) * sizeof(pts[0]));
	pts[0] = p;
	return b;
}

}  // namespace

ball min_enclosing_ball(const std::vector<std::vector<double>>& points) {
	if (points.empty()) throw std::invalid_argument("min_enclosing_ball: empty point set");
	const std::size_t dim = points[0].size();
	std::vector<const std::vector<double>*> pts(points.size());
	for (std::size_t i = 0; i < points.size(); ++i) pts[i] = &points[i];
	std::vector<const std::vector<double>*> support;
	support.reserve(dim + 1);
	ball b = welzl(pts, pts.size(), support, dim);
	if (b.radius < 0) b.radius = 0;
	return b;
}

namespace {

double linf_half_range(const point_cloud& cloud, const std::vector<cell_id>& verts) {
	double worst = 0;
	for (int k = 0; k < cloud.dim; ++k) {
		double lo = cloud.points[verts[0]][static_cast<std::size_t>(k)], hi = lo;
		for (std::size_t i = 1; i < verts.size(); ++i) {
			double x = cloud.points[verts[i]][static_cast<std::size_t>(k)];
			lo = std::min(lo, x);
			hi = std::max(hi, x);
		}
		worst = std::max(worst, hi - lo);
	}
	return worst / 2.0;
}

// shared scaffold: enumerate simplices of the epsilon-neighborhood graph up to
// maxdim, entrance given by the per-simplex rule
template <typename EntranceFn>
filtered_complex build_point_filtration(const point_cloud& cloud, int maxdim, double max_entrance,
                                        EntranceFn entrance_of) {
	if (maxdim < 0) throw std::invalid_argument("point filtration: maxdim must be >= 0");
	if (cloud.size() > kPointCountCap)
		throw std::invalid_argument("point filtration: point count exceeds cap");
	const std::size_t n = cloud.size();
	filtered_complex fc;
	fc.family = cell_family::simplicial;
	fc.kind = filtration_kind::scale;

	for (std::size_t i = 0; i < n; ++i)
		fc.add_cell(0, {}, {static_cast<cell_id>(i)}, 0.0);
	if (maxdim == 0) return fc;

	// edges of the truncated filtration, plus adjacency for cofaces
	std::vector<std::vector<std::uint32_t>> nbr(n);
	std::vector<std::vector<cell_id>> edge_id(n);
	std::vector<cell_id> vbuf;
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = i + 1; j < n; ++j) {
			vbuf = {static_cast<cell_id>(i), static_cast<cell_id>(j)};
			double t = entrance_of(vbuf);
			if (t > max_entrance) continue;
			cell_id faces[2] = {static_cast<cell_id>(i), static_cast<cell_id>(j)};
			cell_id vids[2] = {static_cast<cell_id>(i), static_cast<cell_id>(j)};
			cell_id e = fc.add_cell(1, std::span<const cell_id>(faces, 2), std::span<const cell_id>(vids, 2), t);
			nbr[i].push_back(static_cast<std::uint32_t>(j));
			edge_id[i].push_back(e);
		}
	}

	// recursively extend simplices by vertices adjacent to all current ones
	struct frame {
		std::vector<cell_id> verts;    // ascending
		std::vector<cell_id> faces;    // ids of (d-1)-faces, aligned with removal index
		cell_id id;
	};

	auto edge_of = [&](std::uint32_t a, std::uint32_t b) -> cell_id {
		// a < b, present by construction of candidate sets
		const auto& row = nbr[a];
		auto it = std::lower_bound(row.begin(), row.end(), b);
		return edge_id[a][static_cast<std::size_t>(it - row.begin())];
	};

	// simplex ids by vertex set, built dimension by dimension
	std::vector<frame> current;
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t k = 0; k < nbr[i].size(); ++k)
			current.push_back(frame{{static_cast<cell_id>(i), nbr[i][k]}, {static_cast<cell_id>(i), nbr[i][k]}, edge_id[i][k]});

	for (int d = 2; d <= maxdim; ++d) {
		std::vector<frame> next;
		// faces of dimension >= 2 are looked up by vertex set; edges go through
		// the adjacency rows directly
		std::vector<std::pair<std::vector<cell_id>, cell_id>> table;
		if (d >= 3) {
			table.reserve(current.size());
			for (const auto& f : current) table.emplace_back(f.verts, f.id);
			std::sort(table.begin(), table.end());
		}
		auto find_id = [&table](const std::vector<cell_id>& key) -> cell_id {
			auto it = std::lower_bound(table.begin(), table.end(), key,
			                           [](const auto& row, const std::vector<cell_id>& k) { return row.first < k; });
			return it->second;
		};

		const bool keep_frames = d < maxdim;
		std::vector<cell_id> verts, faces, sub;
		for (const auto& f : current) {
			// candidates: common neighbors greater than the last vertex
			std::uint32_t last = f.verts.back();
			for (std::uint32_t cand : nbr[f.verts[0]]) {
				if (cand <= last) continue;
				bool ok = true;
				for (std::size_t t = 1; t < f.verts.size() && ok; ++t) {
					const auto& row = nbr[f.verts[t]];
					ok = std::binary_search(row.begin(), row.end(), cand);
				}
				if (!ok) continue;
				verts = f.verts;
				verts.push_back(cand);
				double t = entrance_of(verts);
				if (t > max_entrance) continue;
				faces.clear();
				for (std::size_t drop = 0; drop < verts.size(); ++drop) {
					sub.clear();
					for (std::size_t u = 0; u < verts.size(); ++u)
						if (u != drop) sub.push_back(verts[u]);
					faces.push_back(sub.size() == 2 ? edge_of(sub[0], sub[1]) : find_id(sub));
				}
				cell_id id = fc.add_cell(d, std::span<const cell_id>(faces), std::span<const cell_id>(verts), t);
				if (keep_frames) next.push_back(frame{verts, {}, id});
			}
		}
		current = std::move(next);
		if (current.empty()) break;
	}
	return fc;
}

}  // namespace

filtered_complex rips_filtration(const point_cloud& cloud, int maxdim, double max_entrance) {
	return build_point_filtration(cloud, maxdim, max_entrance, [&cloud](const std::vector<cell_id>& verts) {
		double worst = 0;
		for (std::size_t i = 0; i < verts.size(); ++i)
			for (std::size_t j = i + 1; j < verts.size(); ++j)
				worst = std::max(worst, cloud.distance(verts[i], verts[j]));
		return worst / 2.0;
	});
}

filtered_complex cech_filtration(const point_cloud& cloud, int maxdim, double max_entrance) {
	if (cloud.metric == metric_kind::linf) {
		return build_point_filtration(cloud, maxdim, max_entrance, [&cloud](const std::vector<cell_id>& verts) {
			return linf_half_range(cloud, verts);
		});
	}
	return build_point_filtration(cloud, maxdim, max_entrance, [&cloud](const std::vector<cell_id>& verts) {
		if (verts.size() == 2) return cloud.distance(verts[0], verts[1]) / 2.0;
		std::vector<std::vector<double>> pts(verts.size());
		for (std::size_t i = 0; i < verts.size(); ++i) pts[i] = cloud.points[verts[i]];
		return min_enclosing_ball(pts).radius;
	});
}

}  // namespace tdalab
