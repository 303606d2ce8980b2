#include "tdalab/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tdalab {

namespace {

std::string fmt17(double v) {
	char buf[40];
	std::snprintf(buf, sizeof(buf), "%.17g", v);
	return buf;
}

std::ofstream open_out(const std::string& path) {
	std::ofstream out(path);
	if (!out) throw std::runtime_error("cannot open for writing: " + path);
	return out;
}

std::ifstream open_in(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw std::runtime_error("cannot open for reading: " + path);
	return in;
}

}  // namespace

std::vector<std::string> split(const std::string& s, char sep) {
	std::vector<std::string> out;
	std::string cur;
	for (char c : s) {
		if (c == sep) {
			out.push_back(cur);
			cur.clear();
		} else {
			cur += c;
		}
	}
	out.push_back(cur);
	return out;
}

void write_field_snapshot(const std::string& path, const grid_field& field) {
	auto out = open_out(path);
	out << field.spec.dim;
	for (int a = 0; a < field.spec.dim; ++a) out << ',' << field.spec.sizes[static_cast<std::size_t>(a)];
	out << ',' << fmt17(field.spec.side) << ','
	    << (field.spec.topo == topology::box ? "box" : "torus") << '\n';
	for (double v : field.values) out << fmt17(v) << '\n';
}

grid_field read_field_snapshot(const std::string& path) {
	auto in = open_in(path);
	std::string header;
	if (!std::getline(in, header)) throw std::runtime_error("field snapshot: missing header");
	auto parts = split(header, ',');
	if (parts.size() < 4) throw std::runtime_error("field snapshot: malformed header");
	grid_spec spec;
	spec.dim = std::stoi(parts[0]);
	if (static_cast<int>(parts.size()) != spec.dim + 3)
		throw std::runtime_error("field snapshot: malformed header");
	for (int a = 0; a < spec.dim; ++a)
		spec.sizes[static_cast<std::size_t>(a)] = std::stoi(parts[static_cast<std::size_t>(1 + a)]);
	for (int a = spec.dim; a < 3; ++a) spec.sizes[static_cast<std::size_t>(a)] = 1;
	spec.side = std::stod(parts[static_cast<std::size_t>(spec.dim + 1)]);
	const std::string& topo = parts[static_cast<std::size_t>(spec.dim + 2)];
	if (topo == "box") spec.topo = topology::box;
	else if (topo == "torus") spec.topo = topology::torus;
	else throw std::runtime_error("field snapshot: unknown topology " + topo);
	spec.validate();
	std::vector<double> values;
	values.reserve(static_cast<std::size_t>(spec.num_points()));
	std::string line;
	while (std::getline(in, line)) {
		if (line.empty()) continue;
		values.push_back(std::stod(line));
	}
	return grid_field(spec, std::move(values));
}

void write_filtration(const std::string& path, const filtered_complex& fc) {
	auto out = open_out(path);
	for (cell_id c : fc.reduction_order()) {
		out << c << ',' << fc.dim(c) << ',' << fmt17(fc.entrance(c));
		for (cell_id f : fc.boundary(c)) out << ',' << f;
		out << '\n';
	}
}

point_cloud read_point_cloud_csv(const std::string& path, metric_kind metric) {
	auto in = open_in(path);
	std::vector<std::vector<double>> pts;
	std::string line;
	while (std::getline(in, line)) {
		if (line.empty() || line[0] == '#') continue;
		std::vector<double> p;
		for (const auto& tok : split(line, ','))
			if (!tok.empty()) p.push_back(std::stod(tok));
		if (!p.empty()) pts.push_back(std::move(p));
	}
	if (pts.empty()) throw std::runtime_error("point cloud csv: no points in " + path);
	int dim = static_cast<int>(pts[0].size());
	return point_cloud(dim, std::move(pts), metric);
}

void write_diagram_csv(const std::string& path, const persistence_diagram& dg) {
	auto out = open_out(path);
	out << "degree,birth,death,essential\n";
	for (const auto& p : dg.points)
		out << p.degree << ',' << fmt17(p.birth) << ',' << fmt17(p.death) << ','
		    << (p.essential ? 1 : 0) << '\n';
}

void write_ec_curve_csv(const std::string& path, const ec_curve& curve) {
	auto out = open_out(path);
	out << "u,chi\n";
	for (std::size_t i = 0; i < curve.breakpoints().size(); ++i)
		out << fmt17(curve.breakpoints()[i]) << ',' << curve.values()[i] << '\n';
}

void write_histogram_csv(const std::string& path, const histogram& h) {
	auto out = open_out(path);
	out << "bin_lo,count\n";
	for (std::size_t i = 0; i < h.counts.size(); ++i)
		out << fmt17(h.lo + h.bin_width * static_cast<double>(i)) << ',' << h.counts[i] << '\n';
}

namespace {

struct svg_frame {
	double xmin, xmax;
	double width = 720, panel_height = 160, margin = 32;

	double x(double v) const { return margin + (v - xmin) / (xmax - xmin) * (width - 2 * margin); }
};

}  // namespace

void write_barcode_svg(const std::string& path, const barcode& bc, int max_degree) {
	persistence_diagram dg = diagram(bc);
	double lo = 0, hi = 1;
	bool first = true;
	for (const auto& p : dg.points) {
		double a = std::min(p.birth, p.death), b = std::max(p.birth, p.death);
		if (p.essential) b = std::isfinite(b) ? b : a;
		if (!std::isfinite(a)) a = b;
		if (first) { lo = a; hi = b; first = false; }
		lo = std::min(lo, a);
		hi = std::max(hi, b);
	}
	if (hi <= lo) hi = lo + 1;
	svg_frame fr{lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo)};
	auto out = open_out(path);
	double total_h = fr.panel_height * (max_degree + 1);
	out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fr.width << "\" height=\""
	    << total_h << "\">\n";
	for (int deg = 0; deg <= max_degree; ++deg) {
		double top = fr.panel_height * deg;
		out << "<rect x=\"0\" y=\"" << top << "\" width=\"" << fr.width << "\" height=\""
		    << fr.panel_height << "\" fill=\"none\" stroke=\"#999\"/>\n";
		out << "<text x=\"8\" y=\"" << top + 18 << "\" font-size=\"14\">H" << deg << "</text>\n";
		std::vector<const diagram_point*> rows;
		for (const auto& p : dg.points)
			if (p.degree == deg) rows.push_back(&p);
		double step = (fr.panel_height - 30) / std::max<std::size_t>(rows.size(), 1);
		for (std::size_t i = 0; i < rows.size(); ++i) {
			const auto& p = *rows[i];
			double y = top + 24 + step * static_cast<double>(i);
			double b = p.birth;
			double d = std::isfinite(p.death) ? p.death : (bc.kind == filtration_kind::superlevel_negated ? fr.xmin : fr.xmax);
			out << "<line x1=\"" << fr.x(b) << "\" y1=\"" << y << "\" x2=\"" << fr.x(d) << "\" y2=\""
			    << y << "\" stroke=\"#205080\" stroke-width=\"2\"/>\n";
		}
	}
	out << "</svg>\n";
}

void write_diagram_svg(const std::string& path, const persistence_diagram& dg, int max_degree) {
	double lo = 0, hi = 1;
	bool first = true;
	for (const auto& p : dg.points) {
		if (p.essential) continue;
		if (first) { lo = std::min(p.birth, p.death); hi = std::max(p.birth, p.death); first = false; }
		lo = std::min({lo, p.birth, p.death});
		hi = std::max({hi, p.birth, p.death});
	}
	if (hi <= lo) hi = lo + 1;
	double size = 480, margin = 36;
	auto sx = [&](double v) { return margin + (v - lo) / (hi - lo) * (size - 2 * margin); };
	auto sy = [&](double v) { return size - margin - (v - lo) / (hi - lo) * (size - 2 * margin); };
	auto out = open_out(path);
	out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size * (max_degree + 1)
	    << "\" height=\"" << size << "\">\n";
	const char* colors[] = {"#a03030", "#3060a0", "#30a060", "#806020"};
	for (int deg = 0; deg <= max_degree; ++deg) {
		double off = size * deg;
		out << "<g transform=\"translate(" << off << ",0)\">\n";
		out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size - 2 * margin
		    << "\" height=\"" << size - 2 * margin << "\" fill=\"none\" stroke=\"#999\"/>\n";
		out << "<line x1=\"" << sx(lo) << "\" y1=\"" << sy(lo) << "\" x2=\"" << sx(hi) << "\" y2=\""
		    << sy(hi) << "\" stroke=\"#ccc\"/>\n";
		out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"14\">H" << deg << "</text>\n";
		for (const auto& p : dg.points) {
			if (p.degree != deg || p.essential) continue;
			out << "<circle cx=\"" << sx(p.birth) << "\" cy=\"" << sy(p.death)
			    << "\" r=\"1.6\" fill=\"" << colors[deg % 4] << "\" fill-opacity=\"0.5\"/>\n";
		}
		out << "</g>\n";
	}
	out << "</svg>\n";
}

void write_curve_svg(const std::string& path, const std::vector<double>& levels,
                     const std::vector<double>& means, const std::vector<double>& closed) {
	if (levels.empty() || levels.size() != means.size() || levels.size() != closed.size())
		throw std::invalid_argument("write_curve_svg: level/value size mismatch");
	double ylo = means[0], yhi = means[0];
	for (std::size_t i = 0; i < levels.size(); ++i) {
		ylo = std::min({ylo, means[i], closed[i]});
		yhi = std::max({yhi, means[i], closed[i]});
	}
	if (yhi <= ylo) yhi = ylo + 1;
	const double w = 640, h = 420, margin = 40;
	auto sx = [&](double u) {
		return margin + (u - levels.front()) / (levels.back() - levels.front()) * (w - 2 * margin);
	};
	auto sy = [&](double v) { return h - margin - (v - ylo) / (yhi - ylo) * (h - 2 * margin); };
	auto out = open_out(path);
	out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
	out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << w - 2 * margin
	    << "\" height=\"" << h - 2 * margin << "\" fill=\"none\" stroke=\"#999\"/>\n";
	for (int series = 0; series < 2; ++series) {
		const auto& ys = series == 0 ? closed : means;
		out << "<polyline fill=\"none\" stroke=\"" << (series == 0 ? "#888888" : "#a03030")
		    << "\" stroke-width=\"" << (series == 0 ? 1.5 : 2.0) << "\" points=\"";
		for (std::size_t i = 0; i < levels.size(); ++i) out << sx(levels[i]) << ',' << sy(ys[i]) << ' ';
		out << "\"/>\n";
	}
	out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"13\">mean (red) vs closed form (grey)</text>\n";
	out << "</svg>\n";
}

scene_shapes read_scene_json(const std::string& path) {
	auto in = open_in(path);
	nlohmann::json j;
	in >> j;
	scene_shapes sc;
	sc.gamma = j.value("gamma", 1);
	for (const auto& s : j.at("shapes")) {
		scene_shapes::shape sh;
		std::string kind = s.at("kind");
		if (kind == "rect") {
			sh.is_rect = true;
			auto lo = s.at("lo"), hi = s.at("hi");
			for (std::size_t a = 0; a < lo.size() && a < 3; ++a) sh.lo[a] = lo[a];
			for (std::size_t a = 0; a < hi.size() && a < 3; ++a) sh.hi[a] = hi[a];
		} else if (kind == "disc") {
			sh.is_rect = false;
			auto c = s.at("center");
			for (std::size_t a = 0; a < c.size() && a < 3; ++a) sh.center[a] = c[a];
			sh.radius = s.at("radius");
		} else {
			throw std::runtime_error("scene json: unknown shape kind " + kind);
		}
		sc.shapes.push_back(sh);
	}
	return sc;
}

void write_scene_json(const std::string& path, const scene_shapes& scene) {
	nlohmann::json j;
	j["gamma"] = scene.gamma;
	j["shapes"] = nlohmann::json::array();
	for (const auto& sh : scene.shapes) {
		nlohmann::json s;
		if (sh.is_rect) {
			s["kind"] = "rect";
			s["lo"] = {sh.lo[0], sh.lo[1], sh.lo[2]};
			s["hi"] = {sh.hi[0], sh.hi[1], sh.hi[2]};
		} else {
			s["kind"] = "disc";
			s["center"] = {sh.center[0], sh.center[1], sh.center[2]};
			s["radius"] = sh.radius;
		}
		j["shapes"].push_back(s);
	}
	auto out = open_out(path);
	out << j.dump(2) << '\n';
}

target_scene build_scene(const grid_spec& domain, const scene_shapes& shapes) {
	target_scene scene;
	scene.domain = domain;
	scene.gamma = shapes.gamma;
	for (const auto& sh : shapes.shapes) {
		auto cells = sh.is_rect ? rasterize_rect(domain, sh.lo, sh.hi)
		                        : rasterize_disc(domain, sh.center, sh.radius);
		scene.supports.push_back(std::move(cells));
	}
	return scene;
}

std::map<std::string, std::string> read_config(const std::string& path) {
	auto in = open_in(path);
	std::map<std::string, std::string> kv;
	std::string line;
	while (std::getline(in, line)) {
		auto hash = line.find('#');
		if (hash != std::string::npos) line = line.substr(0, hash);
		auto eq = line.find('=');
		if (eq == std::string::npos) continue;
		auto trim = [](std::string s) {
			auto b = s.find_first_not_of(" \t\r");
			auto e = s.find_last_not_of(" \t\r");
			return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
		};
		std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
		if (!key.empty()) kv[key] = val;
	}
	return kv;
}

}  // namespace tdalab
