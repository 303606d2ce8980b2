#pragma once

#include <map>
#include <string>
#include <vector>

#include "tdalab/complex.hpp"
#include "tdalab/euler.hpp"
#include "tdalab/grid.hpp"
#include "tdalab/persistence.hpp"
#include "tdalab/point_cloud.hpp"

namespace tdalab {

// header `dim,sizes...,side,topology`, then one value per line; values are
// written with 17 significant digits so read(write(f)) == f exactly
void write_field_snapshot(const std::string& path, const grid_field& field);
grid_field read_field_snapshot(const std::string& path);

// lines `id,dim,entrance,face_ids...` in reduction order
void write_filtration(const std::string& path, const filtered_complex& fc);

// one point per row, comma-separated coordinates
point_cloud read_point_cloud_csv(const std::string& path, metric_kind metric);

// `degree,birth,death,essential`; essential deaths written as inf/-inf
void write_diagram_csv(const std::string& path, const persistence_diagram& dg);

// `u,chi` rows at breakpoints
void write_ec_curve_csv(const std::string& path, const ec_curve& curve);

void write_histogram_csv(const std::string& path, const histogram& h);

// horizontal bar segments grouped into one panel per degree
void write_barcode_svg(const std::string& path, const barcode& bc, int max_degree);
void write_diagram_svg(const std::string& path, const persistence_diagram& dg, int max_degree);

// empirical means against the closed form over a level grid
void write_curve_svg(const std::string& path, const std::vector<double>& levels,
                     const std::vector<double>& means, const std::vector<double>& closed);

// scene file: {"gamma": g, "shapes": [{"kind":"rect","lo":[..],"hi":[..]},
//                                     {"kind":"disc","center":[..],"radius":r}]}
struct scene_shapes {
	struct shape {
		bool is_rect = true;
		std::array<double, 3> lo{}, hi{};      // rect
		std::array<double, 3> center{};        // disc
		double radius = 0;
	};
	std::vector<shape> shapes;
	std::int64_t gamma = 1;
};
scene_shapes read_scene_json(const std::string& path);
void write_scene_json(const std::string& path, const scene_shapes& scene);
target_scene build_scene(const grid_spec& domain, const scene_shapes& shapes);

// flat key=value file; '#' starts a comment
std::map<std::string, std::string> read_config(const std::string& path);

std::vector<std::string> split(const std::string& s, char sep);

}  // namespace tdalab
