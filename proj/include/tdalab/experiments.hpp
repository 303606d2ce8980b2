#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tdalab/closed_forms.hpp"
#include "tdalab/field_sim.hpp"
#include "tdalab/grid.hpp"
#include "tdalab/persistence.hpp"
#include "tdalab/point_cloud.hpp"

namespace tdalab {

struct experiment_config {
	std::string experiment = "ec-curve";
	grid_spec grid = grid_spec::square(64);
	double alpha = 100.0;
	int runs = 2000;
	std::uint64_t base_seed = 20120521;
	std::vector<double> levels;
	std::string output_dir;
	int threads = 0;  // 0 = hardware concurrency
	bool smoke = false;
	double hist_bin_width = 0.1;

	// annulus
	int annulus_n = 500;
	double annulus_inner = 0.5;
	double annulus_outer = 1.0;
	int annulus_trials = 100;
	metric_kind annulus_metric = metric_kind::l2;
	int annulus_maxdim = 2;
	double annulus_threshold = 0.5;

	// torus coverage
	int coverage_n = 5;
	double coverage_tau = 0.3;

	// targets
	int target_scenes = 100;
	std::int64_t target_gamma = 1;
	int target_max_per_scene = 10;
	int noisy_targets = 2;
	std::string scene_file;  // optional scene JSON for the noisy half
};

experiment_config default_config(const std::string& experiment);
experiment_config config_from_kv(const std::map<std::string, std::string>& kv);

struct quantity_summary {
	std::string quantity;
	double param = 0;
	int runs = 0;
	double mean = 0;
	double se = 0;
	double closed = 0;  // closed-form value when one exists
	double z = 0;
	bool has_closed = true;
};

struct experiment_result {
	bool pass = true;
	std::vector<quantity_summary> summaries;
	std::vector<std::string> notes;
};

experiment_result run_ec_curve_experiment(const experiment_config& cfg);
experiment_result run_euler_integral_experiment(const experiment_config& cfg);
experiment_result run_barcode_ec_experiment(const experiment_config& cfg);
experiment_result run_diagram_experiment(const experiment_config& cfg);
experiment_result run_torus_coverage_experiment(const experiment_config& cfg);
experiment_result run_annulus_experiment(const experiment_config& cfg);
experiment_result run_target_experiment(const experiment_config& cfg);

experiment_result run_experiment(const experiment_config& cfg);

void write_summary_csv(const std::string& path, const std::vector<quantity_summary>& rows);

// deterministic static scheduling: results must be stored by index
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

// heights of 2N-adjacency local maxima (H0 birth levels of the superlevel
// filtration, global maximum included)
std::vector<double> local_maxima_heights(const grid_field& field);

// heights of interior local minima under the Moore adjacency induced by the
// cubical cofaces (H1 death levels in 2D superlevel filtrations)
std::vector<double> interior_local_minima_heights(const grid_field& field);

struct annulus_trial_outcome {
	bool success = false;
	double h0_ratio = 0;
	double h1_ratio = 0;
	int essential_h0 = 0;
};

annulus_trial_outcome annulus_trial(const experiment_config& cfg, std::uint64_t seed);

}  // namespace tdalab
