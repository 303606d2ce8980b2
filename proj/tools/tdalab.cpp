#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "tdalab/closed_forms.hpp"
#include "tdalab/experiments.hpp"
#include "tdalab/io.hpp"
#include "tdalab/persistence.hpp"

namespace {

void print_usage(int code) {
	std::cout
	    << "Usage: tdalab <command> [options]\n"
	    << "\n"
	    << "Experiments (exit code 0 iff the experiment's acceptance checks pass):\n"
	    << "  ec-curve | euler-integral | barcode-ec | diagrams | torus-coverage | annulus | targets\n"
	    << "    --config <file>   flat key=value config (keys mirror the defaults)\n"
	    << "    --runs N          override run count\n"
	    << "    --seed S          override base seed\n"
	    << "    --out DIR         output directory for CSV/SVG artifacts\n"
	    << "    --smoke           cap runs at 100 for a quick pass\n"
	    << "    --threads N       worker threads (default: hardware)\n"
	    << "\n"
	    << "Closed forms:\n"
	    << "  expected --alpha A --dim N --side T [--levels u1,u2,...]\n"
	    << "    prints quantity,param,value CSV for the closed-form expectations\n"
	    << "\n"
	    << "Point clouds:\n"
	    << "  persist --points FILE.csv [--metric l2|linf] [--complex rips|cech]\n"
	    << "          [--maxdim K] [--threshold T] [--out DIR]\n"
	    << "    filtration.csv, diagram.csv and barcode.svg for a point cloud\n"
	    << "\n"
	    << "Field utilities:\n"
	    << "  sample --alpha A --dim N --size K --seed S --out FILE   write a field snapshot\n";
	std::exit(code);
}

std::map<std::string, std::string> parse_flags(int argc, char** argv, int from) {
	std::map<std::string, std::string> kv;
	for (int i = from; i < argc; ++i) {
		std::string arg = argv[i];
		if (arg.rfind("--", 0) != 0) print_usage(2);
		std::string key = arg.substr(2);
		if (key == "smoke") {
			kv[key] = "1";
		} else {
			if (i + 1 >= argc) print_usage(2);
			kv[key] = argv[++i];
		}
	}
	return kv;
}

int cmd_expected(const std::map<std::string, std::string>& kv) {
	using namespace tdalab;
	double alpha = kv.count("alpha") ? std::stod(kv.at("alpha")) : 100.0;
	int dim = kv.count("dim") ? std::stoi(kv.at("dim")) : 2;
	double side = kv.count("side") ? std::stod(kv.at("side")) : 1.0;
	std::vector<double> levels;
	if (kv.count("levels")) {
		for (const auto& tok : split(kv.at("levels"), ','))
			if (!tok.empty()) levels.push_back(std::stod(tok));
	} else {
		for (double u = -3.0; u <= 3.0 + 1e-9; u += 0.5) levels.push_back(u);
	}
	double lambda2 = second_spectral_moment(covariance_model(alpha));
	lk_vector lk = lk_box(dim, side, lambda2);
	std::printf("quantity,param,value\n");
	std::printf("second_spectral_moment,%.17g,%.17g\n", alpha, lambda2);
	for (int j = 0; j <= dim; ++j) std::printf("lk_box,%d,%.17g\n", j, lk[j]);
	std::printf("expected_euler_integral_identity,0,%.17g\n", -lk[1] * 0.39894228040143267794);
	for (double u : levels) {
		std::printf("expected_ec_excursion,%.17g,%.17g\n", u, expected_ec_excursion(u, lk));
		std::printf("expected_barcode_ec,%.17g,%.17g\n", u, expected_barcode_ec(u, lk, 1.0));
		std::printf("expected_volume_excursion,%.17g,%.17g\n", u, lk[dim] * (1.0 - normal_cdf(u)));
	}
	return 0;
}

int cmd_persist(const std::map<std::string, std::string>& kv) {
	using namespace tdalab;
	if (!kv.count("points")) {
		std::fprintf(stderr, "persist: --points <csv> is required\n");
		return 2;
	}
	metric_kind metric = kv.count("metric") && kv.at("metric") == "linf" ? metric_kind::linf
	                                                                     : metric_kind::l2;
	point_cloud cloud = read_point_cloud_csv(kv.at("points"), metric);
	int maxdim = kv.count("maxdim") ? std::stoi(kv.at("maxdim")) : 2;
	double threshold = kv.count("threshold") ? std::stod(kv.at("threshold"))
	                                         : std::numeric_limits<double>::infinity();
	bool cech = kv.count("complex") && kv.at("complex") == "cech";
	filtered_complex fc = cech ? cech_filtration(cloud, maxdim, threshold)
	                           : rips_filtration(cloud, maxdim, threshold);
	barcode bc = reduce(fc);
	std::string out = kv.count("out") ? kv.at("out") : ".";
	std::filesystem::create_directories(out);
	write_filtration(out + "/filtration.csv", fc);
	persistence_diagram dg = diagram(bc);
	write_diagram_csv(out + "/diagram.csv", dg);
	write_barcode_svg(out + "/barcode.svg", bc, bc.top_degree);
	std::printf("%zu points, %zu cells, %zu bars (maxdim %d, %s)\n", cloud.size(), fc.size(),
	            bc.bars.size(), maxdim, cech ? "cech" : "rips");
	for (int k = 0; k <= bc.top_degree; ++k) {
		std::int64_t essential = 0;
		for (const auto& b : bc.bars)
			if (b.degree == k && b.essential()) ++essential;
		std::printf("  H%d essential classes: %lld\n", k, static_cast<long long>(essential));
	}
	return 0;
}

int cmd_sample(const std::map<std::string, std::string>& kv) {
	using namespace tdalab;
	double alpha = kv.count("alpha") ? std::stod(kv.at("alpha")) : 100.0;
	int dim = kv.count("dim") ? std::stoi(kv.at("dim")) : 2;
	int size = kv.count("size") ? std::stoi(kv.at("size")) : 64;
	std::uint64_t seed = kv.count("seed") ? std::stoull(kv.at("seed")) : 1;
	std::string out = kv.count("out") ? kv.at("out") : "field.csv";
	grid_spec spec = dim == 1 ? grid_spec::line(size) : dim == 2 ? grid_spec::square(size) : grid_spec::cube(size);
	if (kv.count("topology") && kv.at("topology") == "torus") spec.topo = tdalab::topology::torus;
	grid_field f = sample_field(spec, covariance_model(alpha), seed);
	write_field_snapshot(out, f);
	std::printf("wrote %s (%lld values)\n", out.c_str(), static_cast<long long>(spec.num_points()));
	return 0;
}

}  // namespace

int main(int argc, char** argv) {
	if (argc < 2) print_usage(2);
	std::string cmd = argv[1];
	if (cmd == "--help" || cmd == "help") print_usage(0);

	try {
		auto flags = parse_flags(argc, argv, 2);
		if (cmd == "expected") return cmd_expected(flags);
		if (cmd == "sample") return cmd_sample(flags);
		if (cmd == "persist") return cmd_persist(flags);

		std::map<std::string, std::string> kv;
		if (flags.count("config")) kv = tdalab::read_config(flags.at("config"));
		kv["experiment"] = cmd;
		if (flags.count("runs")) kv["runs"] = flags.at("runs");
		if (flags.count("seed")) kv["seed"] = flags.at("seed");
		if (flags.count("out")) kv["out"] = flags.at("out");
		if (flags.count("threads")) kv["threads"] = flags.at("threads");
		if (flags.count("smoke")) kv["smoke"] = "1";
		tdalab::experiment_config cfg = tdalab::config_from_kv(kv);
		tdalab::experiment_result res = tdalab::run_experiment(cfg);

		for (const auto& q : res.summaries) {
			if (q.has_closed)
				std::printf("%-32s param=%-8g mean=%-12.6g se=%-10.4g closed=%-12.6g z=%+.3f\n",
				            q.quantity.c_str(), q.param, q.mean, q.se, q.closed, q.z);
			else
				std::printf("%-32s param=%-8g mean=%-12.6g se=%-10.4g\n", q.quantity.c_str(), q.param,
				            q.mean, q.se);
		}
		for (const auto& n : res.notes) std::printf("note: %s\n", n.c_str());
		std::printf("%s: %s\n", cmd.c_str(), res.pass ? "PASS" : "FAIL");
		return res.pass ? 0 : 1;
	} catch (const std::exception& e) {
		std::fprintf(stderr, "error: %s\n", e.what());
		return 2;
	}
}
