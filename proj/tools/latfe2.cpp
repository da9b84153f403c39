// latfe2: run lattice homogenization / DNS scenarios from a JSON config.
#include "lattice_fe2/curves.hpp"
#include "lattice_fe2/run_config.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace
{
	constexpr int exit_config = 2;
	constexpr int exit_solver = 3;
} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"Two-scale and direct simulation of elastoplastic truss lattices"};
	app.require_subcommand(1);

	std::string config_path;
	int workers = 0;
	auto *run_cmd = app.add_subcommand("run", "run a configuration file");
	run_cmd->add_option("config", config_path, "JSON configuration")->required();
	run_cmd->add_option("-j,--workers", workers, "worker threads (overrides the config)")->check(CLI::PositiveNumber);

	std::string curve_a, curve_b;
	std::string normalization = "pointwise";
	auto *cmp_cmd = app.add_subcommand("compare", "compare two curve CSV files (second is the reference)");
	cmp_cmd->add_option("a", curve_a, "curve CSV")->required();
	cmp_cmd->add_option("b", curve_b, "reference curve CSV")->required();
	cmp_cmd->add_option("--normalize", normalization, "pointwise or peak")->check(CLI::IsMember({"pointwise", "peak"}));

	app.add_subcommand("presets", "print built-in presets as JSON");

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::ParseError &e)
	{
		const int rc = app.exit(e);
		return rc == 0 ? 0 : exit_config;
	}

	try
	{
		if (*run_cmd)
		{
			latfe2::RunConfig cfg = latfe2::load_run_config(config_path);
			if (workers > 0)
				cfg.workers = workers;
			const auto summary = latfe2::run(cfg, std::cerr);
			for (const auto &f : summary.files)
				std::cout << cfg.output_dir << '/' << f << '\n';
		}
		else if (*cmp_cmd)
		{
			latfe2::CompareOptions opts;
			opts.normalization = normalization == "peak" ? latfe2::Normalization::Peak : latfe2::Normalization::Pointwise;
			const auto rep = latfe2::compare_curves(latfe2::read_curve_csv(curve_a), latfe2::read_curve_csv(curve_b), opts);
			std::cout << latfe2::to_json(rep) << '\n';
		}
		else
			std::cout << latfe2::presets().dump(2) << '\n';
	}
	catch (const latfe2::InputError &e)
	{
		std::cerr << "config error: " << e.what() << '\n';
		return exit_config;
	}
	catch (const latfe2::SolveError &e)
	{
		std::cerr << "solver error: " << e.what() << '\n';
		return exit_solver;
	}
	catch (const std::exception &e)
	{
		std::cerr << "error: " << e.what() << '\n';
		return 1;
	}
	return 0;
}
