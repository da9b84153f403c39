#pragma once

#include "lattice_fe2/scenarios.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>

namespace latfe2
{
	enum class SolverMode
	{
		Homogenization,
		Dns,
		Both
	};

	std::string to_string(SolverMode m);

	struct OutputToggles
	{
		bool curves = true;
		bool poisson = true;
		bool displacement_field = false;
		bool yield_map = false;
	};

	struct RunConfig
	{
		ScenarioSpec spec;
		SolverMode mode = SolverMode::Homogenization;
		std::string output_dir = "latfe2_out";
		OutputToggles output;
		int workers = 0;  ///< 0 means default_worker_count()

		/// Fully resolved configuration, defaults included.
		nlohmann::ordered_json to_json() const;
	};

	/// Throws InputError naming the offending field.
	RunConfig parse_run_config(const nlohmann::json &j);
	RunConfig load_run_config(const std::string &path);

	/// Named configurations and constants.
	nlohmann::ordered_json presets();

	struct RunSummary
	{
		std::vector<std::string> files;
		nlohmann::ordered_json manifest;
	};

	/// Executes the configured solver(s) and writes artifacts to output_dir.
	RunSummary run(const RunConfig &config, std::ostream &log);
} // namespace latfe2
