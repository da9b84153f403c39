#include "lattice_fe2/run_config.hpp"

#include "lattice_fe2/curves.hpp"
#include "lattice_fe2/parallel.hpp"
#include "lattice_fe2/sparse_solver.hpp"
#include "lattice_fe2/vtk.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

namespace latfe2
{
	using json = nlohmann::json;
	using ojson = nlohmann::ordered_json;

	std::string to_string(SolverMode m)
	{
		switch (m)
		{
		case SolverMode::Homogenization:
			return "homogenization";
		case SolverMode::Dns:
			return "dns";
		case SolverMode::Both:
			return "both";
		}
		return "unknown";
	}

	namespace
	{
		/// Typed access to one JSON object; rejects keys not in `allowed`.
		class Section
		{
		public:
			Section(const json &j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path))
			{
				if (!j_.is_object())
					throw InputError(where("") + ": expected an object");
				for (const auto &[k, v] : j_.items())
					if (!allowed.count(k))
						throw InputError(where(k) + ": unknown key");
			}

			bool has(const std::string &k) const { return j_.contains(k); }
			const json &raw(const std::string &k) const { return j_.at(k); }
			std::string where(const std::string &k) const
			{
				if (k.empty())
					return path_.empty() ? "config" : path_;
				return path_.empty() ? k : path_ + "." + k;
			}

			double number(const std::string &k, double def) const
			{
				if (!has(k))
					return def;
				if (!j_.at(k).is_number())
					throw InputError(where(k) + ": expected a number");
				return j_.at(k).get<double>();
			}

			int integer(const std::string &k, int def) const
			{
				if (!has(k))
					return def;
				if (!j_.at(k).is_number_integer())
					throw InputError(where(k) + ": expected an integer");
				return j_.at(k).get<int>();
			}

			bool boolean(const std::string &k, bool def) const
			{
				if (!has(k))
					return def;
				if (!j_.at(k).is_boolean())
					throw InputError(where(k) + ": expected true or false");
				return j_.at(k).get<bool>();
			}

			std::string text(const std::string &k, const std::string &def) const
			{
				if (!has(k))
					return def;
				if (!j_.at(k).is_string())
					throw InputError(where(k) + ": expected a string");
				return j_.at(k).get<std::string>();
			}

			template <typename F>
			auto guarded(const std::string &k, F &&f) const
			{
				try
				{
					return f();
				}
				catch (const InputError &e)
				{
					throw InputError(where(k) + ": " + e.what());
				}
			}

		private:
			const json &j_;
			std::string path_;
		};

		MaterialParams parse_material(const json &j)
		{
			const Section s(j, "material", {"preset", "E", "H", "sigma_y0", "Q_inf", "b"});
			const std::string preset = s.text("preset", "alsi10mg");
			if (preset != "alsi10mg")
				throw InputError("material.preset: unknown preset '" + preset + "'");
			MaterialParams m = MaterialParams::alsi10mg();
			m.E = s.number("E", m.E);
			m.H = s.number("H", m.H);
			m.sigma_y0 = s.number("sigma_y0", m.sigma_y0);
			m.Q_inf = s.number("Q_inf", m.Q_inf);
			m.b = s.number("b", m.b);
			s.guarded("", [&] { m.validate(); });
			return m;
		}

		LoadSchedule parse_schedule(const json &j, int default_increments)
		{
			const Section s(j, "scenario.schedule", {"points", "increments"});
			LoadSchedule out;
			out.default_increments = default_increments;
			if (!s.has("points") || !s.raw("points").is_array())
				throw InputError("scenario.schedule.points: expected an array of [pseudo_time, factor] pairs");
			out.points.clear();
			for (const auto &p : s.raw("points"))
			{
				if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
					throw InputError("scenario.schedule.points: expected an array of [pseudo_time, factor] pairs");
				out.points.emplace_back(p[0].get<double>(), p[1].get<double>());
			}
			if (s.has("increments"))
			{
				const json &inc = s.raw("increments");
				if (inc.is_number_integer())
					out.default_increments = inc.get<int>();
				else if (inc.is_array())
				{
					for (const auto &v : inc)
					{
						if (!v.is_number_integer())
							throw InputError("scenario.schedule.increments: expected integers");
						out.increments.push_back(v.get<int>());
					}
				}
				else
					throw InputError("scenario.schedule.increments: expected an integer or an array of integers");
			}
			s.guarded("", [&] { out.validate(); });
			return out;
		}

		void parse_scenario(const json &j, ScenarioSpec &spec)
		{
			const Section s(j, "scenario",
							{"kind", "lattice", "nx", "ny", "cell_size", "strut_area", "thickness", "mesh",
							 "applied_displacement", "increments", "schedule", "notch"});
			if (!s.has("kind"))
				throw InputError("scenario.kind: required");
			spec.scenario = s.guarded("kind", [&] { return parse_scenario_kind(s.text("kind", "")); });
			spec.lattice = s.guarded("lattice", [&] { return parse_cell_kind(s.text("lattice", "triangular")); });
			if (spec.scenario == ScenarioKind::PlateX || spec.scenario == ScenarioKind::PlateY)
				spec.nx = spec.ny = 256;
			spec.nx = s.integer("nx", spec.nx);
			spec.ny = s.integer("ny", spec.ny);
			spec.cell_size = s.number("cell_size", spec.cell_size);
			spec.strut_area = s.number("strut_area", spec.strut_area);
			spec.thickness = s.number("thickness", spec.thickness);
			if (s.has("mesh"))
			{
				const Section m(s.raw("mesh"), "scenario.mesh", {"nx", "ny"});
				spec.mesh_nx = m.integer("nx", 0);
				spec.mesh_ny = m.integer("ny", 0);
				if (spec.mesh_nx < 0 || spec.mesh_ny < 0)
					throw InputError("scenario.mesh: element counts must be positive");
			}
			if (s.has("applied_displacement"))
				spec.applied = s.number("applied_displacement", 0.0);
			spec.increments = s.integer("increments", spec.increments);
			if (spec.increments < 1)
				throw InputError("scenario.increments: must be positive");
			if (s.has("schedule"))
				spec.schedule = parse_schedule(s.raw("schedule"), spec.increments);
			if (s.has("notch"))
			{
				const Section n(s.raw("notch"), "scenario.notch",
								{"height", "grip_width", "gauge_width", "grip_length", "shoulder_length", "notch_radius",
								 "notch_depth"});
				NotchedGeometry &g = spec.notch;
				g.height = n.number("height", g.height);
				g.grip_width = n.number("grip_width", g.grip_width);
				g.gauge_width = n.number("gauge_width", g.gauge_width);
				g.grip_length = n.number("grip_length", g.grip_length);
				g.shoulder_length = n.number("shoulder_length", g.shoulder_length);
				g.notch_radius = n.number("notch_radius", g.notch_radius);
				g.notch_depth = n.number("notch_depth", g.notch_depth);
			}
		}

		void parse_solver(const json &j, ScenarioSpec &spec)
		{
			const Section s(j, "solver",
							{"newton_tol", "newton_abs_floor", "max_newton", "max_bisections", "micro_tol",
							 "micro_max_iter", "pinv_rel_tol", "return_map_tol", "return_map_max_iter"});
			spec.newton.tol_rel = s.number("newton_tol", spec.newton.tol_rel);
			spec.newton.abs_floor = s.number("newton_abs_floor", spec.newton.abs_floor);
			spec.newton.max_iter = s.integer("max_newton", spec.newton.max_iter);
			spec.newton.max_bisections = s.integer("max_bisections", spec.newton.max_bisections);
			spec.micro.tol = s.number("micro_tol", spec.micro.tol);
			spec.micro.max_iter = s.integer("micro_max_iter", spec.micro.max_iter);
			spec.micro.pinv_rel_tol = s.number("pinv_rel_tol", spec.micro.pinv_rel_tol);
			spec.micro.return_map.rel_tol = s.number("return_map_tol", spec.micro.return_map.rel_tol);
			spec.micro.return_map.max_iter = s.integer("return_map_max_iter", spec.micro.return_map.max_iter);
			if (!(spec.newton.tol_rel > 0) || !(spec.newton.abs_floor >= 0) || spec.newton.max_iter < 1 ||
				spec.newton.max_bisections < 0)
				throw InputError("solver: Newton tolerances and iteration caps must be positive");
			if (!(spec.micro.tol > 0) || spec.micro.max_iter < 1 || !(spec.micro.pinv_rel_tol > 0) ||
				!(spec.micro.return_map.rel_tol > 0) || spec.micro.return_map.max_iter < 1)
				throw InputError("solver: micro tolerances and iteration caps must be positive");
		}

		ojson log_json(const std::vector<IncrementRecord> &log)
		{
			ojson out = ojson::array();
			for (const auto &r : log)
				out.push_back({{"pseudo_time", r.time},
							   {"factor", r.factor},
							   {"iterations", r.iterations},
							   {"bisection_depth", r.depth},
							   {"final_residual", r.residuals.empty() ? 0.0 : r.residuals.back()}});
			return out;
		}

		Curve strip_poisson(Curve c)
		{
			for (auto &r : c)
			{
				r.transverse.reset();
				r.poisson.reset();
			}
			return c;
		}
	} // namespace

	RunConfig parse_run_config(const json &j)
	{
		const Section s(j, "", {"scenario", "mode", "material", "output", "solver", "workers"});
		RunConfig c;
		if (!s.has("scenario"))
			throw InputError("scenario: required");
		parse_scenario(s.raw("scenario"), c.spec);
		const std::string mode = s.text("mode", "homogenization");
		if (mode == "homogenization")
			c.mode = SolverMode::Homogenization;
		else if (mode == "dns")
			c.mode = SolverMode::Dns;
		else if (mode == "both")
			c.mode = SolverMode::Both;
		else
			throw InputError("mode: expected homogenization, dns or both, got '" + mode + "'");
		if (s.has("material"))
			c.spec.material = parse_material(s.raw("material"));
		if (s.has("solver"))
			parse_solver(s.raw("solver"), c.spec);
		if (s.has("output"))
		{
			const Section o(s.raw("output"), "output", {"directory", "curves", "poisson", "displacement_field", "yield_map"});
			c.output_dir = o.text("directory", c.output_dir);
			c.output.curves = o.boolean("curves", c.output.curves);
			c.output.poisson = o.boolean("poisson", c.output.poisson);
			c.output.displacement_field = o.boolean("displacement_field", c.output.displacement_field);
			c.output.yield_map = o.boolean("yield_map", c.output.yield_map);
			if (c.output_dir.empty())
				throw InputError("output.directory: must not be empty");
		}
		c.workers = s.integer("workers", 0);
		if (c.workers < 0)
			throw InputError("workers: must be positive");
		s.guarded("scenario", [&] { c.spec.validate(); });
		return c;
	}

	RunConfig load_run_config(const std::string &path)
	{
		std::ifstream is(path);
		if (!is)
			throw InputError("cannot read config '" + path + "'");
		json j;
		try
		{
			j = json::parse(is);
		}
		catch (const json::parse_error &e)
		{
			throw InputError("config '" + path + "' is not valid JSON: " + e.what());
		}
		return parse_run_config(j);
	}

	ojson RunConfig::to_json() const
	{
		const ScenarioSpec &s = spec;
		const LoadSchedule sched = s.load_schedule();
		ojson points = ojson::array();
		for (const auto &[t, f] : sched.points)
			points.push_back({t, f});
		ojson inc = ojson::array();
		for (std::size_t k = 0; k + 1 < sched.points.size(); ++k)
			inc.push_back(sched.segment_increments(k));

		ojson scen{{"kind", latfe2::to_string(s.scenario)},
				   {"lattice", std::string(latfe2::to_string(s.lattice))},
				   {"nx", s.nx},
				   {"ny", s.ny},
				   {"cell_size", s.cell_size},
				   {"strut_area", s.strut_area},
				   {"thickness", s.thickness},
				   {"mesh", {{"nx", s.macro_nx()}, {"ny", s.macro_ny()}}},
				   {"applied_displacement", s.applied_displacement()},
				   {"increments", s.increments},
				   {"schedule", {{"points", points}, {"increments", inc}}}};
		if (s.scenario == ScenarioKind::NotchedCyclic)
			scen["notch"] = {{"height", s.notch.height},
							 {"grip_width", s.notch.grip_width},
							 {"gauge_width", s.notch.gauge_width},
							 {"grip_length", s.notch.grip_length},
							 {"shoulder_length", s.notch.shoulder_length},
							 {"notch_radius", s.notch.notch_radius},
							 {"notch_depth", s.notch.notch_depth}};
		return ojson{{"scenario", scen},
					 {"mode", latfe2::to_string(mode)},
					 {"material",
					  {{"E", s.material.E},
					   {"H", s.material.H},
					   {"sigma_y0", s.material.sigma_y0},
					   {"Q_inf", s.material.Q_inf},
					   {"b", s.material.b}}},
					 {"output",
					  {{"directory", output_dir},
					   {"curves", output.curves},
					   {"poisson", output.poisson},
					   {"displacement_field", output.displacement_field},
					   {"yield_map", output.yield_map}}},
					 {"solver",
					  {{"newton_tol", s.newton.tol_rel},
					   {"newton_abs_floor", s.newton.abs_floor},
					   {"max_newton", s.newton.max_iter},
					   {"max_bisections", s.newton.max_bisections},
					   {"micro_tol", s.micro.tol},
					   {"micro_max_iter", s.micro.max_iter},
					   {"pinv_rel_tol", s.micro.pinv_rel_tol},
					   {"return_map_tol", s.micro.return_map.rel_tol},
					   {"return_map_max_iter", s.micro.return_map.max_iter}}},
					 {"workers", workers > 0 ? workers : default_worker_count()}};
	}

	ojson presets()
	{
		const MaterialParams m = MaterialParams::alsi10mg();
		const auto scenario = [](const std::string &kind, const std::string &lattice, int nx, int ny) {
			return ojson{{"scenario", {{"kind", kind}, {"lattice", lattice}, {"nx", nx}, {"ny", ny}}}, {"mode", "both"}};
		};
		return ojson{
			{"material", {{"alsi10mg", {{"E", m.E}, {"H", m.H}, {"sigma_y0", m.sigma_y0}, {"Q_inf", m.Q_inf}, {"b", m.b}}}}},
			{"cell", {{"cell_size", 1.0}, {"strut_area", 0.1}, {"thickness", 1.0}}},
			{"configs",
			 {{"beam_240x48_triangular", scenario("beam", "triangular", 240, 48)},
			  {"beam_30x6_x_braced", scenario("beam", "x_braced", 30, 6)},
			  {"plate_x_256_triangular", scenario("plate_x", "triangular", 256, 256)},
			  {"plate_y_256_triangular", scenario("plate_y", "triangular", 256, 256)},
			  {"plate_x_256_x_braced", scenario("plate_x", "x_braced", 256, 256)},
			  {"plate_x_256_xp_braced", scenario("plate_x", "xp_braced", 256, 256)},
			  {"notched_cyclic_triangular", ojson{{"scenario", {{"kind", "notched_cyclic"}, {"lattice", "triangular"}}},
												  {"mode", "both"}}}}}};
	}

	RunSummary run(const RunConfig &config, std::ostream &log)
	{
		namespace fs = std::filesystem;
		const auto start = std::chrono::steady_clock::now();
		config.spec.validate();
		const int workers = config.workers > 0 ? config.workers : default_worker_count();
		fs::create_directories(config.output_dir);
		const auto out_path = [&](const std::string &name) { return (fs::path(config.output_dir) / name).string(); };

		RunSummary summary;
		ojson manifest;
		manifest["config"] = config.to_json();
		manifest["sparse_backend"] = SparseSymmetricSolver::backend();
		ojson runs = ojson::object();

		const auto write_curve = [&](const std::string &name, const Curve &curve) {
			if (!config.output.curves)
				return;
			write_curve_csv(out_path(name), config.output.poisson ? curve : strip_poisson(curve));
			summary.files.push_back(name);
		};

		if (config.mode != SolverMode::Dns)
		{
			log << "homogenization: building " << to_string(config.spec.scenario) << " model\n";
			MacroSetup setup = build_macro(config.spec);
			const RunResult r = run_homogenization(setup, config.spec, workers);
			log << "homogenization: " << r.log.size() << " increments in " << r.seconds << " s\n";
			write_curve("homogenization_curve.csv", r.curve);
			if (config.output.displacement_field)
			{
				write_vtk_mesh(out_path("homogenization_displacement.vtk"), setup.model->mesh(), r.u);
				summary.files.push_back("homogenization_displacement.vtk");
			}
			runs["homogenization"] = {{"elements", setup.model->mesh().element_count()},
									  {"gauss_points", setup.model->points().size()},
									  {"seconds", r.seconds},
									  {"increments", log_json(r.log)}};
		}
		if (config.mode != SolverMode::Homogenization)
		{
			log << "dns: building " << to_string(config.spec.scenario) << " lattice\n";
			DnsSetup setup = build_dns(config.spec);
			const RunResult r = run_dns(setup, config.spec, workers);
			log << "dns: " << r.log.size() << " increments in " << r.seconds << " s\n";
			write_curve("dns_curve.csv", r.curve);
			const auto yielded = yield_map(setup.model->committed());
			if (config.output.displacement_field)
			{
				write_vtk_lattice(out_path("dns_displacement.vtk"), setup.model->lattice(), r.u, yielded);
				summary.files.push_back("dns_displacement.vtk");
			}
			if (config.output.yield_map)
			{
				write_yield_map_csv(out_path("yield_map.csv"), setup.model->lattice(), yielded);
				summary.files.push_back("yield_map.csv");
			}
			runs["dns"] = {{"nodes", setup.model->lattice().node_count()},
						   {"struts", setup.model->lattice().strut_count()},
						   {"seconds", r.seconds},
						   {"increments", log_json(r.log)}};
		}
		manifest["runs"] = runs;
		manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
		summary.files.push_back("manifest.json");
		manifest["files"] = summary.files;
		std::ofstream os(out_path("manifest.json"), std::ios::binary);
		if (!os)
			throw InputError("cannot write '" + out_path("manifest.json") + "'");
		os << manifest.dump(2) << '\n';
		summary.manifest = std::move(manifest);
		return summary;
	}
} // namespace latfe2
