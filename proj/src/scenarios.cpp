#include "lattice_fe2/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

namespace latfe2
{
	std::string to_string(ScenarioKind k)
	{
		switch (k)
		{
		case ScenarioKind::Beam:
			return "beam";
		case ScenarioKind::PlateX:
			return "plate_x";
		case ScenarioKind::PlateY:
			return "plate_y";
		case ScenarioKind::NotchedCyclic:
			return "notched_cyclic";
		}
		return "unknown";
	}

	ScenarioKind parse_scenario_kind(const std::string &s)
	{
		for (ScenarioKind k : {ScenarioKind::Beam, ScenarioKind::PlateX, ScenarioKind::PlateY, ScenarioKind::NotchedCyclic})
			if (to_string(k) == s)
				return k;
		throw InputError("unknown scenario '" + s + "'");
	}

	void NotchedGeometry::validate() const
	{
		if (!(height > 0 && grip_width > 0 && gauge_width > 0 && grip_length >= 0 && shoulder_length >= 0))
			throw InputError("notched geometry: dimensions must be positive");
		if (gauge_width > grip_width)
			throw InputError("notched geometry: gauge_width exceeds grip_width");
		if (2 * (grip_length + shoulder_length) + 2 * notch_radius > height)
			throw InputError("notched geometry: grips, shoulders and notches do not fit in the height");
		if (!(notch_radius > 0) || !(notch_depth > 0) || notch_depth >= notch_radius)
			throw InputError("notched geometry: notch depth must be positive and below the notch radius");
		if (2 * notch_depth >= gauge_width)
			throw InputError("notched geometry: notches intersect each other");
	}

	double NotchedGeometry::half_width(double y) const
	{
		const double hg = 0.5 * grip_width, hc = 0.5 * gauge_width;
		const double d = std::min(y, height - y);  // distance to the nearer end
		double hw = hc;
		if (d <= grip_length)
			hw = hg;
		else if (d < grip_length + shoulder_length)
		{
			const double s = (d - grip_length) / shoulder_length;
			hw = hc + (hg - hc) * 0.5 * (1 + std::cos(std::numbers::pi * s));
		}
		const double dy = y - 0.5 * height;
		if (std::abs(dy) < notch_radius)
		{
			const double center = hc + notch_radius - notch_depth;
			hw = std::min(hw, center - std::sqrt(notch_radius * notch_radius - dy * dy));
		}
		return hw;
	}

	bool NotchedGeometry::contains(const Eigen::Vector2d &p) const
	{
		if (p.y() < 0 || p.y() > height)
			return false;
		return std::abs(p.x() - 0.5 * grip_width) <= half_width(p.y());
	}

	void ScenarioSpec::validate() const
	{
		material.validate();
		if (!(cell_size > 0) || !(strut_area > 0) || !(thickness > 0))
			throw InputError("scenario: cell_size, strut_area and thickness must be positive");
		if (scenario != ScenarioKind::NotchedCyclic && (nx < 1 || ny < 1))
			throw InputError("scenario: lattice distribution must be at least 1x1");
		if (mesh_nx < 0 || mesh_ny < 0)
			throw InputError("scenario: mesh density must be positive");
		if (increments < 1)
			throw InputError("scenario: increments must be positive");
		if (applied && !std::isfinite(*applied))
			throw InputError("scenario: applied displacement must be finite");
		if (scenario == ScenarioKind::NotchedCyclic)
		{
			notch.validate();
			for (double v : {notch.height, notch.grip_width})
				if (std::abs(v / cell_size - std::round(v / cell_size)) > 1e-9)
					throw InputError("notched geometry: height and grip_width must be multiples of cell_size");
		}
		if (schedule)
			schedule->validate();
	}

	double ScenarioSpec::applied_displacement() const
	{
		if (applied)
			return *applied;
		switch (scenario)
		{
		case ScenarioKind::Beam:
			return 0.1 * ny * cell_size;
		case ScenarioKind::PlateX:
		case ScenarioKind::PlateY:
			return 1.0;
		case ScenarioKind::NotchedCyclic:
			return 0.005 * notch.height;
		}
		return 0.0;
	}

	LoadSchedule ScenarioSpec::load_schedule() const
	{
		if (schedule)
			return *schedule;
		LoadSchedule s = LoadSchedule::ramp(increments);
		if (scenario == ScenarioKind::NotchedCyclic)
			s.points = {{0, 0}, {1, 1}, {2, 0}, {3, -1}, {4, 0}, {5, 1}};
		return s;
	}

	int ScenarioSpec::macro_nx() const
	{
		if (mesh_nx > 0)
			return mesh_nx;
		switch (scenario)
		{
		case ScenarioKind::Beam:
			return 30;
		case ScenarioKind::PlateX:
		case ScenarioKind::PlateY:
			return 8;
		case ScenarioKind::NotchedCyclic:
			return 16;
		}
		return 1;
	}

	int ScenarioSpec::macro_ny() const
	{
		if (mesh_ny > 0)
			return mesh_ny;
		switch (scenario)
		{
		case ScenarioKind::Beam:
			return 6;
		case ScenarioKind::PlateX:
		case ScenarioKind::PlateY:
			return 8;
		case ScenarioKind::NotchedCyclic:
			return 48;
		}
		return 1;
	}

	namespace
	{
		void edge_sets(const Points2<double> &nodes, double lx, double ly, std::map<std::string, std::vector<int>> &sets)
		{
			const double tol = 1e-9 * std::max(lx, ly);
			for (Eigen::Index n = 0; n < nodes.rows(); ++n)
			{
				const int i = static_cast<int>(n);
				if (std::abs(nodes(n, 0)) <= tol)
					sets["left"].push_back(i);
				if (std::abs(nodes(n, 0) - lx) <= tol)
					sets["right"].push_back(i);
				if (std::abs(nodes(n, 1)) <= tol)
					sets["bottom"].push_back(i);
				if (std::abs(nodes(n, 1) - ly) <= tol)
					sets["top"].push_back(i);
			}
		}

		int nearest(const Points2<double> &nodes, const Eigen::Vector2d &p)
		{
			Eigen::Index best = 0;
			(nodes.rowwise() - p.transpose()).rowwise().squaredNorm().minCoeff(&best);
			return static_cast<int>(best);
		}

		LoadCase load_case(const ScenarioSpec &spec, const std::map<std::string, std::vector<int>> &sets,
						   const Points2<double> &nodes, double lx, double ly)
		{
			const auto set = [&](const std::string &name) {
				const auto it = sets.find(name);
				if (it == sets.end() || it->second.empty())
					throw InputError("scenario: empty boundary set '" + name + "'");
				return it->second;
			};
			LoadCase lc;
			lc.applied = spec.applied_displacement();
			switch (spec.scenario)
			{
			case ScenarioKind::Beam:
				lc.dirichlet = {{"left_x", set("left"), 0, 0.0},
								{"left_y", set("left"), 1, 0.0},
								{"right_x", set("right"), 0, 0.0},
								{"right_y", set("right"), 1, lc.applied}};
				lc.loaded_set = "right_y";
				break;
			case ScenarioKind::PlateX:
				lc.dirichlet = {{"left_x", set("left"), 0, 0.0},
								{"bottom_y", set("bottom"), 1, 0.0},
								{"right_x", set("right"), 0, lc.applied}};
				lc.loaded_set = "right_x";
				lc.probe_node = nearest(nodes, {0.5 * lx, ly});
				lc.probe_component = 1;
				break;
			case ScenarioKind::PlateY:
				lc.dirichlet = {{"left_x", set("left"), 0, 0.0},
								{"bottom_y", set("bottom"), 1, 0.0},
								{"top_y", set("top"), 1, lc.applied}};
				lc.loaded_set = "top_y";
				lc.probe_node = nearest(nodes, {lx, 0.5 * ly});
				lc.probe_component = 0;
				break;
			case ScenarioKind::NotchedCyclic:
				lc.dirichlet = {{"bottom_x", set("bottom"), 0, 0.0},
								{"bottom_y", set("bottom"), 1, 0.0},
								{"top_x", set("top"), 0, 0.0},
								{"top_y", set("top"), 1, lc.applied}};
				lc.loaded_set = "top_y";
				break;
			}
			return lc;
		}

		MacroSetup macro_setup(const ScenarioSpec &spec, QuadMesh mesh, double lx, double ly)
		{
			MacroSetup s;
			const auto cell = make_unit_cell<double>(spec.lattice, spec.cell_size, spec.strut_area, spec.thickness);
			s.model = std::make_unique<MacroModel>(std::move(mesh), cell, spec.material, spec.thickness);
			s.model->micro_options = spec.micro;
			edge_sets(s.model->mesh().nodes, lx, ly, s.model->node_sets);
			s.load = load_case(spec, s.model->node_sets, s.model->mesh().nodes, lx, ly);
			s.model->dirichlet = s.load.dirichlet;
			return s;
		}

		DnsSetup dns_setup(const ScenarioSpec &spec, DnsLattice lattice)
		{
			DnsSetup s;
			const double lx = lattice.nx * spec.cell_size, ly = lattice.ny * spec.cell_size;
			s.load = load_case(spec, lattice.node_sets, lattice.nodes, lx, ly);
			s.model = std::make_unique<DnsModel>(std::move(lattice), spec.material);
			return s;
		}

		void require(const ScenarioSpec &spec, std::initializer_list<ScenarioKind> kinds, const char *what)
		{
			spec.validate();
			for (ScenarioKind k : kinds)
				if (spec.scenario == k)
					return;
			throw InputError(std::string(what) + ": wrong scenario kind '" + to_string(spec.scenario) + "'");
		}
	} // namespace

	MacroSetup build_beam(const ScenarioSpec &spec)
	{
		require(spec, {ScenarioKind::Beam}, "build_beam");
		const double lx = spec.nx * spec.cell_size, ly = spec.ny * spec.cell_size;
		return macro_setup(spec, rectangle_mesh(lx, ly, spec.macro_nx(), spec.macro_ny()), lx, ly);
	}

	MacroSetup build_plate(const ScenarioSpec &spec)
	{
		require(spec, {ScenarioKind::PlateX, ScenarioKind::PlateY}, "build_plate");
		const double lx = spec.nx * spec.cell_size, ly = spec.ny * spec.cell_size;
		return macro_setup(spec, rectangle_mesh(lx, ly, spec.macro_nx(), spec.macro_ny()), lx, ly);
	}

	QuadMesh notched_mesh(const NotchedGeometry &g, int nx, int ny)
	{
		g.validate();
		if (nx < 1 || ny < 1)
			throw InputError("notched mesh: element counts must be positive");
		QuadMesh m;
		m.nodes.resize((nx + 1) * (ny + 1), 2);
		for (int j = 0; j <= ny; ++j)
		{
			const double y = g.height * j / ny;
			const double hw = g.half_width(y);
			for (int i = 0; i <= nx; ++i)
				m.nodes.row(j * (nx + 1) + i) << 0.5 * g.grip_width + hw * (2.0 * i / nx - 1.0), y;
		}
		for (int j = 0; j < ny; ++j)
			for (int i = 0; i < nx; ++i)
			{
				const int n0 = j * (nx + 1) + i;
				m.elements.push_back({n0, n0 + 1, n0 + nx + 2, n0 + nx + 1});
			}
		return m;
	}

	MacroSetup build_notched(const ScenarioSpec &spec)
	{
		require(spec, {ScenarioKind::NotchedCyclic}, "build_notched");
		return macro_setup(spec, notched_mesh(spec.notch, spec.macro_nx(), spec.macro_ny()), spec.notch.grip_width,
						   spec.notch.height);
	}

	MacroSetup build_macro(const ScenarioSpec &spec)
	{
		switch (spec.scenario)
		{
		case ScenarioKind::Beam:
			return build_beam(spec);
		case ScenarioKind::PlateX:
		case ScenarioKind::PlateY:
			return build_plate(spec);
		case ScenarioKind::NotchedCyclic:
			return build_notched(spec);
		}
		throw InputError("unknown scenario");
	}

	DnsSetup build_beam_dns(const ScenarioSpec &spec)
	{
		require(spec, {ScenarioKind::Beam}, "build_beam_dns");
		return dns_setup(spec, generate_lattice(spec.lattice, spec.nx, spec.ny, spec.cell_size, spec.strut_area));
	}

	DnsSetup build_plate_dns(const ScenarioSpec &spec)
	{
		require(spec, {ScenarioKind::PlateX, ScenarioKind::PlateY}, "build_plate_dns");
		return dns_setup(spec, generate_lattice(spec.lattice, spec.nx, spec.ny, spec.cell_size, spec.strut_area));
	}

	DnsSetup build_notched_dns(const ScenarioSpec &spec)
	{
		require(spec, {ScenarioKind::NotchedCyclic}, "build_notched_dns");
		const NotchedGeometry &g = spec.notch;
		const int nx = static_cast<int>(std::lround(g.grip_width / spec.cell_size));
		const int ny = static_cast<int>(std::lround(g.height / spec.cell_size));
		return dns_setup(spec, generate_lattice(spec.lattice, nx, ny, spec.cell_size, spec.strut_area,
												[&g](const Eigen::Vector2d &p) { return g.contains(p); }));
	}

	DnsSetup build_dns(const ScenarioSpec &spec)
	{
		switch (spec.scenario)
		{
		case ScenarioKind::Beam:
			return build_beam_dns(spec);
		case ScenarioKind::PlateX:
		case ScenarioKind::PlateY:
			return build_plate_dns(spec);
		case ScenarioKind::NotchedCyclic:
			return build_notched_dns(spec);
		}
		throw InputError("unknown scenario");
	}

	double poisson_ratio(double u_trans, double u_axial)
	{
		if (u_axial == 0.0 || !std::isfinite(u_axial))
			throw InputError("poisson_ratio: axial displacement must be non-zero");
		return -u_trans / u_axial;
	}

	RunResult run_problem(NonlinearProblem &problem, const LoadCase &load, const LoadSchedule &schedule,
						  const NewtonOptions &opts)
	{
		const auto start = std::chrono::steady_clock::now();
		RunResult out;
		const DirichletSet *loaded = nullptr;
		for (const auto &d : load.dirichlet)
			if (d.name == load.loaded_set)
				loaded = &d;
		if (!loaded)
			throw InputError("unknown loaded set '" + load.loaded_set + "'");

		const auto sample = [&](double t, double factor, const Eigen::VectorXd &u, const Eigen::VectorXd &r) {
			CurveRecord c;
			c.pseudo_time = t;
			c.applied_displacement = factor * load.applied;
			c.reaction = reaction_sum(r, loaded->nodes, loaded->component);
			if (load.probe_node >= 0)
			{
				c.transverse = u(2 * load.probe_node + load.probe_component);
				if (c.applied_displacement != 0.0)
					c.poisson = poisson_ratio(*c.transverse, c.applied_displacement);
			}
			out.curve.push_back(c);
		};

		schedule.validate();
		IncrementalSolver solver(problem, load.dirichlet, opts);
		solver.initialize();
		sample(schedule.points.front().first, schedule.factor(schedule.points.front().first), solver.displacements(),
			   solver.internal_forces());
		solver.run(schedule, [&](const StepView &v) { sample(v.record.time, v.record.factor, v.u, v.r_int); });
		out.log = solver.log();
		out.u = solver.displacements();
		out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
		return out;
	}

	RunResult run_homogenization(MacroSetup &setup, const ScenarioSpec &spec, int workers)
	{
		setup.model->workers = workers;
		return run_problem(*setup.model, setup.load, spec.load_schedule(), spec.newton);
	}

	RunResult run_dns(DnsSetup &setup, const ScenarioSpec &spec, int workers)
	{
		setup.model->workers = workers;
		return run_problem(*setup.model, setup.load, spec.load_schedule(), spec.newton);
	}
} // namespace latfe2
