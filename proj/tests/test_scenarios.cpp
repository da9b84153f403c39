#include "doctest.h"

#include "lattice_fe2/scenarios.hpp"

#include <cmath>

using namespace latfe2;

namespace
{
	const DirichletSet &find_set(const LoadCase &load, const std::string &name)
	{
		for (const auto &d : load.dirichlet)
			if (d.name == name)
				return d;
		FAIL("missing Dirichlet set " << name);
		throw;
	}

	Eigen::Vector2d bounds(const QuadMesh &m)
	{
		return m.nodes.colwise().maxCoeff().transpose() - m.nodes.colwise().minCoeff().transpose();
	}
} // namespace

TEST_CASE("scenario names round trip")
{
	for (auto k : {ScenarioKind::Beam, ScenarioKind::PlateX, ScenarioKind::PlateY, ScenarioKind::NotchedCyclic})
		CHECK(parse_scenario_kind(to_string(k)) == k);
	CHECK_THROWS_AS(parse_scenario_kind("bridge"), InputError);
}

TEST_CASE("beam builder")
{
	ScenarioSpec spec;
	spec.nx = 240;
	spec.ny = 48;
	CHECK(spec.applied_displacement() == doctest::Approx(4.8));
	spec.nx = 30;
	spec.ny = 6;
	const MacroSetup s = build_beam(spec);
	CHECK((bounds(s.model->mesh()) - Eigen::Vector2d(30, 6)).norm() < 1e-12);
	CHECK(s.model->mesh().element_count() == 30 * 6);
	CHECK(s.load.loaded_set == "right_y");
	CHECK(find_set(s.load, "right_y").component == 1);
	CHECK(find_set(s.load, "right_x").component == 0);
	CHECK(find_set(s.load, "left_x").scale == 0.0);
	CHECK(find_set(s.load, "left_y").scale == 0.0);
	CHECK(find_set(s.load, "right_y").nodes.size() == 7u);

	const DnsSetup d = build_beam_dns(spec);
	CHECK(d.model->lattice().nx == 30);
	CHECK(find_set(d.load, "right_y").nodes == d.model->lattice().node_sets.at("right"));
}

TEST_CASE("plate builders")
{
	ScenarioSpec spec;
	spec.scenario = ScenarioKind::PlateX;
	spec.nx = spec.ny = 256;
	CHECK(spec.applied_displacement() == 1.0);
	const MacroSetup x = build_plate(spec);
	CHECK((bounds(x.model->mesh()) - Eigen::Vector2d(256, 256)).norm() < 1e-12);
	CHECK(x.load.loaded_set == "right_x");
	CHECK(x.load.probe_component == 1);
	const auto &m = x.model->mesh();
	CHECK(m.nodes(x.load.probe_node, 0) == 128.0);
	CHECK(m.nodes(x.load.probe_node, 1) == 256.0);

	spec.scenario = ScenarioKind::PlateY;
	const MacroSetup y = build_plate(spec);
	CHECK(y.load.loaded_set == "top_y");
	CHECK(y.load.probe_component == 0);
	CHECK(y.model->mesh().nodes(y.load.probe_node, 0) == 256.0);
	CHECK(y.model->mesh().nodes(y.load.probe_node, 1) == 128.0);
}

TEST_CASE("poisson ratio")
{
	CHECK(poisson_ratio(-0.25, 1.0) == 0.25);
	CHECK_THROWS_AS(poisson_ratio(0.1, 0.0), InputError);
}

TEST_CASE("homogenized Poisson ratio does not depend on the lattice distribution")
{
	for (CellKind k : {CellKind::Triangular, CellKind::XBraced, CellKind::XPBraced})
	{
		std::vector<double> nu;
		for (int n : {16, 64, 256})
		{
			ScenarioSpec spec;
			spec.scenario = ScenarioKind::PlateX;
			spec.lattice = k;
			spec.nx = spec.ny = n;
			spec.cell_size = 256.0 / n;
			spec.mesh_nx = spec.mesh_ny = 4;
			spec.applied = 0.05;
			spec.increments = 1;
			MacroSetup setup = build_plate(spec);
			const RunResult r = run_homogenization(setup, spec);
			nu.push_back(r.curve.back().poisson.value());
		}
		CHECK(std::abs(nu[1] - nu[0]) <= 1e-10);
		CHECK(std::abs(nu[2] - nu[0]) <= 1e-10);
	}
}

TEST_CASE("notched geometry")
{
	NotchedGeometry g;
	CHECK_NOTHROW(g.validate());
	CHECK(g.half_width(0.0) == doctest::Approx(30.0));
	CHECK(g.half_width(60.0) == doctest::Approx(15.0));
	CHECK(g.half_width(40.0) == doctest::Approx(20.0));
	CHECK(g.contains({30.0, 60.0}));
	CHECK_FALSE(g.contains({8.0, 60.0}));
	NotchedGeometry bad = g;
	bad.notch_depth = 25.0;
	CHECK_THROWS_AS(bad.validate(), InputError);

	const QuadMesh m = notched_mesh(g, 8, 24);
	for (int e = 0; e < m.element_count(); ++e)
		for (int gp = 0; gp < 4; ++gp)
			CHECK(gauss_geometry(m, e, gp).weight > 0.0);
}

TEST_CASE("cyclic schedule reverses sign")
{
	ScenarioSpec spec;
	spec.scenario = ScenarioKind::NotchedCyclic;
	const LoadSchedule s = spec.load_schedule();
	double lo = 0, hi = 0;
	for (const auto &p : s.points)
	{
		lo = std::min(lo, p.second);
		hi = std::max(hi, p.second);
	}
	CHECK(hi > 0.0);
	CHECK(lo < 0.0);
	CHECK(spec.applied_displacement() > 0.0);
}

TEST_CASE("notched specimen: zero amplitude and hysteresis")
{
	ScenarioSpec spec;
	spec.scenario = ScenarioKind::NotchedCyclic;
	spec.mesh_nx = 4;
	spec.mesh_ny = 12;
	spec.increments = 4;
	LoadSchedule first_cycle;
	first_cycle.points = {{0, 0}, {1, 1}, {2, 0}};
	spec.schedule = first_cycle;

	spec.applied = 0.0;
	MacroSetup zero = build_notched(spec);
	for (const auto &rec : run_homogenization(zero, spec).curve)
		CHECK(rec.reaction == 0.0);

	spec.applied.reset();
	MacroSetup loaded = build_notched(spec);
	const Curve c = run_homogenization(loaded, spec).curve;
	const double peak = c[spec.increments].reaction;
	CHECK(peak > 0.0);
	// back at zero displacement the plastic set leaves a compressive reaction
	CHECK(c.back().applied_displacement == 0.0);
	CHECK(c.back().reaction < -1e-3 * peak);
}
