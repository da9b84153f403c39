#pragma once

#include "lattice_fe2/dns.hpp"
#include "lattice_fe2/incremental.hpp"
#include "lattice_fe2/macrofe.hpp"
#include "lattice_fe2/material.hpp"
#include "lattice_fe2/unitcell.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace latfe2
{
	enum class ScenarioKind
	{
		Beam,
		PlateX,
		PlateY,
		NotchedCyclic
	};

	std::string to_string(ScenarioKind k);
	ScenarioKind parse_scenario_kind(const std::string &s);

	/// Dog-bone outline in mm, centered on x = grip_width / 2, notches at mid-height.
	struct NotchedGeometry
	{
		double height = 120.0;
		double grip_width = 60.0;
		double gauge_width = 40.0;
		double grip_length = 20.0;
		double shoulder_length = 15.0;
		double notch_radius = 8.0;
		double notch_depth = 5.0;

		/// Throws InputError for outlines that self-intersect or pinch off.
		void validate() const;
		/// Half width of the specimen at height y.
		double half_width(double y) const;
		bool contains(const Eigen::Vector2d &p) const;
	};

	struct ScenarioSpec
	{
		ScenarioKind scenario = ScenarioKind::Beam;
		CellKind lattice = CellKind::Triangular;
		int nx = 30, ny = 6;  ///< lattice distribution; ignored by NotchedCyclic
		double cell_size = 1.0;
		double strut_area = 0.1;
		double thickness = 1.0;
		int mesh_nx = 0, mesh_ny = 0;  ///< 0 picks the scenario default
		MaterialParams material = MaterialParams::alsi10mg();
		std::optional<double> applied;  ///< overrides the prescribed displacement (amplitude when cyclic)
		std::optional<LoadSchedule> schedule;  ///< load factor schedule; the scenario default otherwise
		int increments = 20;
		NotchedGeometry notch;
		NewtonOptions newton;
		MicroSolveOptions micro;

		void validate() const;
		/// Applied displacement at load factor 1.
		double applied_displacement() const;
		LoadSchedule load_schedule() const;
		int macro_nx() const;
		int macro_ny() const;
	};

	/// Boundary conditions and measurement points shared by both solvers.
	struct LoadCase
	{
		std::vector<DirichletSet> dirichlet;
		std::string loaded_set;
		double applied = 0.0;  ///< displacement at factor 1
		int probe_node = -1;
		int probe_component = 0;
	};

	struct CurveRecord
	{
		double pseudo_time = 0.0;
		double applied_displacement = 0.0;
		double reaction = 0.0;
		std::optional<double> transverse;
		std::optional<double> poisson;
	};

	using Curve = std::vector<CurveRecord>;

	struct MacroSetup
	{
		std::unique_ptr<MacroModel> model;
		LoadCase load;
	};

	struct DnsSetup
	{
		std::unique_ptr<DnsModel> model;
		LoadCase load;
	};

	MacroSetup build_beam(const ScenarioSpec &spec);
	MacroSetup build_plate(const ScenarioSpec &spec);
	MacroSetup build_notched(const ScenarioSpec &spec);
	MacroSetup build_macro(const ScenarioSpec &spec);

	DnsSetup build_beam_dns(const ScenarioSpec &spec);
	DnsSetup build_plate_dns(const ScenarioSpec &spec);
	DnsSetup build_notched_dns(const ScenarioSpec &spec);
	DnsSetup build_dns(const ScenarioSpec &spec);

	/// Mapped structured Q4 mesh of the notched outline.
	QuadMesh notched_mesh(const NotchedGeometry &g, int nx, int ny);

	/// -u_trans / u_axial; throws InputError for zero axial displacement.
	double poisson_ratio(double u_trans, double u_axial);

	struct RunResult
	{
		Curve curve;
		std::vector<IncrementRecord> log;
		Eigen::VectorXd u;
		double seconds = 0.0;
	};

	/// Runs the incremental solve and samples the curve after every converged increment.
	RunResult run_problem(NonlinearProblem &problem, const LoadCase &load, const LoadSchedule &schedule,
						  const NewtonOptions &opts);

	RunResult run_homogenization(MacroSetup &setup, const ScenarioSpec &spec, int workers = 1);
	RunResult run_dns(DnsSetup &setup, const ScenarioSpec &spec, int workers = 1);
} // namespace latfe2
