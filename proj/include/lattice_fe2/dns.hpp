#pragma once

#include "lattice_fe2/incremental.hpp"
#include "lattice_fe2/material.hpp"
#include "lattice_fe2/types.hpp"
#include "lattice_fe2/unitcell.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace latfe2
{
	struct LatticeStrut
	{
		int i = 0, j = 0;
		double area = 0.0;
		double length = 0.0;
		double c = 1.0, s = 0.0;  ///< direction cosines from i to j
	};

	/// Finite truss patch of Nx x Ny tiled cells on [0, Nx L] x [0, Ny L].
	struct DnsLattice
	{
		CellKind kind = CellKind::Triangular;
		double cell_size = 1.0;
		int nx = 0, ny = 0;
		Points2<double> nodes;
		std::vector<LatticeStrut> struts;
		/// left, right, bottom, top edges
		std::map<std::string, std::vector<int>> node_sets;

		int node_count() const { return static_cast<int>(nodes.rows()); }
		int strut_count() const { return static_cast<int>(struts.size()); }
		int nearest_node(const Eigen::Vector2d &p) const;
	};

	/// Keeps a cell (or, for the triangular lattice, a triangle) when its centroid satisfies the predicate.
	using DomainPredicate = std::function<bool(const Eigen::Vector2d &)>;

	DnsLattice generate_lattice(CellKind kind, int nx, int ny, double cell_size, double area,
								const DomainPredicate &inside = {});

	/// Truss network with one plastic state per strut.
	class DnsModel : public NonlinearProblem
	{
	public:
		DnsModel(DnsLattice lattice, MaterialParams mat);

		int node_count() const override { return lattice_.node_count(); }
		void evaluate(const Eigen::VectorXd &u, Eigen::VectorXd &r_int, std::vector<Triplet> &K) override;
		void commit() override;

		const DnsLattice &lattice() const { return lattice_; }
		const std::vector<PlasticState<double>> &committed() const { return committed_; }
		const std::vector<double> &strut_stress() const { return stress_; }

		ReturnMapOptions return_map_options;
		int workers = 1;

	private:
		DnsLattice lattice_;
		MaterialParams mat_;
		std::vector<PlasticState<double>> committed_;
		std::vector<PlasticState<double>> trial_;
		std::vector<double> stress_;
		std::vector<double> tangent_;
	};

	struct HistoryPoint
	{
		double time = 0.0;
		double factor = 0.0;
		std::map<std::string, double> reactions;  ///< per Dirichlet set
		Eigen::VectorXd u;
	};

	struct DnsRun
	{
		std::vector<HistoryPoint> history;
		std::vector<IncrementRecord> log;
	};

	/// Incremental solve; keeps displacement snapshots when keep_displacements is set.
	DnsRun dns_solve(DnsModel &model, const std::vector<DirichletSet> &dirichlet, const LoadSchedule &schedule,
					 const NewtonOptions &opts = {}, bool keep_displacements = false);

	/// Strut is flagged once its hardening variable is positive.
	std::vector<bool> yield_map(const std::vector<PlasticState<double>> &states);
} // namespace latfe2
