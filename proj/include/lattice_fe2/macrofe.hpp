#pragma once

#include "lattice_fe2/incremental.hpp"
#include "lattice_fe2/material.hpp"
#include "lattice_fe2/types.hpp"
#include "lattice_fe2/unitcell.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace latfe2
{
	struct ShapeValues
	{
		Eigen::Vector4d N;
		Eigen::Matrix<double, 4, 2> dN;  ///< d/dxi, d/deta
	};

	/// Bilinear quad basis, nodes at (-1,-1), (1,-1), (1,1), (-1,1).
	ShapeValues shape_functions(double xi, double eta);

	/// 2x2 Gauss points in the same order as the element nodes.
	const std::array<Eigen::Vector2d, 4> &gauss_points();

	struct QuadMesh
	{
		Points2<double> nodes;
		std::vector<std::array<int, 4>> elements;  ///< counterclockwise

		int node_count() const { return static_cast<int>(nodes.rows()); }
		int element_count() const { return static_cast<int>(elements.size()); }
	};

	/// Structured nx x ny mesh of [0, lx] x [0, ly]; node (i, j) has index j * (nx + 1) + i.
	QuadMesh rectangle_mesh(double lx, double ly, int nx, int ny);

	struct GaussGeometry
	{
		Eigen::Matrix<double, 3, 8> B;
		double weight = 0.0;  ///< Gauss weight * det J * thickness
		Eigen::Vector2d position;
	};

	/// Throws InputError for a non-positive Jacobian.
	GaussGeometry gauss_geometry(const QuadMesh &mesh, int element, int gp, double thickness = 1.0);

	/// Voigt strain (exx, eyy, gxy) at a Gauss point.
	Voigt3d element_strain(const QuadMesh &mesh, int element, const Eigen::VectorXd &u, int gp);

	struct MicroPoint
	{
		std::vector<PlasticState<double>> committed;
		std::vector<PlasticState<double>> trial;
		Voigt3d eps = Voigt3d::Zero();
		Voigt3d sigma_bar = Voigt3d::Zero();
		Voigt33d C_bar = Voigt33d::Zero();
		int micro_iterations = 0;
	};

	class GaussPointFailure : public SolveError
	{
	public:
		GaussPointFailure(int element_, int gp_, const std::string &why);
		int element;
		int gp;
	};

	/// Q4 continuum whose constitutive response comes from a periodic unit cell at every Gauss point.
	class MacroModel : public NonlinearProblem
	{
	public:
		MacroModel(QuadMesh mesh, UnitCellTopology<double> cell, MaterialParams mat, double thickness = 1.0);

		int node_count() const override { return mesh_.node_count(); }
		void evaluate(const Eigen::VectorXd &u, Eigen::VectorXd &r_int, std::vector<Triplet> &K) override;
		void commit() override;

		const QuadMesh &mesh() const { return mesh_; }
		const UnitCellTopology<double> &cell() const { return cell_; }
		const MaterialParams &material() const { return mat_; }
		double thickness() const { return thickness_; }
		const std::vector<MicroPoint> &points() const { return points_; }
		const MicroPoint &point(int element, int gp) const { return points_[static_cast<std::size_t>(4 * element + gp)]; }

		MicroSolveOptions micro_options;
		int workers = 1;

		/// Named node sets used for boundary conditions and probes.
		std::map<std::string, std::vector<int>> node_sets;
		std::vector<DirichletSet> dirichlet;

	private:
		QuadMesh mesh_;
		UnitCellTopology<double> cell_;
		MaterialParams mat_;
		double thickness_;
		std::vector<GaussGeometry> geometry_;
		std::vector<MicroPoint> points_;
	};

	struct GlobalSystem
	{
		Eigen::VectorXd r_int;
		SparseMatrix K;  ///< full symmetric matrix
	};

	/// Internal forces and tangent at u without touching committed states.
	GlobalSystem assemble_global(MacroModel &model, const Eigen::VectorXd &u);
} // namespace latfe2
