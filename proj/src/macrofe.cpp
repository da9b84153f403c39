#include "lattice_fe2/macrofe.hpp"

#include "lattice_fe2/parallel.hpp"

#include <cmath>
#include <sstream>

namespace latfe2
{
	ShapeValues shape_functions(double xi, double eta)
	{
		ShapeValues s;
		s.N << 0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta), 0.25 * (1 + xi) * (1 + eta),
			0.25 * (1 - xi) * (1 + eta);
		s.dN << -0.25 * (1 - eta), -0.25 * (1 - xi),
			0.25 * (1 - eta), -0.25 * (1 + xi),
			0.25 * (1 + eta), 0.25 * (1 + xi),
			-0.25 * (1 + eta), 0.25 * (1 - xi);
		return s;
	}

	const std::array<Eigen::Vector2d, 4> &gauss_points()
	{
		static const double g = 1.0 / std::sqrt(3.0);
		static const std::array<Eigen::Vector2d, 4> pts{Eigen::Vector2d(-g, -g), Eigen::Vector2d(g, -g),
														  Eigen::Vector2d(g, g), Eigen::Vector2d(-g, g)};
		return pts;
	}

	QuadMesh rectangle_mesh(double lx, double ly, int nx, int ny)
	{
		if (nx < 1 || ny < 1 || !(lx > 0) || !(ly > 0))
			throw InputError("rectangle mesh: positive sizes and element counts are required");
		QuadMesh m;
		m.nodes.resize((nx + 1) * (ny + 1), 2);
		for (int j = 0; j <= ny; ++j)
			for (int i = 0; i <= nx; ++i)
				m.nodes.row(j * (nx + 1) + i) << lx * i / nx, ly * j / ny;
		for (int j = 0; j < ny; ++j)
			for (int i = 0; i < nx; ++i)
			{
				const int n0 = j * (nx + 1) + i;
				m.elements.push_back({n0, n0 + 1, n0 + nx + 2, n0 + nx + 1});
			}
		return m;
	}

	GaussGeometry gauss_geometry(const QuadMesh &mesh, int element, int gp, double thickness)
	{
		const auto &conn = mesh.elements.at(static_cast<std::size_t>(element));
		const Eigen::Vector2d &p = gauss_points().at(static_cast<std::size_t>(gp));
		const ShapeValues s = shape_functions(p.x(), p.y());
		Eigen::Matrix<double, 4, 2> X;
		for (int a = 0; a < 4; ++a)
			X.row(a) = mesh.nodes.row(conn[static_cast<std::size_t>(a)]);
		const Eigen::Matrix2d J = s.dN.transpose() * X;  // J(i, j) = d x_j / d xi_i
		const double det = J.determinant();
		if (!(det > 0.0))
		{
			std::ostringstream msg;
			msg << "element " << element << ": non-positive Jacobian at Gauss point " << gp;
			throw InputError(msg.str());
		}
		const Eigen::Matrix<double, 4, 2> dNdx = s.dN * J.inverse().transpose();

		GaussGeometry g;
		g.B.setZero();
		for (int a = 0; a < 4; ++a)
		{
			g.B(0, 2 * a) = dNdx(a, 0);
			g.B(1, 2 * a + 1) = dNdx(a, 1);
			g.B(2, 2 * a) = dNdx(a, 1);
			g.B(2, 2 * a + 1) = dNdx(a, 0);
		}
		g.weight = det * thickness;
		g.position = X.transpose() * s.N;
		return g;
	}

	namespace
	{
		Eigen::Matrix<double, 8, 1> gather(const QuadMesh &mesh, int element, const Eigen::VectorXd &u)
		{
			Eigen::Matrix<double, 8, 1> ue;
			const auto &conn = mesh.elements[static_cast<std::size_t>(element)];
			for (int a = 0; a < 4; ++a)
				ue.segment<2>(2 * a) = u.segment<2>(2 * conn[static_cast<std::size_t>(a)]);
			return ue;
		}
	} // namespace

	Voigt3d element_strain(const QuadMesh &mesh, int element, const Eigen::VectorXd &u, int gp)
	{
		return gauss_geometry(mesh, element, gp).B * gather(mesh, element, u);
	}

	GaussPointFailure::GaussPointFailure(int element_, int gp_, const std::string &why)
		: SolveError("element " + std::to_string(element_) + ", Gauss point " + std::to_string(gp_) + ": " + why),
		  element(element_), gp(gp_)
	{
	}

	MacroModel::MacroModel(QuadMesh mesh, UnitCellTopology<double> cell, MaterialParams mat, double thickness)
		: mesh_(std::move(mesh)), cell_(std::move(cell)), mat_(mat), thickness_(thickness)
	{
		mat_.validate();
		if (!(thickness_ > 0))
			throw InputError("macro model: thickness must be positive");
		for (int e = 0; e < mesh_.element_count(); ++e)
			for (const int n : mesh_.elements[static_cast<std::size_t>(e)])
				if (n < 0 || n >= mesh_.node_count())
					throw InputError("macro model: element " + std::to_string(e) + " references a missing node");
		geometry_.reserve(4 * mesh_.elements.size());
		for (int e = 0; e < mesh_.element_count(); ++e)
			for (int gp = 0; gp < 4; ++gp)
				geometry_.push_back(gauss_geometry(mesh_, e, gp, thickness_));
		MicroPoint virgin;
		virgin.committed = virgin_states(cell_);
		virgin.trial = virgin.committed;
		points_.assign(geometry_.size(), virgin);
	}

	void MacroModel::evaluate(const Eigen::VectorXd &u, Eigen::VectorXd &r_int, std::vector<Triplet> &K)
	{
		const std::size_t ne = mesh_.elements.size();
		std::vector<Eigen::Matrix<double, 8, 1>> fe(ne);
		std::vector<Eigen::Matrix<double, 8, 8>> ke(ne);

		parallel_for(ne, workers, [&](std::size_t e) {
			const Eigen::Matrix<double, 8, 1> ue = gather(mesh_, static_cast<int>(e), u);
			fe[e].setZero();
			ke[e].setZero();
			for (int gp = 0; gp < 4; ++gp)
			{
				const std::size_t q = 4 * e + static_cast<std::size_t>(gp);
				const GaussGeometry &g = geometry_[q];
				MicroPoint &mp = points_[q];
				mp.eps = g.B * ue;
				try
				{
					const MicroResult<double> r = micro_solve(cell_, mp.committed, mp.eps, mat_, micro_options);
					mp.trial = r.strut_states;
					mp.sigma_bar = r.sigma_bar;
					mp.C_bar = r.C_bar;
					mp.micro_iterations = r.iterations;
				}
				catch (const SolveError &err)
				{
					throw GaussPointFailure(static_cast<int>(e), gp, err.what());
				}
				fe[e].noalias() += g.weight * g.B.transpose() * mp.sigma_bar;
				ke[e].noalias() += g.weight * g.B.transpose() * mp.C_bar * g.B;
			}
		});

		r_int.setZero(2 * mesh_.node_count());
		K.reserve(K.size() + 64 * ne);
		for (std::size_t e = 0; e < ne; ++e)
		{
			const auto &conn = mesh_.elements[e];
			for (int a = 0; a < 8; ++a)
			{
				const int ga = 2 * conn[static_cast<std::size_t>(a / 2)] + a % 2;
				r_int(ga) += fe[e](a);
				for (int b = 0; b < 8; ++b)
				{
					const int gb = 2 * conn[static_cast<std::size_t>(b / 2)] + b % 2;
					K.emplace_back(ga, gb, ke[e](a, b));
				}
			}
		}
	}

	void MacroModel::commit()
	{
		for (auto &p : points_)
			p.committed = p.trial;
	}

	GlobalSystem assemble_global(MacroModel &model, const Eigen::VectorXd &u)
	{
		GlobalSystem out;
		std::vector<Triplet> trip;
		model.evaluate(u, out.r_int, trip);
		const int n = 2 * model.node_count();
		out.K.resize(n, n);
		out.K.setFromTriplets(trip.begin(), trip.end());
		return out;
	}
} // namespace latfe2
