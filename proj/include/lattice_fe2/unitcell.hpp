#pragma once

#include "lattice_fe2/material.hpp"
#include "lattice_fe2/pinv.hpp"
#include "lattice_fe2/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <span>
#include <type_traits>
#include <sstream>
#include <string_view>
#include <vector>

namespace latfe2
{
	enum class CellKind
	{
		Triangular,
		XBraced,
		XPBraced
	};

	inline std::string_view to_string(CellKind kind)
	{
		switch (kind)
		{
		case CellKind::Triangular: return "triangular";
		case CellKind::XBraced: return "x_braced";
		case CellKind::XPBraced: return "xp_braced";
		}
		return "unknown";
	}

	inline CellKind parse_cell_kind(std::string_view name)
	{
		if (name == "triangular" || name == "triangle")
			return CellKind::Triangular;
		if (name == "x_braced" || name == "x-braced" || name == "x")
			return CellKind::XBraced;
		if (name == "xp_braced" || name == "xp-braced" || name == "xp")
			return CellKind::XPBraced;
		throw InputError("unknown lattice kind '" + std::string(name) + "'");
	}

	template <typename Scalar>
	struct Strut
	{
		int i = 0;
		int j = 0;
		Scalar length = 0;
		Scalar angle = 0;  ///< direction of (r_j - r_i) against the x axis
		Scalar c = 1;      ///< cos(angle)
		Scalar s = 0;      ///< sin(angle)
	};

	/// Where a cell node sits relative to an independent node: r = r_source + m1 a1 + m2 a2.
	struct PeriodicImage
	{
		int source = 0;
		int m1 = 0;
		int m2 = 0;
	};

	/// Periodic truss unit cell together with its topology matrices.
	///
	/// Nodal dofs are ordered (x, y) per node; independent nodes come first, so
	/// d = B0 d0 + Be eps_hat with d0 the first 2 * independent_nodes entries of d.
	template <typename Scalar = double>
	struct UnitCellTopology
	{
		CellKind kind = CellKind::Triangular;
		Scalar cell_size = 1;
		Scalar strut_area = 1;
		Scalar thickness = 1;

		Points2<Scalar> nodes;
		int independent_nodes = 0;
		std::vector<PeriodicImage> images;
		std::vector<Strut<Scalar>> struts;

		DynMatrix<Scalar> b0;
		Eigen::Matrix<Scalar, Eigen::Dynamic, 3> be;
		Vec2<Scalar> a1 = Vec2<Scalar>::Zero();
		Vec2<Scalar> a2 = Vec2<Scalar>::Zero();
		Scalar volume = 0;

		Eigen::Index node_count() const { return nodes.rows(); }
		Eigen::Index dof_count() const { return 2 * nodes.rows(); }
		Eigen::Index independent_dof_count() const { return 2 * independent_nodes; }
		std::size_t strut_count() const { return struts.size(); }
	};

	namespace detail
	{
		template <typename Scalar>
		Strut<Scalar> make_strut(const Points2<Scalar> &nodes, int i, int j)
		{
			using std::atan2;
			using std::sqrt;
			Strut<Scalar> s;
			s.i = i;
			s.j = j;
			const Vec2<Scalar> d = nodes.row(j).transpose() - nodes.row(i).transpose();
			s.length = sqrt(d.squaredNorm());
			s.angle = atan2(d.y(), d.x());
			s.c = d.x() / s.length;
			s.s = d.y() / s.length;
			return s;
		}
	} // namespace detail

	/// Triangular, X-braced or XP-braced cell of side cell_size and uniform strut area.
	///
	/// Connectivity (1-based node numbers as in the usual figures):
	///  - triangular: 1-2, 1-3, 2-3 with a1 = L(1, 0), a2 = L(1/2, 1)
	///  - X-braced: edges 2-3, 2-4 and half diagonals 1-2, 1-3, 1-4, 1-5
	///  - XP-braced: half diagonals 1-2, 1-5, 1-6, 1-7, arms 1-3, 1-8, 1-4, 1-9,
	///    owned perimeter halves 2-4, 4-5, 2-3, 3-6
	/// Only the bottom and left perimeter belongs to a cell so that tiling never doubles a strut.
	template <typename Scalar = double>
	UnitCellTopology<Scalar> make_unit_cell(CellKind kind, Scalar cell_size, Scalar strut_area, Scalar thickness = 1)
	{
		if (!(cell_size > 0) || !(strut_area > 0) || !(thickness > 0))
			throw InputError("unit cell requires positive side length, strut area and thickness");

		const Scalar L = cell_size;
		const Scalar h = L / 2;
		UnitCellTopology<Scalar> cell;
		cell.kind = kind;
		cell.cell_size = L;
		cell.strut_area = strut_area;
		cell.thickness = thickness;

		std::vector<std::pair<int, int>> connectivity;
		std::vector<std::array<Scalar, 2>> independent;

		switch (kind)
		{
		case CellKind::Triangular:
			cell.a1 << L, 0;
			cell.a2 << h, L;
			independent = {{0, 0}};
			cell.images = {{0, 0, 0}, {0, 1, 0}, {0, 0, 1}};
			connectivity = {{0, 1}, {0, 2}, {1, 2}};
			break;
		case CellKind::XBraced:
			cell.a1 << L, 0;
			cell.a2 << 0, L;
			independent = {{h, h}, {0, 0}};
			cell.images = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 0, 1}, {1, 1, 1}};
			connectivity = {{1, 2}, {1, 3}, {0, 1}, {0, 2}, {0, 3}, {0, 4}};
			break;
		case CellKind::XPBraced:
			cell.a1 << L, 0;
			cell.a2 << 0, L;
			independent = {{h, h}, {0, 0}, {0, h}, {h, 0}};
			cell.images = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {1, 1, 0},
						   {1, 0, 1}, {1, 1, 1}, {2, 1, 0}, {3, 0, 1}};
			connectivity = {{0, 1}, {0, 4}, {0, 5}, {0, 6}, {0, 2}, {0, 7},
							{0, 3}, {0, 8}, {1, 3}, {3, 4}, {1, 2}, {2, 5}};
			break;
		default:
			throw InputError("unknown lattice kind");
		}

		cell.independent_nodes = static_cast<int>(independent.size());
		const auto n = static_cast<Eigen::Index>(cell.images.size());
		cell.nodes.resize(n, 2);
		cell.b0 = DynMatrix<Scalar>::Zero(2 * n, 2 * cell.independent_nodes);
		cell.be = Eigen::Matrix<Scalar, Eigen::Dynamic, 3>::Zero(2 * n, 3);

		for (Eigen::Index i = 0; i < n; ++i)
		{
			const PeriodicImage &img = cell.images[static_cast<std::size_t>(i)];
			const auto &src = independent[static_cast<std::size_t>(img.source)];
			const Vec2<Scalar> shift = Scalar(img.m1) * cell.a1 + Scalar(img.m2) * cell.a2;
			cell.nodes(i, 0) = src[0] + shift.x();
			cell.nodes(i, 1) = src[1] + shift.y();

			cell.b0.template block<2, 2>(2 * i, 2 * img.source).setIdentity();
			// d_i = d_j + eps * shift with eps_xy = gamma_xy / 2
			cell.be(2 * i, 0) = shift.x();
			cell.be(2 * i, 2) = shift.y() / 2;
			cell.be(2 * i + 1, 1) = shift.y();
			cell.be(2 * i + 1, 2) = shift.x() / 2;
		}

		for (auto [i, j] : connectivity)
			cell.struts.push_back(detail::make_strut(cell.nodes, i, j));

		using std::abs;
		cell.volume = abs(cell.a1.x() * cell.a2.y() - cell.a1.y() * cell.a2.x()) * thickness;
		return cell;
	}

	/// Axial strain of strut e from the full nodal displacement array.
	template <typename Scalar, typename Derived>
	Scalar strut_strain(const UnitCellTopology<Scalar> &cell, const Eigen::MatrixBase<Derived> &d, std::size_t e)
	{
		const Strut<Scalar> &s = cell.struts[e];
		const Scalar du = d(2 * s.j) - d(2 * s.i);
		const Scalar dv = d(2 * s.j + 1) - d(2 * s.i + 1);
		return (s.c * du + s.s * dv) / s.length;
	}

	template <typename Scalar = double>
	struct CellAssembly
	{
		DynVector<Scalar> f;                        ///< internal nodal forces
		DynMatrix<Scalar> K;                        ///< unconstrained cell stiffness df/dd
		std::vector<StrutResponse<Scalar>> struts;  ///< per-strut trial response
		DynVector<Scalar> strains;
	};

	/// Unconstrained cell forces and tangent from a full displacement array.
	template <typename Scalar, typename Derived>
	CellAssembly<Scalar> assemble(const UnitCellTopology<Scalar> &cell, const Eigen::MatrixBase<Derived> &d,
								  std::type_identity_t<std::span<const PlasticState<Scalar>>> committed, const MaterialParams &mat,
								  const ReturnMapOptions &rm = {})
	{
		if (committed.size() != cell.struts.size())
			throw InputError("one committed plastic state per strut is required");

		const Eigen::Index n = cell.dof_count();
		CellAssembly<Scalar> out;
		out.f = DynVector<Scalar>::Zero(n);
		out.K = DynMatrix<Scalar>::Zero(n, n);
		out.strains.resize(static_cast<Eigen::Index>(cell.struts.size()));
		out.struts.reserve(cell.struts.size());

		for (std::size_t e = 0; e < cell.struts.size(); ++e)
		{
			const Strut<Scalar> &s = cell.struts[e];
			const Scalar eps = strut_strain(cell, d, e);
			out.strains(static_cast<Eigen::Index>(e)) = eps;
			const StrutResponse<Scalar> r = return_map(eps, committed[e], mat, rm);

			Eigen::Matrix<Scalar, 4, 1> g;
			g << -s.c, -s.s, s.c, s.s;
			const std::array<Eigen::Index, 4> dofs{2 * s.i, 2 * s.i + 1, 2 * s.j, 2 * s.j + 1};
			const Scalar axial = r.sigma * cell.strut_area;
			const Scalar stiffness = cell.strut_area * r.D / s.length;
			for (int a = 0; a < 4; ++a)
			{
				out.f(dofs[a]) += g(a) * axial;
				for (int b = 0; b < 4; ++b)
					out.K(dofs[a], dofs[b]) += stiffness * g(a) * g(b);
			}
			out.struts.push_back(r);
		}
		return out;
	}

	/// Homogenized Voigt stress (1 / V) Be^T f.
	template <typename Scalar, typename Derived>
	Voigt<Scalar> macro_stress(const UnitCellTopology<Scalar> &cell, const Eigen::MatrixBase<Derived> &f)
	{
		return cell.be.transpose() * f / cell.volume;
	}

	/// d(d0)/d(eps_hat) = -(B0^T K B0)^+ B0^T K Be.
	template <typename Scalar, typename Derived>
	Eigen::Matrix<Scalar, Eigen::Dynamic, 3> sensitivity(const UnitCellTopology<Scalar> &cell,
														 const Eigen::MatrixBase<Derived> &K, Scalar pinv_rel_tol = 1e-10)
	{
		const DynMatrix<Scalar> kb0 = K * cell.b0;
		const DynMatrix<Scalar> reduced = cell.b0.transpose() * kb0;
		return -pinv(reduced, pinv_rel_tol, pinv_rel_tol * K.norm()) * (cell.b0.transpose() * (K * cell.be));
	}

	/// C_bar = (1 / V) (B0 S + Be)^T K (B0 S + Be).
	template <typename Scalar, typename DerivedK, typename DerivedS>
	VoigtMatrix<Scalar> macro_tangent(const UnitCellTopology<Scalar> &cell, const Eigen::MatrixBase<DerivedK> &K,
									  const Eigen::MatrixBase<DerivedS> &dd0_deps)
	{
		const Eigen::Matrix<Scalar, Eigen::Dynamic, 3> dd = cell.b0 * dd0_deps + cell.be;
		return dd.transpose() * K * dd / cell.volume;
	}

	struct MicroSolveOptions
	{
		double tol = 1e-9;        ///< ||B0^T f|| <= tol * E * A
		int max_iter = 25;
		double pinv_rel_tol = 1e-10;
		ReturnMapOptions return_map;
	};

	/// Micro Newton iteration failed; carries the imposed strain and residual history.
	class MicroDivergence : public SolveError
	{
	public:
		MicroDivergence(const Voigt3d &eps, std::vector<double> trace)
			: SolveError(message(eps, trace)), eps_hat(eps), residuals(std::move(trace))
		{
		}

		Voigt3d eps_hat;
		std::vector<double> residuals;

	private:
		static std::string message(const Voigt3d &eps, const std::vector<double> &trace)
		{
			std::ostringstream os;
			os << "unit cell Newton did not converge for eps_hat=(" << eps(0) << ", " << eps(1) << ", " << eps(2)
			   << ") after " << trace.size() << " residual evaluations";
			if (!trace.empty())
				os << ", last residual " << trace.back();
			return os.str();
		}
	};

	template <typename Scalar = double>
	struct MicroResult
	{
		DynVector<Scalar> d;
		DynVector<Scalar> d0;
		DynVector<Scalar> f;
		Voigt<Scalar> sigma_bar = Voigt<Scalar>::Zero();
		VoigtMatrix<Scalar> C_bar = VoigtMatrix<Scalar>::Zero();
		DynMatrix<Scalar> K;
		std::vector<PlasticState<Scalar>> strut_states;
		DynVector<Scalar> strut_strains;
		std::vector<StrutResponse<Scalar>> strut_responses;
		int iterations = 0;  ///< Newton updates of d0
		std::vector<Scalar> residuals;
	};

	/// Periodic equilibrium B0^T f(B0 d0 + Be eps_hat) = 0 for the given macro strain.
	/// Committed states are only read; the returned strut states are trial values.
	template <typename Scalar, typename Derived>
	MicroResult<Scalar> micro_solve(const UnitCellTopology<Scalar> &cell, std::type_identity_t<std::span<const PlasticState<Scalar>>> committed,
									const Eigen::MatrixBase<Derived> &eps_hat, const MaterialParams &mat,
									const MicroSolveOptions &opts = {})
	{
		const Voigt<Scalar> eps = eps_hat;
		if (!eps.allFinite())
			throw InputError("micro_solve: non-finite macroscopic strain");

		const Scalar tol = Scalar(opts.tol * mat.E) * cell.strut_area;
		MicroResult<Scalar> out;
		// affine start relative to the first independent node
		out.d0 = DynVector<Scalar>::Zero(cell.independent_dof_count());
		for (int i = 0; i < cell.independent_nodes; ++i)
		{
			const Scalar x = cell.nodes(i, 0) - cell.nodes(0, 0);
			const Scalar y = cell.nodes(i, 1) - cell.nodes(0, 1);
			out.d0(2 * i) = x * eps(0) + Scalar(0.5) * y * eps(2);
			out.d0(2 * i + 1) = y * eps(1) + Scalar(0.5) * x * eps(2);
		}
		// zero mean translation, the gauge kept by the pseudo-inverse updates
		for (int comp = 0; comp < 2 && cell.independent_nodes > 0; ++comp)
		{
			auto v = out.d0(Eigen::seqN(comp, cell.independent_nodes, 2));
			v.array() -= v.mean();
		}

		const auto evaluate = [&](const DynVector<Scalar> &d0, DynVector<Scalar> &d) {
			d = cell.b0 * d0 + cell.be * eps;
			return assemble(cell, d, committed, mat, opts.return_map);
		};
		CellAssembly<Scalar> a = evaluate(out.d0, out.d);
		DynVector<Scalar> g = cell.b0.transpose() * a.f;
		Scalar norm = g.norm();
		out.residuals.push_back(norm);

		for (int it = 0;; ++it)
		{
			if (norm <= tol)
				break;
			if (it >= opts.max_iter)
			{
				std::vector<double> trace(out.residuals.begin(), out.residuals.end());
				throw MicroDivergence(eps.template cast<double>(), std::move(trace));
			}
			const DynMatrix<Scalar> reduced = cell.b0.transpose() * a.K * cell.b0;
			const DynVector<Scalar> step = pinv(reduced, Scalar(opts.pinv_rel_tol), Scalar(opts.pinv_rel_tol) * a.K.norm()) * g;

			// backtrack on the residual norm
			Scalar t = 1;
			DynVector<Scalar> d0_try, d_try;
			CellAssembly<Scalar> a_try;
			DynVector<Scalar> g_try;
			Scalar norm_try = norm;
			for (int ls = 0; ls < 40; ++ls, t *= Scalar(0.5))
			{
				d0_try = out.d0 - t * step;
				a_try = evaluate(d0_try, d_try);
				g_try = cell.b0.transpose() * a_try.f;
				norm_try = g_try.norm();
				if (norm_try < (1 - Scalar(1e-4) * t) * norm)
					break;
			}
			out.d0 = std::move(d0_try);
			out.d = std::move(d_try);
			a = std::move(a_try);
			g = std::move(g_try);
			norm = norm_try;
			out.residuals.push_back(norm);
			out.iterations = it + 1;
		}
		out.f = std::move(a.f);
		out.K = std::move(a.K);
		out.strut_strains = std::move(a.strains);
		out.strut_responses = std::move(a.struts);

		out.strut_states.reserve(out.strut_responses.size());
		for (const auto &r : out.strut_responses)
			out.strut_states.push_back(r.state_new);
		out.sigma_bar = macro_stress(cell, out.f);
		out.C_bar = macro_tangent(cell, out.K, sensitivity(cell, out.K, Scalar(opts.pinv_rel_tol)));
		return out;
	}

	/// Virgin per-strut states for a cell.
	template <typename Scalar = double>
	std::vector<PlasticState<Scalar>> virgin_states(const UnitCellTopology<Scalar> &cell)
	{
		return std::vector<PlasticState<Scalar>>(cell.struts.size());
	}
} // namespace latfe2
