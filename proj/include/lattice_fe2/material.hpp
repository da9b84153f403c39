#pragma once

#include "lattice_fe2/types.hpp"

#include <cmath>
#include <sstream>

namespace latfe2
{
	/// Uniaxial elastoplastic constants (mm, N, MPa).
	struct MaterialParams
	{
		double E = 70000.0;       ///< elastic modulus
		double H = 16000.0;       ///< linear kinematic hardening modulus
		double sigma_y0 = 190.0;  ///< initial yield stress
		double Q_inf = 90.0;      ///< Voce saturation stress
		double b = 13.5;          ///< Voce saturation exponent

		/// Additively manufactured AlSi10Mg.
		static MaterialParams alsi10mg() { return {}; }

		void validate() const
		{
			if (!(E > 0.0) || !(H >= 0.0) || !(sigma_y0 > 0.0) || !(Q_inf >= 0.0) || !(b >= 0.0))
				throw InputError("material parameters violate E > 0, H >= 0, sigma_y0 > 0, Q_inf >= 0, b >= 0");
		}
	};

	/// Per-strut history variables. Virgin state is all zero.
	template <typename Scalar = double>
	struct PlasticState
	{
		Scalar eps_pl = 0;  ///< plastic strain
		Scalar alpha = 0;   ///< accumulated plastic strain (isotropic hardening variable)
		Scalar q = 0;       ///< back stress

		bool operator==(const PlasticState &) const = default;
	};

	template <typename Scalar = double>
	struct StrutResponse
	{
		Scalar sigma = 0;
		Scalar D = 0;  ///< algorithmic tangent d(sigma)/d(eps)
		PlasticState<Scalar> state_new;
		Scalar delta_lambda = 0;
		bool yielded = false;
	};

	/// Local return-mapping iteration failed to converge.
	class ConstitutiveFailure : public SolveError
	{
	public:
		ConstitutiveFailure(double eps, double eps_pl, double alpha, double q)
			: SolveError(message(eps, eps_pl, alpha, q)), strain(eps), state{eps_pl, alpha, q}
		{
		}

		double strain;
		PlasticState<double> state;

	private:
		static std::string message(double eps, double eps_pl, double alpha, double q)
		{
			std::ostringstream os;
			os << "return mapping did not converge at eps=" << eps << " (eps_pl=" << eps_pl
			   << ", alpha=" << alpha << ", q=" << q << ")";
			return os.str();
		}
	};

	struct ReturnMapOptions
	{
		double rel_tol = 1e-12;  ///< |R| <= rel_tol * sigma_y0
		int max_iter = 50;
	};

	/// Voce flow stress sigma_y0 + Q_inf (1 - exp(-b alpha)).
	template <typename Scalar>
	Scalar flow_stress(Scalar alpha, const MaterialParams &mat)
	{
		using std::exp;
		return Scalar(mat.sigma_y0) + Scalar(mat.Q_inf) * (Scalar(1) - exp(-Scalar(mat.b) * alpha));
	}

	template <typename Scalar>
	Scalar flow_stress_slope(Scalar alpha, const MaterialParams &mat)
	{
		using std::exp;
		return Scalar(mat.Q_inf) * Scalar(mat.b) * exp(-Scalar(mat.b) * alpha);
	}

	/// Phi = |sigma - q| - sigma_y(alpha); admissible when <= 0.
	template <typename Scalar>
	Scalar yield_function(Scalar sigma, const PlasticState<Scalar> &state, const MaterialParams &mat)
	{
		using std::abs;
		return abs(sigma - state.q) - flow_stress(state.alpha, mat);
	}

	/// Backward-Euler return mapping with mixed Voce isotropic / linear kinematic hardening.
	///
	/// The scalar consistency residual R(dl) = |xi| - (E + H) dl - sigma_y(alpha_n + dl) is convex
	/// and strictly decreasing, so Newton started at dl = 0 increases monotonically to the root.
	/// Bisection on [0, |xi| / (E + H)] takes over if an iterate ever leaves the bracket.
	template <typename Scalar>
	StrutResponse<Scalar> return_map(Scalar eps, const PlasticState<Scalar> &state, const MaterialParams &mat,
									 const ReturnMapOptions &opts = {})
	{
		using std::abs;
		const Scalar E(mat.E), H(mat.H);

		StrutResponse<Scalar> out;
		const Scalar trial = E * (eps - state.eps_pl);
		const Scalar xi = trial - state.q;
		const Scalar phi_trial = abs(xi) - flow_stress(state.alpha, mat);
		if (phi_trial <= Scalar(0))
		{
			out.sigma = trial;
			out.D = E;
			out.state_new = state;
			return out;
		}

		const Scalar sign = xi > Scalar(0) ? Scalar(1) : Scalar(-1);
		const Scalar tol = Scalar(opts.rel_tol * mat.sigma_y0);
		const auto residual = [&](Scalar dl) { return abs(xi) - (E + H) * dl - flow_stress(state.alpha + dl, mat); };

		Scalar lo(0), hi = abs(xi) / (E + H);
		Scalar dl(0);
		bool converged = false;
		for (int it = 0; it < opts.max_iter; ++it)
		{
			const Scalar r = residual(dl);
			if (abs(r) <= tol)
			{
				converged = true;
				break;
			}
			if (r > Scalar(0))
				lo = dl;
			else
				hi = dl;
			const Scalar slope = -(E + H) - flow_stress_slope(state.alpha + dl, mat);
			Scalar next = dl - r / slope;
			if (!(next > lo && next < hi))
				next = Scalar(0.5) * (lo + hi);
			dl = next;
		}
		if (!converged)
		{
			if (abs(residual(dl)) > tol)
				throw ConstitutiveFailure(double(eps), double(state.eps_pl), double(state.alpha), double(state.q));
		}

		out.delta_lambda = dl;
		out.yielded = true;
		out.state_new.eps_pl = state.eps_pl + dl * sign;
		out.state_new.alpha = state.alpha + dl;
		out.state_new.q = state.q + H * dl * sign;
		out.sigma = trial - E * dl * sign;
		const Scalar slope = H + flow_stress_slope(out.state_new.alpha, mat);
		out.D = E * slope / (E + slope);
		return out;
	}
} // namespace latfe2
