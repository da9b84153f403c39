#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace latfe2
{
	/// Voigt arrays in 2D: strain (exx, eyy, gamma_xy), stress (sxx, syy, sxy).
	template <typename Scalar>
	using Voigt = Eigen::Matrix<Scalar, 3, 1>;

	template <typename Scalar>
	using VoigtMatrix = Eigen::Matrix<Scalar, 3, 3>;

	template <typename Scalar>
	using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

	template <typename Scalar>
	using DynVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

	template <typename Scalar>
	using DynMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

	template <typename Scalar>
	using Points2 = Eigen::Matrix<Scalar, Eigen::Dynamic, 2, Eigen::RowMajor>;

	using Voigt3d = Voigt<double>;
	using Voigt33d = VoigtMatrix<double>;

	/// Base for all solver failures that a caller may react to (substepping, exit codes).
	class SolveError : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

	/// Raised for invalid arguments or inconsistent model input.
	class InputError : public std::invalid_argument
	{
	public:
		using std::invalid_argument::invalid_argument;
	};
} // namespace latfe2
