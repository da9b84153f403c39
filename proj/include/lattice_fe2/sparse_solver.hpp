#pragma once

#include "lattice_fe2/types.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <string>

namespace latfe2
{
	using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

	/// Direct solver for symmetric positive definite sparse systems.
	/// The symbolic analysis is reused while the sparsity pattern stays the same.
	class SparseSymmetricSolver
	{
	public:
		SparseSymmetricSolver();
		~SparseSymmetricSolver();
		SparseSymmetricSolver(SparseSymmetricSolver &&) noexcept;
		SparseSymmetricSolver &operator=(SparseSymmetricSolver &&) noexcept;

		/// Throws SolveError if the matrix is not numerically positive definite.
		void factorize(const SparseMatrix &A);
		Eigen::VectorXd solve(const Eigen::VectorXd &b) const;

		/// "cholmod" or "simplicial-ldlt".
		static std::string backend();

	private:
		struct Impl;
		std::unique_ptr<Impl> impl_;
	};
} // namespace latfe2
