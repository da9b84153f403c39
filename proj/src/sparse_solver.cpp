#include "lattice_fe2/sparse_solver.hpp"

#ifdef LATFE2_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#else
#include <Eigen/SparseCholesky>
#endif

namespace latfe2
{
	struct SparseSymmetricSolver::Impl
	{
#ifdef LATFE2_HAVE_CHOLMOD
		Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> llt;
#else
		Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> llt;
#endif
		Eigen::Index rows = -1;
		Eigen::Index nnz = -1;
		bool analyzed = false;
	};

	SparseSymmetricSolver::SparseSymmetricSolver() : impl_(std::make_unique<Impl>()) {}
	SparseSymmetricSolver::~SparseSymmetricSolver() = default;
	SparseSymmetricSolver::SparseSymmetricSolver(SparseSymmetricSolver &&) noexcept = default;
	SparseSymmetricSolver &SparseSymmetricSolver::operator=(SparseSymmetricSolver &&) noexcept = default;

	void SparseSymmetricSolver::factorize(const SparseMatrix &A)
	{
		if (A.rows() != A.cols())
			throw SolveError("sparse solver: matrix is not square");
		if (A.rows() == 0)
			return;
		if (!impl_->analyzed || impl_->rows != A.rows() || impl_->nnz != A.nonZeros())
		{
			impl_->llt.analyzePattern(A);
			impl_->rows = A.rows();
			impl_->nnz = A.nonZeros();
			impl_->analyzed = true;
		}
		impl_->llt.factorize(A);
		if (impl_->llt.info() != Eigen::Success)
			throw SolveError("sparse solver: factorization failed (matrix not positive definite)");
#ifndef LATFE2_HAVE_CHOLMOD
		if ((impl_->llt.vectorD().array() <= 0.0).any())
			throw SolveError("sparse solver: factorization failed (matrix not positive definite)");
#endif
	}

	Eigen::VectorXd SparseSymmetricSolver::solve(const Eigen::VectorXd &b) const
	{
		if (b.size() == 0)
			return b;
		Eigen::VectorXd x = impl_->llt.solve(b);
		if (impl_->llt.info() != Eigen::Success || !x.allFinite())
			throw SolveError("sparse solver: back substitution failed");
		return x;
	}

	std::string SparseSymmetricSolver::backend()
	{
#ifdef LATFE2_HAVE_CHOLMOD
		return "cholmod";
#else
		return "simplicial-ldlt";
#endif
	}
} // namespace latfe2
