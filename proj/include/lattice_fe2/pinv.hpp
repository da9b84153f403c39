#pragma once

#include <Eigen/SVD>

#include <algorithm>

namespace latfe2
{
	/// Moore-Penrose pseudo-inverse through a full SVD.
	/// Singular values below max(rel_tol * sigma_max, abs_tol) are treated as exact zeros.
	template <typename Derived>
	Eigen::Matrix<typename Derived::Scalar, Derived::ColsAtCompileTime, Derived::RowsAtCompileTime>
	pinv(const Eigen::MatrixBase<Derived> &m, typename Derived::RealScalar rel_tol = 1e-10,
		 typename Derived::RealScalar abs_tol = 0)
	{
		using Scalar = typename Derived::Scalar;
		using Result = Eigen::Matrix<Scalar, Derived::ColsAtCompileTime, Derived::RowsAtCompileTime>;
		using Plain = typename Derived::PlainObject;

		if (m.size() == 0)
			return Result(m.cols(), m.rows());

		Eigen::JacobiSVD<Plain> svd(m.eval(), Eigen::ComputeFullU | Eigen::ComputeFullV);
		const auto &s = svd.singularValues();
		using std::max;
		const auto cutoff = max(rel_tol * (s.size() > 0 ? s(0) : 0), abs_tol);

		Result out = Result::Zero(m.cols(), m.rows());
		for (Eigen::Index k = 0; k < s.size(); ++k)
		{
			if (s(k) > cutoff && s(k) > 0)
				out.noalias() += svd.matrixV().col(k) * (svd.matrixU().col(k).transpose() / s(k));
		}
		return out;
	}
} // namespace latfe2
