#include "lattice_fe2/incremental.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace latfe2
{
	LoadSchedule LoadSchedule::ramp(int increments)
	{
		LoadSchedule s;
		s.default_increments = increments;
		return s;
	}

	void LoadSchedule::validate() const
	{
		if (points.size() < 2)
			throw InputError("schedule: at least two breakpoints are required");
		for (std::size_t i = 1; i < points.size(); ++i)
			if (!(points[i].first > points[i - 1].first))
				throw InputError("schedule: pseudo-time must be strictly increasing");
		for (const auto &p : points)
			if (!std::isfinite(p.first) || !std::isfinite(p.second))
				throw InputError("schedule: non-finite breakpoint");
		if (!increments.empty() && increments.size() != points.size() - 1)
			throw InputError("schedule: one increment count per segment is required");
		for (int n : increments)
			if (n < 1)
				throw InputError("schedule: increment counts must be positive");
		if (default_increments < 1)
			throw InputError("schedule: increment counts must be positive");
	}

	double LoadSchedule::factor(double t) const
	{
		if (t <= points.front().first)
			return points.front().second;
		if (t >= points.back().first)
			return points.back().second;
		const auto it = std::upper_bound(points.begin(), points.end(), t,
										 [](double v, const std::pair<double, double> &p) { return v < p.first; });
		const auto &[t1, f1] = *it;
		const auto &[t0, f0] = *(it - 1);
		return f0 + (f1 - f0) * (t - t0) / (t1 - t0);
	}

	int LoadSchedule::segment_increments(std::size_t seg) const
	{
		return increments.empty() ? default_increments : increments.at(seg);
	}

	std::vector<double> LoadSchedule::increment_times() const
	{
		std::vector<double> out;
		for (std::size_t s = 0; s + 1 < points.size(); ++s)
		{
			const int n = segment_increments(s);
			const double t0 = points[s].first, t1 = points[s + 1].first;
			for (int k = 1; k < n; ++k)
				out.push_back(t0 + (t1 - t0) * k / n);
			out.push_back(t1);
		}
		return out;
	}

	double reaction_sum(const Eigen::VectorXd &r_int, const std::vector<int> &nodes, int component)
	{
		double s = 0.0;
		for (int n : nodes)
			s += r_int(2 * n + component);
		return s;
	}

	IncrementalSolver::IncrementalSolver(NonlinearProblem &problem, std::vector<DirichletSet> dirichlet, NewtonOptions opts)
		: problem_(problem), dirichlet_(std::move(dirichlet)), opts_(opts)
	{
		const int ndof = 2 * problem_.node_count();
		free_index_.assign(static_cast<std::size_t>(ndof), 0);
		std::vector<double> scale(static_cast<std::size_t>(ndof), 0.0);
		for (const auto &d : dirichlet_)
		{
			if (d.component < 0 || d.component > 1)
				throw InputError("dirichlet set '" + d.name + "': component must be 0 or 1");
			for (int n : d.nodes)
			{
				if (n < 0 || n >= problem_.node_count())
					throw InputError("dirichlet set '" + d.name + "': node index out of range");
				const int dof = 2 * n + d.component;
				if (free_index_[static_cast<std::size_t>(dof)] == -1)
					throw InputError("dirichlet set '" + d.name + "': dof constrained twice");
				free_index_[static_cast<std::size_t>(dof)] = -1;
				scale[static_cast<std::size_t>(dof)] = d.scale;
			}
		}
		int next = 0;
		for (int dof = 0; dof < ndof; ++dof)
		{
			if (free_index_[static_cast<std::size_t>(dof)] == -1)
				constrained_.emplace_back(dof, scale[static_cast<std::size_t>(dof)]);
			else
			{
				free_index_[static_cast<std::size_t>(dof)] = next++;
				free_dofs_.push_back(dof);
			}
		}
		u_ = Eigen::VectorXd::Zero(ndof);
		r_int_ = Eigen::VectorXd::Zero(ndof);
	}

	void IncrementalSolver::initialize()
	{
		last_tangent_.clear();
		problem_.evaluate(u_, r_int_, last_tangent_);
		problem_.commit();
	}

	double IncrementalSolver::reaction(const std::string &set_name) const
	{
		for (const auto &d : dirichlet_)
			if (d.name == set_name)
				return reaction_sum(r_int_, d.nodes, d.component);
		throw InputError("unknown boundary set '" + set_name + "'");
	}

	bool IncrementalSolver::try_step(double t1, const LoadSchedule &schedule, int depth, IncrementRecord &rec)
	{
		rec = IncrementRecord{};
		rec.time = t1;
		rec.factor = schedule.factor(t1);
		rec.depth = depth;

		Eigen::VectorXd u = u_;
		Eigen::VectorXd jump = Eigen::VectorXd::Zero(u.size());
		for (const auto &[dof, scale] : constrained_)
		{
			jump(dof) = scale * rec.factor - u_(dof);
			u(dof) = scale * rec.factor;
		}

		const auto nfree = static_cast<Eigen::Index>(free_dofs_.size());
		const auto free_matrix = [&](const std::vector<Triplet> &trip) {
			SparseMatrix K(nfree, nfree);
			std::vector<Triplet> kff;
			kff.reserve(trip.size());
			for (const auto &tr : trip)
			{
				const int i = free_index_[static_cast<std::size_t>(tr.row())];
				const int j = free_index_[static_cast<std::size_t>(tr.col())];
				if (i >= 0 && j >= 0 && i >= j)
					kff.emplace_back(i, j, tr.value());
			}
			K.setFromTriplets(kff.begin(), kff.end());
			return K;
		};

		// carry the prescribed jump into the free dofs with the last converged tangent
		if (nfree > 0 && !last_tangent_.empty() && jump.squaredNorm() > 0.0)
		{
			Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfree);
			for (const auto &tr : last_tangent_)
			{
				const int i = free_index_[static_cast<std::size_t>(tr.row())];
				if (i >= 0 && free_index_[static_cast<std::size_t>(tr.col())] < 0)
					rhs(i) -= tr.value() * jump(tr.col());
			}
			try
			{
				solver_.factorize(free_matrix(last_tangent_));
				const Eigen::VectorXd du = solver_.solve(rhs);
				for (Eigen::Index k = 0; k < nfree; ++k)
					u(free_dofs_[static_cast<std::size_t>(k)]) += du(k);
			}
			catch (const SolveError &)
			{
			}
		}

		Eigen::VectorXd r(u.size());
		std::vector<Triplet> trip;
		double ref = ref_force_;
		try
		{
			for (int it = 0; it < opts_.max_iter; ++it)
			{
				trip.clear();
				r.setZero();
				problem_.evaluate(u, r, trip);
				++rec.iterations;

				Eigen::VectorXd rf(nfree);
				for (Eigen::Index k = 0; k < nfree; ++k)
					rf(k) = r(free_dofs_[static_cast<std::size_t>(k)]);
				double rc2 = 0.0;
				for (const auto &c : constrained_)
					rc2 += r(c.first) * r(c.first);
				const double norm = rf.norm();
				rec.residuals.push_back(norm);
				if (!std::isfinite(norm))
					return false;
				ref = std::max(ref, std::sqrt(rc2));
				if (it == 0)
					ref = std::max(ref, norm);
				if (norm <= std::max(opts_.tol_rel * ref, opts_.abs_floor))
				{
					u_ = std::move(u);
					r_int_ = std::move(r);
					ref_force_ = ref;
					last_tangent_ = std::move(trip);
					return true;
				}
				if (it + 1 == opts_.max_iter || nfree == 0)
					return false;

				solver_.factorize(free_matrix(trip));
				const Eigen::VectorXd du = solver_.solve(rf);
				for (Eigen::Index k = 0; k < nfree; ++k)
					u(free_dofs_[static_cast<std::size_t>(k)]) -= du(k);
			}
		}
		catch (const SolveError &e)
		{
			rec.failure = e.what();
			return false;
		}
		return false;
	}

	void IncrementalSolver::step_recursive(double t0, double t1, const LoadSchedule &schedule, int depth,
										   const std::function<void(const StepView &)> &on_step)
	{
		IncrementRecord rec;
		if (try_step(t1, schedule, depth, rec))
		{
			problem_.commit();
			time_ = t1;
			log_.push_back(rec);
			if (on_step)
				on_step(StepView{log_.back(), u_, r_int_});
			return;
		}
		if (depth >= opts_.max_bisections)
		{
			std::ostringstream msg;
			msg << "increment to pseudo-time " << t1 << " failed after " << depth << " bisections (residuals:";
			for (double v : rec.residuals)
				msg << ' ' << v;
			msg << ')';
			if (!rec.failure.empty())
				msg << ": " << rec.failure;
			throw IncrementFailure(t1, msg.str());
		}
		const double tm = 0.5 * (t0 + t1);
		step_recursive(t0, tm, schedule, depth + 1, on_step);
		step_recursive(tm, t1, schedule, depth + 1, on_step);
	}

	void IncrementalSolver::run(const LoadSchedule &schedule, const std::function<void(const StepView &)> &on_step)
	{
		schedule.validate();
		time_ = schedule.points.front().first;
		for (double t : schedule.increment_times())
			step_recursive(time_, t, schedule, 0, on_step);
	}
} // namespace latfe2
