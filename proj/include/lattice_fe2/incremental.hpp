#pragma once

#include "lattice_fe2/sparse_solver.hpp"
#include "lattice_fe2/types.hpp"

#include <Eigen/SparseCore>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace latfe2
{
	using Triplet = Eigen::Triplet<double, int>;

	/// Prescribed displacement of one component on a node set: value = scale * load factor.
	struct DirichletSet
	{
		std::string name;
		std::vector<int> nodes;
		int component = 0;
		double scale = 0.0;
	};

	/// Piecewise-linear load factor over pseudo-time.
	struct LoadSchedule
	{
		std::vector<std::pair<double, double>> points{{0.0, 0.0}, {1.0, 1.0}};  ///< (pseudo-time, factor)
		std::vector<int> increments;  ///< per segment; empty means default_increments everywhere
		int default_increments = 20;

		static LoadSchedule ramp(int increments = 20);
		void validate() const;
		double factor(double t) const;
		int segment_increments(std::size_t seg) const;
		/// Pseudo-times of all nominal increment ends, first point excluded.
		std::vector<double> increment_times() const;
	};

	struct NewtonOptions
	{
		double tol_rel = 1e-8;
		double abs_floor = 1e-10;  ///< N
		int max_iter = 25;
		int max_bisections = 8;
	};

	/// A nodal problem with two displacement components per node.
	class NonlinearProblem
	{
	public:
		virtual ~NonlinearProblem() = default;
		virtual int node_count() const = 0;
		/// Internal forces and tangent triplets at u, evaluated from the committed state.
		/// Trial state is kept until commit() or the next evaluate().
		virtual void evaluate(const Eigen::VectorXd &u, Eigen::VectorXd &r_int, std::vector<Triplet> &K) = 0;
		virtual void commit() = 0;
	};

	struct IncrementRecord
	{
		double time = 0.0;
		double factor = 0.0;
		int iterations = 0;  ///< assemblies
		int depth = 0;       ///< bisection level
		std::vector<double> residuals;
		std::string failure;
	};

	struct StepView
	{
		const IncrementRecord &record;
		const Eigen::VectorXd &u;
		const Eigen::VectorXd &r_int;
	};

	class IncrementFailure : public SolveError
	{
	public:
		IncrementFailure(double t, std::string what) : SolveError(std::move(what)), time(t) {}
		double time;
	};

	/// Displacement-controlled Newton with Dirichlet elimination and adaptive bisection.
	class IncrementalSolver
	{
	public:
		IncrementalSolver(NonlinearProblem &problem, std::vector<DirichletSet> dirichlet, NewtonOptions opts = {});

		/// Evaluates at u = 0 and commits (builds the initial tangent).
		void initialize();

		/// Full schedule; on_step runs after every converged increment (including bisected ones).
		void run(const LoadSchedule &schedule, const std::function<void(const StepView &)> &on_step = {});

		const Eigen::VectorXd &displacements() const { return u_; }
		const Eigen::VectorXd &internal_forces() const { return r_int_; }
		const std::vector<IncrementRecord> &log() const { return log_; }
		double time() const { return time_; }
		const std::vector<DirichletSet> &dirichlet() const { return dirichlet_; }

		/// Sum of internal forces over the constrained dofs of a set.
		double reaction(const std::string &set_name) const;

	private:
		bool try_step(double t1, const LoadSchedule &schedule, int depth, IncrementRecord &rec);
		void step_recursive(double t0, double t1, const LoadSchedule &schedule, int depth,
							const std::function<void(const StepView &)> &on_step);

		NonlinearProblem &problem_;
		std::vector<DirichletSet> dirichlet_;
		NewtonOptions opts_;
		std::vector<int> free_index_;  ///< -1 for constrained dofs
		std::vector<int> free_dofs_;
		std::vector<std::pair<int, double>> constrained_;  ///< (dof, scale)
		Eigen::VectorXd u_;
		Eigen::VectorXd r_int_;
		double time_ = 0.0;
		double ref_force_ = 0.0;  ///< running max of reaction and first residual norms
		std::vector<IncrementRecord> log_;
		std::vector<Triplet> last_tangent_;  ///< at the last converged state
		SparseSymmetricSolver solver_;
	};

	/// Sum of r over `nodes` in `component`.
	double reaction_sum(const Eigen::VectorXd &r_int, const std::vector<int> &nodes, int component);
} // namespace latfe2
