#include "lattice_fe2/dns.hpp"

#include "lattice_fe2/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <utility>

namespace latfe2
{
	namespace
	{
		/// Node positions on an integer grid of spacing L / 2.
		using Key = std::pair<long, long>;

		class PatchBuilder
		{
		public:
			PatchBuilder(double cell_size, double area) : h_(0.5 * cell_size), area_(area) {}

			void add_strut(Key a, Key b)
			{
				if (a == b)
					return;
				const int i = node(a), j = node(b);
				const auto edge = std::minmax(i, j);
				if (edges_.insert(edge).second)
					pending_.push_back(edge);
			}

			DnsLattice finish(CellKind kind, int nx, int ny, double cell_size)
			{
				DnsLattice out;
				out.kind = kind;
				out.cell_size = cell_size;
				out.nx = nx;
				out.ny = ny;
				// drop unused nodes and renumber in key order (rows, then x)
				std::vector<std::pair<Key, int>> order;
				for (const auto &[k, idx] : index_)
					order.emplace_back(Key{k.second, k.first}, idx);
				std::sort(order.begin(), order.end());
				std::vector<int> remap(keys_.size(), -1);
				out.nodes.resize(static_cast<Eigen::Index>(order.size()), 2);
				int next = 0;
				for (const auto &[k, idx] : order)
				{
					remap[static_cast<std::size_t>(idx)] = next;
					out.nodes.row(next) << h_ * static_cast<double>(k.second), h_ * static_cast<double>(k.first);
					++next;
				}
				std::vector<std::pair<int, int>> bars;
				for (const auto &[a, b] : pending_)
					bars.push_back(std::minmax(remap[static_cast<std::size_t>(a)], remap[static_cast<std::size_t>(b)]));
				std::sort(bars.begin(), bars.end());
				for (const auto &[i, j] : bars)
				{
					LatticeStrut s;
					s.i = i;
					s.j = j;
					const Eigen::Vector2d d = out.nodes.row(j) - out.nodes.row(i);
					s.length = d.norm();
					s.c = d.x() / s.length;
					s.s = d.y() / s.length;
					s.area = area_;
					out.struts.push_back(s);
				}

				const long xmax = 2L * nx, ymax = 2L * ny;
				for (const auto &[k, idx] : order)
				{
					const int n = remap[static_cast<std::size_t>(idx)];
					const long x = k.second, y = k.first;
					if (x == 0)
						out.node_sets["left"].push_back(n);
					if (x == xmax)
						out.node_sets["right"].push_back(n);
					if (y == 0)
						out.node_sets["bottom"].push_back(n);
					if (y == ymax)
						out.node_sets["top"].push_back(n);
				}
				for (auto &[name, v] : out.node_sets)
					std::sort(v.begin(), v.end());
				return out;
			}

		private:
			int node(Key k)
			{
				auto [it, inserted] = index_.try_emplace(k, static_cast<int>(keys_.size()));
				if (inserted)
					keys_.push_back(k);
				return it->second;
			}

			double h_;
			double area_;
			std::map<Key, int> index_;
			std::vector<Key> keys_;
			std::set<std::pair<int, int>> edges_;
			std::vector<std::pair<int, int>> pending_;
		};

		Eigen::Vector2d position(Key k, double h) { return {h * static_cast<double>(k.first), h * static_cast<double>(k.second)}; }

		void triangular(PatchBuilder &pb, int nx, int ny, double h, const DomainPredicate &inside)
		{
			// row y = j in half units 2j; even rows on integer x, odd rows on half-integer x
			const auto row = [&](int j) {
				std::vector<long> xs;
				for (long i = 0; i <= nx - (j % 2); ++i)
					xs.push_back(2 * i + (j % 2));
				return xs;
			};
			for (int j = 0; j < ny; ++j)
			{
				const std::vector<long> lo = row(j), hi = row(j + 1);
				const long ylo = 2L * j, yhi = 2L * (j + 1);
				std::size_t a = 0, b = 0;
				while (a + 1 < lo.size() || b + 1 < hi.size())
				{
					Key p, q, r;
					// advance the row whose new diagonal is shorter
					const bool advance_lo = b + 1 >= hi.size() ||
											(a + 1 < lo.size() && std::abs(lo[a + 1] - hi[b]) <= std::abs(hi[b + 1] - lo[a]));
					if (advance_lo)
					{
						p = {lo[a], ylo};
						q = {lo[a + 1], ylo};
						r = {hi[b], yhi};
						++a;
					}
					else
					{
						p = {lo[a], ylo};
						q = {hi[b + 1], yhi};
						r = {hi[b], yhi};
						++b;
					}
					const Eigen::Vector2d centroid = (position(p, h) + position(q, h) + position(r, h)) / 3.0;
					if (inside && !inside(centroid))
						continue;
					pb.add_strut(p, q);
					pb.add_strut(q, r);
					pb.add_strut(r, p);
				}
			}
			// straight side edges: join the integer-x nodes two rows apart
			for (int j = 0; j + 2 <= ny; j += 2)
				for (const long x : {0L, 2L * nx})
				{
					const Key p{x, 2L * j}, q{x, 2L * j + 4};
					const Key r{x == 0 ? 1 : x - 1, 2L * j + 2};
					const Eigen::Vector2d centroid = (position(p, h) + position(q, h) + position(r, h)) / 3.0;
					if (!inside || inside(centroid))
						pb.add_strut(p, q);
				}
		}

		void braced(PatchBuilder &pb, int nx, int ny, double h, bool plus, const DomainPredicate &inside)
		{
			for (long j = 0; j < ny; ++j)
				for (long i = 0; i < nx; ++i)
				{
					const long x0 = 2 * i, y0 = 2 * j;
					const Key center{x0 + 1, y0 + 1};
					if (inside && !inside(position(center, h)))
						continue;
					const Key c00{x0, y0}, c10{x0 + 2, y0}, c11{x0 + 2, y0 + 2}, c01{x0, y0 + 2};
					for (const Key &c : {c00, c10, c11, c01})
						pb.add_strut(center, c);
					if (!plus)
					{
						pb.add_strut(c00, c10);
						pb.add_strut(c10, c11);
						pb.add_strut(c01, c11);
						pb.add_strut(c00, c01);
						continue;
					}
					const Key mb{x0 + 1, y0}, mr{x0 + 2, y0 + 1}, mt{x0 + 1, y0 + 2}, ml{x0, y0 + 1};
					for (const Key &m : {mb, mr, mt, ml})
						pb.add_strut(center, m);
					pb.add_strut(c00, mb);
					pb.add_strut(mb, c10);
					pb.add_strut(c10, mr);
					pb.add_strut(mr, c11);
					pb.add_strut(c01, mt);
					pb.add_strut(mt, c11);
					pb.add_strut(c00, ml);
					pb.add_strut(ml, c01);
				}
		}
	} // namespace

	int DnsLattice::nearest_node(const Eigen::Vector2d &p) const
	{
		int best = -1;
		double best_d = std::numeric_limits<double>::infinity();
		for (Eigen::Index n = 0; n < nodes.rows(); ++n)
		{
			const double d = (nodes.row(n).transpose() - p).squaredNorm();
			if (d < best_d)
			{
				best_d = d;
				best = static_cast<int>(n);
			}
		}
		return best;
	}

	DnsLattice generate_lattice(CellKind kind, int nx, int ny, double cell_size, double area, const DomainPredicate &inside)
	{
		if (nx < 1 || ny < 1)
			throw InputError("lattice: Nx and Ny must be at least 1");
		if (!(cell_size > 0) || !(area > 0))
			throw InputError("lattice: cell size and strut area must be positive");
		const double h = 0.5 * cell_size;
		PatchBuilder pb(cell_size, area);
		switch (kind)
		{
		case CellKind::Triangular:
			triangular(pb, nx, ny, h, inside);
			break;
		case CellKind::XBraced:
			braced(pb, nx, ny, h, false, inside);
			break;
		case CellKind::XPBraced:
			braced(pb, nx, ny, h, true, inside);
			break;
		}
		DnsLattice out = pb.finish(kind, nx, ny, cell_size);
		if (out.struts.empty())
			throw InputError("lattice: the domain predicate removed every strut");
		return out;
	}

	DnsModel::DnsModel(DnsLattice lattice, MaterialParams mat) : lattice_(std::move(lattice)), mat_(mat)
	{
		mat_.validate();
		committed_.assign(lattice_.struts.size(), PlasticState<double>{});
		trial_ = committed_;
		stress_.assign(lattice_.struts.size(), 0.0);
		tangent_.assign(lattice_.struts.size(), mat_.E);
	}

	void DnsModel::evaluate(const Eigen::VectorXd &u, Eigen::VectorXd &r_int, std::vector<Triplet> &K)
	{
		const auto &bars = lattice_.struts;
		parallel_for(bars.size(), workers, [&](std::size_t e) {
			const LatticeStrut &s = bars[e];
			const double du = s.c * (u(2 * s.j) - u(2 * s.i)) + s.s * (u(2 * s.j + 1) - u(2 * s.i + 1));
			const StrutResponse<double> r = return_map(du / s.length, committed_[e], mat_, return_map_options);
			stress_[e] = r.sigma;
			tangent_[e] = r.D;
			trial_[e] = r.state_new;
		});

		r_int.setZero(2 * lattice_.node_count());
		K.reserve(K.size() + 16 * bars.size());
		for (std::size_t e = 0; e < bars.size(); ++e)
		{
			const LatticeStrut &s = bars[e];
			const std::array<int, 4> dofs{2 * s.i, 2 * s.i + 1, 2 * s.j, 2 * s.j + 1};
			const std::array<double, 4> g{-s.c, -s.s, s.c, s.s};
			const double axial = stress_[e] * s.area;
			const double k = s.area * tangent_[e] / s.length;
			for (int a = 0; a < 4; ++a)
			{
				r_int(dofs[static_cast<std::size_t>(a)]) += g[static_cast<std::size_t>(a)] * axial;
				for (int b = 0; b < 4; ++b)
					K.emplace_back(dofs[static_cast<std::size_t>(a)], dofs[static_cast<std::size_t>(b)],
								   k * g[static_cast<std::size_t>(a)] * g[static_cast<std::size_t>(b)]);
			}
		}
	}

	void DnsModel::commit() { committed_ = trial_; }

	DnsRun dns_solve(DnsModel &model, const std::vector<DirichletSet> &dirichlet, const LoadSchedule &schedule,
					 const NewtonOptions &opts, bool keep_displacements)
	{
		DnsRun run;
		IncrementalSolver solver(model, dirichlet, opts);
		solver.initialize();
		const auto record = [&](const Eigen::VectorXd &u, const Eigen::VectorXd &r, double t, double f) {
			HistoryPoint p;
			p.time = t;
			p.factor = f;
			for (const auto &d : dirichlet)
				p.reactions[d.name] = reaction_sum(r, d.nodes, d.component);
			if (keep_displacements)
				p.u = u;
			run.history.push_back(std::move(p));
		};
		record(solver.displacements(), solver.internal_forces(), schedule.points.front().first, schedule.points.front().second);
		solver.run(schedule, [&](const StepView &v) { record(v.u, v.r_int, v.record.time, v.record.factor); });
		run.log = solver.log();
		return run;
	}

	std::vector<bool> yield_map(const std::vector<PlasticState<double>> &states)
	{
		std::vector<bool> out(states.size());
		for (std::size_t e = 0; e < states.size(); ++e)
			out[e] = states[e].alpha > 0.0;
		return out;
	}
} // namespace latfe2
