#include "lattice_fe2/curves.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace latfe2
{
	namespace
	{
		std::string fmt(double v)
		{
			char buf[32];
			std::snprintf(buf, sizeof buf, "%.17g", v);
			return buf;
		}

		std::vector<std::string> split(const std::string &line)
		{
			std::vector<std::string> out;
			std::stringstream ss(line);
			std::string cell;
			while (std::getline(ss, cell, ','))
			{
				while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
					cell.pop_back();
				out.push_back(cell);
			}
			return out;
		}

		double parse_number(const std::string &s, std::size_t line)
		{
			std::size_t pos = 0;
			double v = 0.0;
			try
			{
				v = std::stod(s, &pos);
			}
			catch (const std::exception &)
			{
				pos = 0;
			}
			if (pos == 0 || pos != s.size())
				throw InputError("curve csv: bad number '" + s + "' on line " + std::to_string(line));
			return v;
		}

		bool monotone(const Curve &c, const std::function<double(const CurveRecord &)> &x)
		{
			if (c.size() < 2)
				return false;
			const double sign = x(c.back()) > x(c.front()) ? 1.0 : -1.0;
			for (std::size_t i = 1; i < c.size(); ++i)
				if (!(sign * (x(c[i]) - x(c[i - 1])) > 0))
					return false;
			return true;
		}

		double interpolate(const Curve &c, const std::function<double(const CurveRecord &)> &x, double at)
		{
			const bool rising = x(c.back()) >= x(c.front());
			for (std::size_t i = 1; i < c.size(); ++i)
			{
				const double x0 = x(c[i - 1]), x1 = x(c[i]);
				const bool inside = rising ? (at >= x0 && at <= x1) : (at <= x0 && at >= x1);
				if (inside)
				{
					if (x1 == x0)
						return c[i].reaction;
					const double w = (at - x0) / (x1 - x0);
					return (1 - w) * c[i - 1].reaction + w * c[i].reaction;
				}
			}
			return std::abs(at - x(c.front())) < std::abs(at - x(c.back())) ? c.front().reaction : c.back().reaction;
		}

		void accumulate(RangeStats &s, double rel)
		{
			++s.samples;
			s.max_rel = std::max(s.max_rel, rel);
			s.rms_rel += rel * rel;
		}

		void finish(RangeStats &s)
		{
			if (s.samples > 0)
				s.rms_rel = std::sqrt(s.rms_rel / static_cast<double>(s.samples));
		}
	} // namespace

	void write_curve_csv(std::ostream &os, const Curve &curve)
	{
		const bool trans = std::any_of(curve.begin(), curve.end(), [](const CurveRecord &r) { return r.transverse.has_value(); });
		const bool nu = std::any_of(curve.begin(), curve.end(), [](const CurveRecord &r) { return r.poisson.has_value(); });
		os << "pseudo_time,applied_displacement_mm,reaction_N";
		if (trans)
			os << ",transverse_displacement_mm";
		if (nu)
			os << ",poisson_ratio";
		os << '\n';
		for (const auto &r : curve)
		{
			os << fmt(r.pseudo_time) << ',' << fmt(r.applied_displacement) << ',' << fmt(r.reaction);
			if (trans)
				os << ',' << (r.transverse ? fmt(*r.transverse) : "");
			if (nu)
				os << ',' << (r.poisson ? fmt(*r.poisson) : "");
			os << '\n';
		}
	}

	void write_curve_csv(const std::string &path, const Curve &curve)
	{
		std::ofstream os(path, std::ios::binary);
		if (!os)
			throw InputError("cannot write '" + path + "'");
		write_curve_csv(os, curve);
	}

	Curve read_curve_csv(std::istream &is)
	{
		std::string line;
		if (!std::getline(is, line))
			throw InputError("curve csv: empty file");
		const auto header = split(line);
		const auto col = [&](const std::string &name) -> int {
			const auto it = std::find(header.begin(), header.end(), name);
			return it == header.end() ? -1 : static_cast<int>(it - header.begin());
		};
		const int ct = col("pseudo_time"), cu = col("applied_displacement_mm"), cr = col("reaction_N");
		const int ctr = col("transverse_displacement_mm"), cnu = col("poisson_ratio");
		if (ct < 0 || cu < 0 || cr < 0)
			throw InputError("curve csv: header must contain pseudo_time, applied_displacement_mm and reaction_N");

		Curve out;
		std::size_t lineno = 1;
		while (std::getline(is, line))
		{
			++lineno;
			if (line.empty() || line == "\r")
				continue;
			const auto cells = split(line);
			if (cells.size() + 1 < header.size() || cells.size() > header.size())
				throw InputError("curve csv: wrong column count on line " + std::to_string(lineno));
			const auto cell = [&](int c) { return static_cast<std::size_t>(c) < cells.size() ? cells[static_cast<std::size_t>(c)] : std::string(); };
			CurveRecord r;
			r.pseudo_time = parse_number(cell(ct), lineno);
			r.applied_displacement = parse_number(cell(cu), lineno);
			r.reaction = parse_number(cell(cr), lineno);
			if (ctr >= 0 && !cell(ctr).empty())
				r.transverse = parse_number(cell(ctr), lineno);
			if (cnu >= 0 && !cell(cnu).empty())
				r.poisson = parse_number(cell(cnu), lineno);
			if (!out.empty() && !(r.pseudo_time > out.back().pseudo_time))
				throw InputError("curve csv: pseudo_time not increasing on line " + std::to_string(lineno));
			out.push_back(r);
		}
		return out;
	}

	Curve read_curve_csv(const std::string &path)
	{
		std::ifstream is(path, std::ios::binary);
		if (!is)
			throw InputError("cannot read '" + path + "'");
		return read_curve_csv(is);
	}

	std::size_t proportional_limit(const Curve &c, std::size_t begin, std::size_t end, double drop)
	{
		end = std::min(end, c.size());
		if (begin + 1 >= end)
			return end;
		const auto slope = [&](std::size_t i) {
			const double du = c[i].applied_displacement - c[i - 1].applied_displacement;
			return du == 0.0 ? 0.0 : (c[i].reaction - c[i - 1].reaction) / du;
		};
		const double k0 = slope(begin + 1);
		for (std::size_t i = begin + 2; i < end; ++i)
			if (slope(i) < drop * k0)
				return i - 1;
		return end;
	}

	CompareReport compare_curves(const Curve &a, const Curve &b, const CompareOptions &opts)
	{
		if (a.size() < 2 || b.size() < 2)
			throw InputError("compare: both curves need at least two rows");

		const std::function<double(const CurveRecord &)> by_u = [](const CurveRecord &r) { return r.applied_displacement; };
		const std::function<double(const CurveRecord &)> by_t = [](const CurveRecord &r) { return r.pseudo_time; };
		const bool use_u = monotone(a, by_u) && monotone(b, by_u);
		const auto &x = use_u ? by_u : by_t;

		CompareReport rep;
		rep.abscissa = use_u ? "applied_displacement_mm" : "pseudo_time";
		const auto range = [&](const Curve &c) {
			const double p = x(c.front()), q = x(c.back());
			return std::pair{std::min(p, q), std::max(p, q)};
		};
		const auto [alo, ahi] = range(a);
		const auto [blo, bhi] = range(b);
		const double lo = std::max(alo, blo), hi = std::min(ahi, bhi);
		if (!(hi > lo))
			throw InputError("compare: curves do not overlap");

		std::vector<double> xs;
		for (const Curve *c : {&a, &b})
			for (const auto &r : *c)
				if (x(r) >= lo && x(r) <= hi)
					xs.push_back(x(r));
		std::sort(xs.begin(), xs.end());
		xs.erase(std::unique(xs.begin(), xs.end(), [&](double p, double q) { return std::abs(p - q) <= 1e-12 * (hi - lo); }),
				 xs.end());

		double peak = 0.0;
		for (const auto &r : b)
			peak = std::max(peak, std::abs(r.reaction));
		if (peak == 0.0)
			peak = 1.0;

		// end of the elastic range of the reference, in abscissa units
		const std::size_t py = proportional_limit(b, 0, b.size(), opts.yield_drop);
		rep.yield_abscissa = py < b.size() ? x(b[py]) : x(b.back());
		const bool rising = x(b.back()) >= x(b.front());

		for (double v : xs)
		{
			const double ra = interpolate(a, x, v), rb = interpolate(b, x, v);
			const double denom = opts.normalization == Normalization::Peak ? peak : std::max(std::abs(rb), opts.floor * peak);
			const double rel = std::abs(ra - rb) / denom;
			accumulate(rep.all, rel);
			const bool elastic = rising ? v <= rep.yield_abscissa : v >= rep.yield_abscissa;
			accumulate(elastic ? rep.elastic : rep.plastic, rel);
		}
		finish(rep.all);
		finish(rep.elastic);
		finish(rep.plastic);
		return rep;
	}

	std::string to_json(const CompareReport &r)
	{
		const auto stats = [](const RangeStats &s) {
			return nlohmann::ordered_json{{"samples", s.samples}, {"max_relative", s.max_rel}, {"rms_relative", s.rms_rel}};
		};
		nlohmann::ordered_json j{{"abscissa", r.abscissa},
								 {"yield_at", r.yield_abscissa},
								 {"all", stats(r.all)},
								 {"elastic", stats(r.elastic)},
								 {"post_yield", stats(r.plastic)}};
		return j.dump(2);
	}
} // namespace latfe2
