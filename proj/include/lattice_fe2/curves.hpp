#pragma once

#include "lattice_fe2/scenarios.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace latfe2
{
	void write_curve_csv(std::ostream &os, const Curve &curve);
	void write_curve_csv(const std::string &path, const Curve &curve);
	/// Throws InputError on malformed files.
	Curve read_curve_csv(std::istream &is);
	Curve read_curve_csv(const std::string &path);

	enum class Normalization
	{
		Pointwise,  ///< |a - b| / max(|b|, floor * peak|b|)
		Peak        ///< |a - b| / peak|b|
	};

	struct CompareOptions
	{
		Normalization normalization = Normalization::Pointwise;
		double floor = 1e-3;
		double yield_drop = 0.95;  ///< stiffness ratio marking the end of the elastic range
	};

	struct RangeStats
	{
		std::size_t samples = 0;
		double max_rel = 0.0;
		double rms_rel = 0.0;
	};

	struct CompareReport
	{
		std::string abscissa;  ///< "applied_displacement_mm" or "pseudo_time"
		double yield_abscissa = 0.0;
		RangeStats all, elastic, plastic;
	};

	/// Resamples both curves on the union of their breakpoints over the common range;
	/// b is the reference. Applied displacement is the abscissa when both curves are monotone in it.
	CompareReport compare_curves(const Curve &a, const Curve &b, const CompareOptions &opts = {});

	/// Last row of the proportional branch starting at `begin`: the segment after it is the first
	/// whose stiffness falls below drop * the first segment's. Returns `end` when none does.
	std::size_t proportional_limit(const Curve &c, std::size_t begin, std::size_t end, double drop = 0.95);

	std::string to_json(const CompareReport &r);
} // namespace latfe2
