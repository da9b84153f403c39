#include "doctest.h"

#include "lattice_fe2/material.hpp"

#include <cmath>
#include <random>

using namespace latfe2;

namespace
{
	const MaterialParams alsi = MaterialParams::alsi10mg();

	// Plain bisection on the consistency residual, no Newton.
	double bisect_delta_lambda(double eps, const PlasticState<double> &st, const MaterialParams &m)
	{
		const double xi = m.E * (eps - st.eps_pl) - st.q;
		const auto sy = [&](double a) { return m.sigma_y0 + m.Q_inf * (1.0 - std::exp(-m.b * a)); };
		if (std::abs(xi) - sy(st.alpha) <= 0.0)
			return 0.0;
		double lo = 0.0, hi = std::abs(xi) / (m.E + m.H);
		for (int i = 0; i < 200; ++i)
		{
			const double mid = 0.5 * (lo + hi);
			if (std::abs(xi) - (m.E + m.H) * mid - sy(st.alpha + mid) > 0.0)
				lo = mid;
			else
				hi = mid;
		}
		return 0.5 * (lo + hi);
	}
} // namespace

TEST_CASE("yield function")
{
	const PlasticState<double> virgin;
	CHECK(yield_function(0.0, virgin, alsi) == doctest::Approx(-190.0));
	CHECK(yield_function(190.0, virgin, alsi) == doctest::Approx(0.0));
	// tests/oracles/frozen_values.py
	CHECK(yield_function(250.0, PlasticState<double>{0.0, 0.01, 10.0}, alsi) == doctest::Approx(38.634432051923085).epsilon(1e-14));
}

TEST_CASE("return map elastic branch")
{
	const PlasticState<double> virgin;
	auto r = return_map(0.002, virgin, alsi);
	CHECK(r.sigma == doctest::Approx(140.0));
	CHECK(r.D == 70000.0);
	CHECK_FALSE(r.yielded);
	CHECK(r.state_new == virgin);

	r = return_map(0.0, virgin, alsi);
	CHECK(r.sigma == 0.0);
	CHECK(r.D == alsi.E);
}

TEST_CASE("return map on the yield surface stays elastic")
{
	const auto r = return_map(190.0 / 70000.0, PlasticState<double>{}, alsi);
	CHECK_FALSE(r.yielded);
	CHECK(r.D == alsi.E);
}

TEST_CASE("return map plastic step matches bisection")
{
	const auto r = return_map(0.004, PlasticState<double>{}, alsi);
	CHECK(r.yielded);
	// tests/oracles/frozen_values.py
	CHECK(r.sigma == doctest::Approx(207.7577409232).epsilon(1e-11));
	CHECK(std::abs(r.delta_lambda - 0.0010320322725257142) < 1e-12);
	CHECK(std::abs(r.delta_lambda - bisect_delta_lambda(0.004, {}, alsi)) < 1e-12);
	CHECK(r.D > 0.0);
	CHECK(r.D < alsi.E);
}

TEST_CASE("return map is odd in strain from the virgin state")
{
	for (double eps : {0.001, 0.003, 0.01, 0.05})
	{
		const auto p = return_map(eps, PlasticState<double>{}, alsi);
		const auto m = return_map(-eps, PlasticState<double>{}, alsi);
		CHECK(m.sigma == doctest::Approx(-p.sigma).epsilon(1e-14));
		CHECK(m.D == doctest::Approx(p.D).epsilon(1e-14));
		CHECK(m.state_new.eps_pl == doctest::Approx(-p.state_new.eps_pl).epsilon(1e-14));
		CHECK(m.state_new.q == doctest::Approx(-p.state_new.q).epsilon(1e-14));
		CHECK(m.state_new.alpha == doctest::Approx(p.state_new.alpha).epsilon(1e-14));
	}
}

TEST_CASE("perfect plasticity caps stress with zero tangent")
{
	MaterialParams m = alsi;
	m.H = 0.0;
	m.Q_inf = 0.0;
	const auto r = return_map(0.01, PlasticState<double>{}, m);
	CHECK(r.yielded);
	CHECK(r.sigma == doctest::Approx(190.0).epsilon(1e-13));
	CHECK(r.D == 0.0);
	const auto c = return_map(-0.01, PlasticState<double>{}, m);
	CHECK(c.sigma == doctest::Approx(-190.0).epsilon(1e-13));
}

TEST_CASE("random states: consistency, Kuhn-Tucker and tangent")
{
	std::mt19937_64 rng(1234);
	std::uniform_real_distribution<double> u01(0.0, 1.0);
	int checked_tangents = 0;
	for (int k = 0; k < 2000; ++k)
	{
		PlasticState<double> st;
		st.alpha = 0.05 * u01(rng);
		st.q = (2.0 * u01(rng) - 1.0) * alsi.H * st.alpha;
		st.eps_pl = (2.0 * u01(rng) - 1.0) * st.alpha;
		const double eps = st.eps_pl + (2.0 * u01(rng) - 1.0) * 0.02;

		const auto r = return_map(eps, st, alsi);
		const double phi = yield_function(r.sigma, r.state_new, alsi);
		CHECK(phi <= 1e-9 * alsi.sigma_y0);
		CHECK(r.delta_lambda >= 0.0);
		CHECK(std::abs(r.delta_lambda * phi) <= 1e-9 * alsi.sigma_y0);
		CHECK(r.state_new.alpha >= st.alpha);
		if (r.yielded)
		{
			CHECK(r.D > 0.0);
			CHECK(r.D < alsi.E);
		}
		else
		{
			CHECK(r.D == alsi.E);
			CHECK(r.state_new == st);
		}

		// skip strains within 1e-6 of the elastic/plastic switch
		const double xi = alsi.E * (eps - st.eps_pl) - st.q;
		const double phi_trial_strain = (std::abs(xi) - flow_stress(st.alpha, alsi)) / alsi.E;
		if (std::abs(phi_trial_strain) < 1e-6)
			continue;
		const double h = 1e-7;
		const double fd = (return_map(eps + h, st, alsi).sigma - return_map(eps - h, st, alsi).sigma) / (2 * h);
		CHECK(std::abs(fd - r.D) <= 1e-5 * std::abs(r.D));
		++checked_tangents;
	}
	CHECK(checked_tangents > 1900);
}

TEST_CASE("monotone strain path hardens monotonically")
{
	PlasticState<double> st;
	double last_sigma = -1e300, last_alpha = 0.0;
	for (int k = 0; k <= 400; ++k)
	{
		const double eps = 1e-4 * k;
		const auto r = return_map(eps, st, alsi);
		CHECK(r.sigma >= last_sigma);
		CHECK(r.state_new.alpha >= last_alpha);
		last_sigma = r.sigma;
		last_alpha = r.state_new.alpha;
		st = r.state_new;
	}
}

TEST_CASE("reverse yielding after forward plastic flow shows Bauschinger effect")
{
	PlasticState<double> st = return_map(0.01, PlasticState<double>{}, alsi).state_new;
	const double forward = flow_stress(st.alpha, alsi) + st.q;
	const double reverse = st.q - flow_stress(st.alpha, alsi);
	CHECK(std::abs(reverse) < forward);
	CHECK(std::abs(reverse) < alsi.sigma_y0);
}

TEST_CASE("long double instantiation agrees with double")
{
	const auto rd = return_map(0.004, PlasticState<double>{}, alsi);
	const auto rl = return_map(0.004L, PlasticState<long double>{}, alsi);
	CHECK(double(rl.sigma) == doctest::Approx(rd.sigma).epsilon(1e-12));
}

TEST_CASE("invalid parameters are rejected")
{
	MaterialParams m;
	m.E = -1.0;
	CHECK_THROWS_AS(m.validate(), InputError);
	CHECK_NOTHROW(MaterialParams::alsi10mg().validate());
}
