// SPDX-License-Identifier: Apache-2.0
//
// ems-forge: synthesis and analysis of one-time-programmable electromagnetic skins
// Copyright (C) 2026 The ems-forge authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "catch_amalgamated.hpp"

#include "emsforge/core.hpp"
#include "emsforge/util.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace emsforge;
using Catch::Approx;

TEST_CASE("wrap_phase maps into (-pi, pi]")
{
    const double pi = constants::pi;
    CHECK(wrap_phase(1.5 * pi) == Approx(-0.5 * pi));
    CHECK(wrap_phase(0.0) == 0.0);
    CHECK(wrap_phase(-pi) == pi);
    CHECK(wrap_phase(pi) == pi);
    CHECK(wrap_phase(-3.0 * pi) == pi);
    CHECK(wrap_phase(7.0 * pi / 2.0) == Approx(-pi / 2.0));

    CHECK_THROWS_AS(wrap_phase(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    CHECK_THROWS_AS(wrap_phase(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("wrap_phase is idempotent and preserves the residue")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1e3, 1e3);
    for (int i = 0; i < 10000; ++i)
    {
        const double x = dist(rng);
        const double w = wrap_phase(x);
        REQUIRE(w > -constants::pi);
        REQUIRE(w <= constants::pi);
        REQUIRE(wrap_phase(w) == w);
        // same point on the unit circle
        REQUIRE(std::abs(std::remainder(x - w, constants::two_pi)) < 1e-9);
    }
}

TEST_CASE("free-space wave environment")
{
    const auto env = WaveEnvironment::free_space(Frequency(5.5e9));
    CHECK(env.wavenumber == Approx(115.27147620734).epsilon(1e-12));
    CHECK(env.wavelength == Approx(0.05450771963636364).epsilon(1e-14));
    CHECK(env.impedance == Approx(376.730313).epsilon(1e-8));
    CHECK_THROWS(Frequency(0.0));
    CHECK_THROWS(Frequency(-1.0));
}

TEST_CASE("Direction canonical and signed-cut forms")
{
    const auto d = Direction::from_signed_cut(deg2rad(-30.0), 0.0);
    CHECK(d.theta() == Approx(deg2rad(30.0)));
    CHECK(d.phi() == Approx(constants::pi));
    CHECK(d.u() == Approx(-0.5));
    CHECK(d.v() == Approx(0.0).margin(1e-15));
    CHECK(d.signed_theta_in_plane(0.0) == Approx(deg2rad(-30.0)));

    const auto e = Direction::from_degrees(30.0, 370.0);
    CHECK(e.phi() == Approx(deg2rad(10.0)));
    CHECK_THROWS(Direction(deg2rad(91.0), 0.0));
    CHECK_THROWS(Direction::from_signed_cut(deg2rad(-91.0), 0.0));
}

TEST_CASE("incident_wavevector")
{
    const Frequency f(5.5e9);
    const auto env = WaveEnvironment::free_space(f);
    const double k = env.wavenumber;

    SECTION("broadside")
    {
        const IncidentWave w(f, Direction(0.0, 0.0), Polarization::TM);
        const auto kv = incident_wavevector(w, env);
        CHECK(kv[0] == 0.0);
        CHECK(kv[1] == 0.0);
        CHECK(kv[2] == Approx(-115.27147620734).epsilon(1e-12));
    }
    SECTION("grazing")
    {
        const IncidentWave w(f, Direction(constants::pi / 2.0, 0.0), Polarization::TM);
        const auto kv = incident_wavevector(w, env);
        CHECK(kv[0] == Approx(-k));
        CHECK(kv[2] == Approx(0.0).margin(1e-12));
    }
    SECTION("30 degrees")
    {
        const IncidentWave w(f, Direction::from_degrees(30.0, 0.0), Polarization::TM);
        const auto kv = incident_wavevector(w, env);
        CHECK(kv[0] == Approx(-k / 2.0));
        CHECK(kv[1] == Approx(0.0).margin(1e-12));
        CHECK(kv[2] == Approx(-k * std::sqrt(3.0) / 2.0));
    }
    SECTION("norm equals k")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> th(0.0, constants::pi / 2.0), ph(0.0, constants::two_pi);
        for (int i = 0; i < 1000; ++i)
        {
            const IncidentWave w(f, Direction(th(rng), ph(rng)), Polarization::TE);
            const auto kv = incident_wavevector(w, env);
            REQUIRE(std::abs(std::sqrt(dot(kv, kv)) - k) <= 1e-12 * k);
        }
    }
}

TEST_CASE("incident_field_at")
{
    const Frequency f(5.5e9);
    const auto env = WaveEnvironment::free_space(f);

    const IncidentWave broad(f, Direction(0.0, 0.0), Polarization::TM);
    CHECK(std::abs(incident_field_at(broad, env, 0.3, -0.7) - complex(1.0, 0.0)) < 1e-15);

    // phase +k lambda sin30 = pi
    const IncidentWave oblique(f, Direction::from_degrees(30.0, 0.0), Polarization::TM);
    CHECK(std::abs(incident_field_at(oblique, env, env.wavelength, 0.0) - complex(-1.0, 0.0)) < 1e-12);

    const IncidentWave shifted(f, Direction(0.0, 0.0), Polarization::TM, 2.0, constants::pi / 2.0);
    CHECK(std::abs(incident_field_at(shifted, env, 0.0, 0.0) - complex(0.0, 2.0)) < 1e-15);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(-1.0, 1.0);
    const IncidentWave w(f, Direction::from_degrees(37.0, 123.0), Polarization::TE, 3.5, 0.4);
    for (int i = 0; i < 1000; ++i)
        REQUIRE(std::abs(incident_field_at(w, env, pos(rng), pos(rng))) == Approx(3.5).epsilon(1e-14));

    CHECK_THROWS(IncidentWave(f, Direction(), Polarization::TM, 0.0));
}

TEST_CASE("polarization unit vectors")
{
    const IncidentWave w(Frequency(1e9), Direction::from_degrees(30.0, 90.0), Polarization::TM);
    const auto te = polarization_vector(w, Polarization::TE);
    const auto tm = polarization_vector(w, Polarization::TM);
    CHECK(te[0] == Approx(-1.0));
    CHECK(tm[1] == Approx(std::sqrt(3.0) / 2.0));
    CHECK(tm[2] == Approx(-0.5));
    CHECK(dot(te, tm) == Approx(0.0).margin(1e-15));
    // both orthogonal to the propagation direction
    const auto r = w.direction.unit_vector();
    CHECK(dot(te, r) == Approx(0.0).margin(1e-15));
    CHECK(dot(tm, r) == Approx(0.0).margin(1e-15));
}

TEST_CASE("EmsLayout is centred on the barycenter")
{
    const EmsLayout L(3, 4, 0.01, 0.02);
    CHECK(L.x(0) == Approx(-0.01));
    CHECK(L.x(1) == 0.0);
    CHECK(L.x(2) == Approx(0.01));
    CHECK(L.y(0) == Approx(-0.03));
    CHECK(L.y(3) == Approx(0.03));
    CHECK(L.aperture_area() == Approx(12 * 0.01 * 0.02));
    CHECK(L.index(2, 3) == 11);
    CHECK_THROWS(EmsLayout(0, 1, 0.01, 0.01));
    CHECK_THROWS(EmsLayout(1, 1, 0.0, 0.01));
}

TEST_CASE("sinc")
{
    CHECK(sinc(0.0) == 1.0);
    CHECK(sinc(constants::pi) == Approx(0.0).margin(1e-15));
    CHECK(sinc(1.0) == Approx(std::sin(1.0)));
    CHECK(sinc(1e-9) == Approx(1.0));
}

TEST_CASE("format_double round-trips")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i)
    {
        const double x = dist(rng);
        REQUIRE(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(145.0) == "145");
    CHECK(format_double(5.5e9) == "5500000000");
    CHECK(format_double(1e20) == "1e+20");
    CHECK(format_double(0.25) == "0.25");
}

TEST_CASE("parallel_for visits every index once and rethrows")
{
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits)
        REQUIRE(h == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 3) throw std::runtime_error("x"); }), std::runtime_error);
}
