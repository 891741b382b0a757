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

#include "emsforge/io.hpp"
#include "emsforge/mad.hpp"

#include "json.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

using namespace emsforge;
using Catch::Approx;

namespace
{
    const bool quiet = [] { set_warning_handler([](std::string_view) {}); return true; }();

    const Frequency f0(5.5e9);
    const IncidentWave broadside(f0, Direction(), Polarization::TM);

    std::shared_ptr<TabulatedProvider> atom(double ph0, double ph1, double m0 = 1.0, double m1 = 1.0)
    {
        ReflectionTable t;
        for (Component c : {Component::TE, Component::TM})
        {
            t.set(5.5e9, AtomState::Burnt, c, m0, ph0);
            t.set(5.5e9, AtomState::Intact, c, m1, ph1);
        }
        return std::make_shared<TabulatedProvider>(t);
    }

    // Fixed reflection values, independent of the geometry
    struct StubProvider : ReflectionProvider
    {
        complex g[2][2];  // [pol TE/TM][state]
        ReflectionTensor evaluate(const MetaAtomGeometry&, AtomState s, const IncidentWave&) const override
        {
            ReflectionTensor t;
            t.te = g[0][to_int(s)];
            t.tm = g[1][to_int(s)];
            return t;
        }
        std::pair<double, double> band() const override { return {1e9, 20e9}; }
    };

    SwarmConfig small_swarm(std::size_t C, std::size_t T, std::uint64_t seed = 1)
    {
        SwarmConfig s;
        s.population = C;
        s.max_iterations = T;
        s.rng_seed = seed;
        return s;
    }
}

TEST_CASE("phase split")
{
    const auto g = MetaAtomGeometry::default_cell();
    CHECK(delta_gamma(g, broadside, *atom(180, 0), Polarization::TM) == Approx(constants::pi).epsilon(1e-15));
    CHECK(delta_gamma(g, broadside, *atom(155, 10), Polarization::TE) == Approx(deg2rad(145.0)).epsilon(1e-13));
    CHECK(delta_gamma(g, broadside, *atom(-170, 170), Polarization::TM) == Approx(deg2rad(20.0)).epsilon(1e-12));
    CHECK(delta_gamma(g, broadside, *atom(42, 42), Polarization::TM) == 0.0);
}

TEST_CASE("meta-atom cost")
{
    const auto g = MetaAtomGeometry::default_cell();
    const double b1 = 0.7, b2 = 0.3;
    CHECK(cost_mad(g, MadCostConfig(broadside, atom(180, 0), b1, b2)) == Approx(4.0 * b2).epsilon(1e-14));
    const double expect = 2.0 * b1 * (35.0 * constants::pi / 180.0) + 4.0 * b2;
    CHECK(cost_mad(g, MadCostConfig(broadside, atom(145, 0), b1, b2)) == Approx(expect).epsilon(1e-13));
    CHECK(2.0 * (35.0 * constants::pi / 180.0) == Approx(1.2217).margin(1e-4));

    auto stub = std::make_shared<StubProvider>();
    stub->g[0][0] = -1.0;
    stub->g[0][1] = 1.0;
    stub->g[1][0] = 0.0;
    stub->g[1][1] = 1.0;
    const double c = cost_mad(g, MadCostConfig(broadside, stub, 1.0, 1.0, 1e-6));
    CHECK(std::isfinite(c));
    CHECK(c >= 1e6);

    CHECK_THROWS(MadCostConfig(broadside, atom(145, 0), 0.0, 0.0));
    CHECK_THROWS(MadCostConfig(broadside, atom(145, 0), -1.0, 1.0));
    CHECK_THROWS(MadCostConfig(broadside, atom(145, 0), 1.0, 1.0, 0.0));
}

TEST_CASE("cost decomposition")
{
    const auto g = MetaAtomGeometry::default_cell();
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> mag(0.2, 1.0), ph(-3.0, 3.0);
    for (int t = 0; t < 50; ++t)
    {
        auto a = std::make_shared<StubProvider>(), b = std::make_shared<StubProvider>(), c = std::make_shared<StubProvider>();
        for (int pol = 0; pol < 2; ++pol)
            for (int s = 0; s < 2; ++s)
            {
                const double m = mag(rng), p = ph(rng);
                a->g[pol][s] = std::polar(m, p);
                b->g[pol][s] = std::polar(mag(rng), p);  // same phases
                c->g[pol][s] = std::polar(m, ph(rng));   // same magnitudes
            }
        REQUIRE(cost_mad(g, MadCostConfig(broadside, a, 1.0, 0.0)) == Approx(cost_mad(g, MadCostConfig(broadside, b, 1.0, 0.0))).epsilon(1e-12));
        REQUIRE(cost_mad(g, MadCostConfig(broadside, a, 0.0, 1.0)) == Approx(cost_mad(g, MadCostConfig(broadside, c, 0.0, 1.0))).epsilon(1e-12));
    }
}

TEST_CASE("swarm on the sphere benchmark")
{
    const std::vector<double> lo(4, 0.0), hi(4, 1.0);
    auto sphere = [](const std::vector<double>& x)
    {
        double s = 0.0;
        for (double v : x)
            s += (v - 0.3) * (v - 0.3);
        return s;
    };
    const auto r = swarm_minimize(sphere, lo, hi, small_swarm(20, 200, 7));
    CHECK(r.cost <= 1e-6);
    CHECK(r.cost == sphere(r.x_best));
    for (std::size_t i = 1; i < r.history.size(); ++i)
        REQUIRE(r.history[i] <= r.history[i - 1]);
    CHECK(r.history.back() == r.cost);
    CHECK(r.evaluations == 20 * r.history.size());
}

TEST_CASE("swarm with two particles in one dimension")
{
    auto f = [](const std::vector<double>& x) { return (x[0] - 2.0) * (x[0] - 2.0); };
    const auto r = swarm_minimize(f, {-5.0}, {5.0}, small_swarm(2, 500, 3));
    for (std::size_t i = 1; i < r.history.size(); ++i)
        REQUIRE(r.history[i] <= r.history[i - 1]);
    CHECK((r.termination == Termination::Stagnation || r.history.size() == 500));
    CHECK(to_string(r.termination).size() > 0);
}

TEST_CASE("swarm stops on stagnation")
{
    auto flat = [](const std::vector<double>&) { return 1.0; };
    auto s = small_swarm(4, 200);
    s.stagnation_window = 5;
    const auto r = swarm_minimize(flat, {0.0}, {1.0}, s);
    CHECK(r.termination == Termination::Stagnation);
    CHECK(r.history.size() == 6);
}

TEST_CASE("swarm configuration and bounds are validated")
{
    std::atomic<int> calls{0};
    auto f = [&](const std::vector<double>&) { ++calls; return 0.0; };
    CHECK_THROWS(swarm_minimize(f, {0.0, 1.0}, {1.0, 1.0}, small_swarm(4, 10)));
    CHECK_THROWS(swarm_minimize(f, {0.0}, {std::nan("")}, small_swarm(4, 10)));
    CHECK_THROWS(swarm_minimize(f, {0.0}, {1.0, 2.0}, small_swarm(4, 10)));
    CHECK_THROWS(swarm_minimize(f, {0.0}, {1.0}, small_swarm(1, 10)));
    CHECK_THROWS(swarm_minimize(f, {0.0}, {1.0}, small_swarm(4, 0)));
    CHECK(calls == 0);

    const auto r = swarm_minimize(f, {0.0}, {1.0}, small_swarm(3, 1));
    CHECK(r.history.size() == 1);
    CHECK(calls == 3);
}

TEST_CASE("non-finite costs never become the best")
{
    auto f = [](const std::vector<double>& x) { return x[0] < 0.5 ? std::nan("") : x[0]; };
    const auto r = swarm_minimize(f, {0.0}, {1.0}, small_swarm(10, 50));
    CHECK(std::isfinite(r.cost));
    CHECK(r.x_best[0] >= 0.5);
}

TEST_CASE("swarm is deterministic for a seed and independent of threads")
{
    auto rastrigin = [](const std::vector<double>& x)
    {
        double s = 10.0 * static_cast<double>(x.size());
        for (double v : x)
            s += v * v - 10.0 * std::cos(constants::two_pi * v);
        return s;
    };
    const std::vector<double> lo(3, -5.12), hi(3, 5.12);
    setenv("EMS_FORGE_THREADS", "1", 1);
    const auto a = swarm_minimize(rastrigin, lo, hi, small_swarm(15, 80, 99));
    setenv("EMS_FORGE_THREADS", "4", 1);
    const auto b = swarm_minimize(rastrigin, lo, hi, small_swarm(15, 80, 99));
    unsetenv("EMS_FORGE_THREADS");
    CHECK(a.x_best == b.x_best);
    CHECK(a.history == b.history);
    CHECK(a.cost == b.cost);
    const auto c = swarm_minimize(rastrigin, lo, hi, small_swarm(15, 80, 100));
    CHECK(c.history != a.history);
}

TEST_CASE("meta-atom design on the surrogate")
{
    const auto geom = MetaAtomGeometry::default_cell();
    const MadCostConfig cfg(broadside, std::make_shared<SurrogateProvider>(), 1.0, 0.1);
    const auto swarm = small_swarm(20, 200, 1);

    const auto lo = geom.lower_bounds(), hi = geom.upper_bounds();
    std::vector<std::vector<double>> visited;
    const auto r = design_meta_atom(geom, cfg, swarm,
                                    [&](std::size_t, std::size_t, const std::vector<double>& x, double) { visited.push_back(x); });

    SECTION("every evaluated position is inside the bounds")
    {
        for (const auto& x : visited)
            for (std::size_t d = 0; d < x.size(); ++d)
            {
                REQUIRE(x[d] >= lo[d]);
                REQUIRE(x[d] <= hi[d]);
            }
    }
    SECTION("the TM split reaches 120 deg")
    {
        CHECK(rad2deg(delta_gamma(r.g_opt, broadside, *cfg.provider, Polarization::TM)) >= 120.0);
        CHECK(r.cost == Approx(cost_mad(r.g_opt, cfg)).epsilon(1e-14));
        CHECK(r.cost <= cost_mad(geom, cfg));
        CHECK(r.seed == 1);
    }
    SECTION("beats uniform random sampling with the same budget")
    {
        std::mt19937_64 rng(swarm.rng_seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < swarm.population * swarm.max_iterations; ++i)
        {
            std::vector<double> x(lo.size());
            for (std::size_t d = 0; d < x.size(); ++d)
                x[d] = lo[d] + unit(rng) * (hi[d] - lo[d]);
            best = std::min(best, cost_mad(geom.with_values(x), cfg));
        }
        CHECK(r.cost <= best);
    }
    SECTION("the result is reproducible")
    {
        const auto again = design_meta_atom(geom, cfg, swarm);
        CHECK(again.history == r.history);
        CHECK(again.g_opt.values() == r.g_opt.values());
        CHECK(mad_result_json(again) == mad_result_json(r));
    }
}

TEST_CASE("meta-atom design refuses tabulated data")
{
    const MadCostConfig cfg(broadside, atom(145, 0));
    CHECK_THROWS_AS(design_meta_atom(MetaAtomGeometry::default_cell(), cfg, small_swarm(2, 2)), UnsupportedOperation);
}

TEST_CASE("MAD result JSON")
{
    const MadCostConfig cfg(broadside, std::make_shared<SurrogateProvider>());
    const auto r = design_meta_atom(MetaAtomGeometry::default_cell(), cfg, small_swarm(4, 3, 11));
    const auto j = nlohmann::json::parse(mad_result_json(r));
    for (const char* key : {"g_opt", "cost", "history", "termination", "seed"})
        CHECK(j.contains(key));
    CHECK(j["seed"] == 11);
    CHECK(j["history"].size() == r.history.size());
    CHECK(j["g_opt"]["pin_radius"]["value"].get<double>() == r.g_opt.value("pin_radius"));
    CHECK(j["g_opt"]["patch_edge"]["multiplicity"] == 2);
}

TEST_CASE("frequency response")
{
    const auto g = MetaAtomGeometry::default_cell();
    SECTION("one row per polarization and state at a single frequency")
    {
        const auto rows = frequency_response(g, SurrogateProvider(), broadside, {5.5e9});
        REQUIRE(rows.size() == 4);
        CHECK(rows[0].pol == Polarization::TE);
        CHECK(rows[0].state == AtomState::Burnt);
        CHECK(rows[3].pol == Polarization::TM);
        CHECK(rows[3].state == AtomState::Intact);
        for (const auto& r : rows)
        {
            CHECK(r.mag_db >= -3.0);
            CHECK(r.delta_gamma_deg == rows[r.pol == Polarization::TE ? 0 : 2].delta_gamma_deg);
        }
    }
    SECTION("tabulated input is reproduced at its samples")
    {
        const std::string text = "freq_hz,state,component,mag,phase_deg\n"
                                 "5000000000,0,TE,0.93,171.3\n5000000000,0,TM,0.91,170.2\n"
                                 "5000000000,1,TE,0.97,21.7\n5000000000,1,TM,0.96,22.1\n"
                                 "5500000000,0,TE,0.89,146.1\n5500000000,0,TM,0.9,145.3\n"
                                 "5500000000,1,TE,0.99,-0.4\n5500000000,1,TM,0.98,0.2\n";
        const auto table = load_reflection_table(text);
        const TabulatedProvider prov(table);
        const auto rows = frequency_response(g, prov, broadside, {5e9, 5.5e9});
        REQUIRE(rows.size() == 8);
        for (const auto& r : rows)
        {
            const auto& e = table.entries().at(ReflectionTable::Key{r.freq_hz, to_int(r.state),
                                                                     r.pol == Polarization::TE ? Component::TE : Component::TM});
            CHECK(r.phase_deg == e.phase_deg);
            CHECK(r.mag_db == 20.0 * std::log10(e.mag));
        }
        CHECK(rows[6].delta_gamma_deg == Approx(145.1).epsilon(1e-12));
    }
    SECTION("out-of-band frequencies are skipped")
    {
        std::vector<std::string> seen;
        set_warning_handler([&](std::string_view m) { seen.emplace_back(m); });
        const auto rows = frequency_response(g, SurrogateProvider(), broadside, {0.5e9, 5.5e9, 30e9});
        set_warning_handler([](std::string_view) {});
        CHECK(rows.size() == 4);
        CHECK(seen.size() == 2);
    }
    SECTION("CSV export")
    {
        const auto csv = frequency_response_csv(frequency_response(g, *atom(145, 0), broadside, {5.5e9}));
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        CHECK(line == "freq_hz,pol,state,mag_db,phase_deg,delta_gamma_deg");
        std::getline(in, line);
        CHECK(line == "5500000000,TE,0,0,145,145");
        int n = 1;
        while (std::getline(in, line))
            ++n;
        CHECK(n == 4);
    }
}
