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

#include "emsforge/mad.hpp"
#include "emsforge/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace emsforge
{
    double delta_gamma(const MetaAtomGeometry& g, const IncidentWave& wave, const ReflectionProvider& provider,
                       Polarization pol)
    {
        const complex g1 = provider.evaluate(g, AtomState::Intact, wave).co(pol);
        const complex g0 = provider.evaluate(g, AtomState::Burnt, wave).co(pol);
        return std::abs(wrap_phase(std::arg(g1) - std::arg(g0)));
    }

    MadCostConfig::MadCostConfig(IncidentWave wave_, std::shared_ptr<const ReflectionProvider> provider_, double b1,
                                 double b2, double floor)
        : beta1(b1), beta2(b2), wave(wave_), provider(std::move(provider_)), magnitude_floor(floor)
    {
        if (!(beta1 >= 0.0) || !(beta2 >= 0.0) || !(beta1 + beta2 > 0.0))
            throw std::invalid_argument("MadCostConfig: beta1, beta2 must be >= 0 with a positive sum");
        if (!(magnitude_floor > 0.0))
            throw std::invalid_argument("MadCostConfig: magnitude floor must be > 0");
        if (!provider)
            throw std::invalid_argument("MadCostConfig: no reflection provider");
    }

    double cost_mad(const MetaAtomGeometry& g, const MadCostConfig& cfg)
    {
        const auto t1 = cfg.provider->evaluate(g, AtomState::Intact, cfg.wave);
        const auto t0 = cfg.provider->evaluate(g, AtomState::Burnt, cfg.wave);

        double phase_term = 0.0, mag_term = 0.0;
        for (Polarization pol : {Polarization::TE, Polarization::TM})
        {
            const complex g1 = t1.co(pol), g0 = t0.co(pol);
            const double dg = std::abs(wrap_phase(std::arg(g1) - std::arg(g0)));
            phase_term += std::abs(dg - constants::pi);
            mag_term += 1.0 / std::max(std::abs(g1), cfg.magnitude_floor);
            mag_term += 1.0 / std::max(std::abs(g0), cfg.magnitude_floor);
        }
        return cfg.beta1 * phase_term + cfg.beta2 * mag_term;
    }

    void SwarmConfig::validate() const
    {
        if (population < 2)
            throw std::invalid_argument("SwarmConfig: population must be >= 2");
        if (max_iterations < 1)
            throw std::invalid_argument("SwarmConfig: max_iterations must be >= 1");
        if (stagnation_window < 1)
            throw std::invalid_argument("SwarmConfig: stagnation_window must be >= 1");
        if (!std::isfinite(inertia) || !std::isfinite(cognitive) || !std::isfinite(social) || !(stagnation_tol >= 0.0))
            throw std::invalid_argument("SwarmConfig: coefficients must be finite, tolerance >= 0");
    }

    std::string_view to_string(Termination t)
    {
        return t == Termination::Stagnation ? "Stagnation" : "MaxIterations";
    }

    SwarmResult swarm_minimize(const CostFunction& cost, const std::vector<double>& lower,
                               const std::vector<double>& upper, const SwarmConfig& swarm, const EvaluationHook& hook)
    {
        swarm.validate();
        const std::size_t D = lower.size(), C = swarm.population;
        if (D == 0 || upper.size() != D)
            throw std::invalid_argument("swarm_minimize: bounds must be non-empty and of equal length");
        for (std::size_t d = 0; d < D; ++d)
            if (!std::isfinite(lower[d]) || !std::isfinite(upper[d]) || !(lower[d] < upper[d]))
                throw std::invalid_argument("swarm_minimize: bound " + std::to_string(d) + " requires finite lower < upper");

        std::mt19937_64 rng(swarm.rng_seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        std::vector<std::vector<double>> x(C, std::vector<double>(D)), v = x;
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t d = 0; d < D; ++d)
            {
                const double range = upper[d] - lower[d];
                x[c][d] = lower[d] + unit(rng) * range;
                v[c][d] = 0.1 * range * (2.0 * unit(rng) - 1.0);
            }

        std::vector<double> f(C);
        SwarmResult res;
        auto evaluate_all = [&](std::size_t iteration)
        {
            parallel_for(C, [&](std::size_t c)
            {
                const double val = cost(x[c]);
                f[c] = std::isnan(val) ? std::numeric_limits<double>::infinity() : val;
            });
            res.evaluations += C;
            if (hook)
                for (std::size_t c = 0; c < C; ++c)
                    hook(iteration, c, x[c], f[c]);
        };

        evaluate_all(1);
        auto pbest = x;
        auto pbest_f = f;
        std::size_t g = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
        std::vector<double> gbest = x[g];
        double gbest_f = f[g];
        res.history.push_back(gbest_f);

        std::vector<std::vector<double>> r1(C, std::vector<double>(D)), r2 = r1;
        for (std::size_t t = 2; t <= swarm.max_iterations; ++t)
        {
            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t d = 0; d < D; ++d)
                {
                    r1[c][d] = unit(rng);
                    r2[c][d] = unit(rng);
                }

            for (std::size_t c = 0; c < C; ++c)
                for (std::size_t d = 0; d < D; ++d)
                {
                    double& vel = v[c][d];
                    vel = swarm.inertia * vel + swarm.cognitive * r1[c][d] * (pbest[c][d] - x[c][d]) +
                          swarm.social * r2[c][d] * (gbest[d] - x[c][d]);
                    double pos = x[c][d] + vel;
                    if (pos < lower[d] || pos > upper[d])
                    {
                        pos = std::clamp(pos, lower[d], upper[d]);
                        vel = 0.0;
                    }
                    x[c][d] = pos;
                }

            evaluate_all(t);
            for (std::size_t c = 0; c < C; ++c)
                if (f[c] < pbest_f[c])
                {
                    pbest_f[c] = f[c];
                    pbest[c] = x[c];
                }
            for (std::size_t c = 0; c < C; ++c)
                if (pbest_f[c] < gbest_f)
                {
                    gbest_f = pbest_f[c];
                    gbest = pbest[c];
                }
            res.history.push_back(gbest_f);

            const std::size_t n = res.history.size();
            if (n > swarm.stagnation_window)
            {
                const double prev = res.history[n - 1 - swarm.stagnation_window];
                if (std::isfinite(prev) && prev - gbest_f <= swarm.stagnation_tol * std::abs(prev))
                {
                    res.termination = Termination::Stagnation;
                    break;
                }
            }
        }

        res.x_best = gbest;
        res.cost = gbest_f;
        return res;
    }

    MadResult design_meta_atom(const MetaAtomGeometry& g, const MadCostConfig& cfg, const SwarmConfig& swarm,
                               const EvaluationHook& hook)
    {
        if (cfg.provider->is_tabulated())
            throw UnsupportedOperation("meta-atom design needs a geometry-dependent provider; tabulated data has nothing to optimize");

        auto cost = [&](const std::vector<double>& values) { return cost_mad(g.with_values(values), cfg); };
        const auto r = swarm_minimize(cost, g.lower_bounds(), g.upper_bounds(), swarm, hook);

        MadResult out;
        out.g_opt = g.with_values(r.x_best);
        out.cost = r.cost;
        out.history = r.history;
        out.termination = r.termination;
        out.seed = swarm.rng_seed;
        return out;
    }

    std::vector<FrequencyResponseRow> frequency_response(const MetaAtomGeometry& g, const ReflectionProvider& provider,
                                                         const IncidentWave& wave, const std::vector<double>& freqs_hz)
    {
        std::vector<FrequencyResponseRow> rows;
        for (double hz : freqs_hz)
        {
            if (!(hz > 0.0) || !provider.in_band(hz))
            {
                warn("frequency_response: skipping " + format_double(hz) + " Hz (outside provider band)");
                continue;
            }
            IncidentWave w = wave;
            w.freq = Frequency(hz);
            for (Polarization pol : {Polarization::TE, Polarization::TM})
            {
                const Component comp = pol == Polarization::TE ? Component::TE : Component::TM;
                const PolarValue p0 = provider.polar(g, AtomState::Burnt, w, comp);
                const PolarValue p1 = provider.polar(g, AtomState::Intact, w, comp);
                const double dg = rad2deg(std::abs(wrap_phase(deg2rad(p1.phase_deg) - deg2rad(p0.phase_deg))));
                for (const auto& [state, pv] : {std::pair{AtomState::Burnt, p0}, std::pair{AtomState::Intact, p1}})
                {
                    FrequencyResponseRow r;
                    r.freq_hz = hz;
                    r.pol = pol;
                    r.state = state;
                    r.mag_db = pv.mag > 0.0 ? 20.0 * std::log10(pv.mag) : -300.0;
                    r.phase_deg = pv.phase_deg;
                    r.delta_gamma_deg = dg;
                    rows.push_back(r);
                }
            }
        }
        return rows;
    }

    std::string frequency_response_csv(const std::vector<FrequencyResponseRow>& rows)
    {
        std::string out = "freq_hz,pol,state,mag_db,phase_deg,delta_gamma_deg\n";
        for (const auto& r : rows)
        {
            out += format_double(r.freq_hz) + ',' + std::string(to_string(r.pol)) + ',' + std::to_string(to_int(r.state)) +
                   ',' + format_double(r.mag_db) + ',' + format_double(r.phase_deg) + ',' +
                   format_double(r.delta_gamma_deg) + '\n';
        }
        return out;
    }
}
