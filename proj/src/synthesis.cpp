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

#include "emsforge/synthesis.hpp"
#include "emsforge/util.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace emsforge
{
    SynthesisSpec::SynthesisSpec(Direction target, IncidentWave wave_, EmsLayout layout_, MetaAtomGeometry geometry_,
                                 std::shared_ptr<const ReflectionProvider> provider_)
        : direction_refl(target), wave(wave_), layout(layout_), geometry(std::move(geometry_)), provider(std::move(provider_))
    {
        if (wave.polarization != Polarization::TM)
            throw UnsupportedOperation("synthesis supports TM illumination only");
        if (!provider)
            throw std::invalid_argument("SynthesisSpec: no reflection provider");
    }

    PhaseProfile ideal_phase_profile(const SynthesisSpec& spec)
    {
        const auto env = spec.wave.environment();
        const auto& L = spec.layout;
        const double k = env.wavenumber;
        const double ur = spec.direction_refl.u(), vr = spec.direction_refl.v();
        const Vec3 kinc = incident_wavevector(spec.wave, env);

        PhaseProfile prof{L.rows(), L.cols(), std::vector<double>(L.cell_count())};
        for (std::size_t p = 0; p < L.rows(); ++p)
            for (std::size_t q = 0; q < L.cols(); ++q)
            {
                // unwrapped incident phase, phase0 - k_inc . r
                const double inc = spec.wave.phase0 - (kinc[0] * L.x(p) + kinc[1] * L.y(q));
                const double steer = k * (L.x(p) * ur + L.y(q) * vr);
                prof.xi[L.index(p, q)] = wrap_phase(-(inc + steer));
            }
        return prof;
    }

    AtomState choose_state(double xi, double phase_intact, double phase_burnt)
    {
        const double d1 = std::abs(wrap_phase(xi - phase_intact));
        const double d0 = std::abs(wrap_phase(xi - phase_burnt));
        return d0 < d1 ? AtomState::Burnt : AtomState::Intact;
    }

    PanelConfiguration make_panel(const SynthesisSpec& spec, const StateMatrix& states)
    {
        return PanelConfiguration(spec.layout, spec.geometry, states, spec.provider);
    }

    double cost_otpems(double f_target)
    {
        if (!(f_target >= 0.0))
            throw std::invalid_argument("cost_otpems: pattern value must be >= 0");
        if (f_target == 0.0)
            return std::numeric_limits<double>::infinity();
        return 1.0 / f_target;
    }

    double cost_otpems(const PanelConfiguration& cfg, const IncidentWave& wave, const Direction& target)
    {
        const auto f = pattern_factorized(cfg, wave, AngularGrid::single(target));
        return cost_otpems(f.values[0]);
    }

    SynthesisReport quantize_states(const SynthesisSpec& spec, const PhaseProfile& profile)
    {
        const auto& L = spec.layout;
        if (profile.rows != L.rows() || profile.cols != L.cols() || profile.xi.size() != L.cell_count())
            throw std::invalid_argument("quantize_states: profile dimensions do not match layout");

        const auto g1 = spec.provider->evaluate(spec.geometry, AtomState::Intact, spec.wave);
        const auto g0 = spec.provider->evaluate(spec.geometry, AtomState::Burnt, spec.wave);

        SynthesisReport r;
        r.ideal_profile = profile;
        r.phase_intact = std::arg(g1.tm);
        r.phase_burnt = std::arg(g0.tm);
        r.states = StateMatrix(L.rows(), L.cols(), AtomState::Intact);

        const bool degenerate = wrap_phase(r.phase_intact - r.phase_burnt) == 0.0;
        if (degenerate)
        {
            r.warnings.emplace_back("degenerate meta-atom: both states have the same TM reflection phase; "
                                    "all cells left intact");
            warn(r.warnings.back());
        }

        r.realized.resize(L.cell_count());
        r.residuals.resize(L.cell_count());
        for (std::size_t p = 0; p < L.rows(); ++p)
            for (std::size_t q = 0; q < L.cols(); ++q)
            {
                const std::size_t i = L.index(p, q);
                const AtomState s = degenerate ? AtomState::Intact : choose_state(profile.xi[i], r.phase_intact, r.phase_burnt);
                r.states.set(i, s);
                r.realized[i] = s == AtomState::Intact ? r.phase_intact : r.phase_burnt;
                r.residuals[i] = wrap_phase(profile.xi[i] - r.realized[i]);
                if (s == AtomState::Burnt)
                    r.burn_sequence.emplace_back(p, q);
            }
        r.burn_count = r.burn_sequence.size();
        r.cost = cost_otpems(make_panel(spec, r.states), spec.wave, spec.direction_refl);
        return r;
    }

    SynthesisReport synthesize(const SynthesisSpec& spec)
    {
        return quantize_states(spec, ideal_phase_profile(spec));
    }

    FarFieldPattern ideal_reference_pattern(const SynthesisSpec& spec, const AngularGrid& grid)
    {
        const auto prof = ideal_phase_profile(spec);
        std::vector<complex> c(prof.xi.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = std::polar(1.0, prof.xi[i]);
        return pattern_from_coefficients(spec.layout, c, spec.wave, grid);
    }

    OracleResult exhaustive_oracle(const SynthesisSpec& spec)
    {
        const auto& L = spec.layout;
        const std::size_t n = L.cell_count();
        if (n > 16)
            throw std::invalid_argument("exhaustive_oracle: refusing " + std::to_string(n) + " cells (limit 16)");

        const auto env = spec.wave.environment();
        const double k = env.wavenumber;
        const double ur = spec.direction_refl.u(), vr = spec.direction_refl.v();
        const complex g1 = spec.provider->evaluate(spec.geometry, AtomState::Intact, spec.wave).tm;
        const complex g0 = spec.provider->evaluate(spec.geometry, AtomState::Burnt, spec.wave).tm;

        // Per-cell contribution to the target sum for each state
        std::vector<complex> w(n);
        for (std::size_t p = 0; p < L.rows(); ++p)
            for (std::size_t q = 0; q < L.cols(); ++q)
                w[L.index(p, q)] = incident_field_at(spec.wave, env, L.x(p), L.y(q)) *
                                   std::polar(1.0, k * (L.x(p) * ur + L.y(q) * vr));

        std::uint32_t best_mask = 0;
        double best = -1.0;
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
        {
            complex sum = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                sum += ((mask >> i) & 1u ? g1 : g0) * w[i];
            const double val = std::norm(sum);
            if (val > best)
            {
                best = val;
                best_mask = mask;
            }
        }

        OracleResult r;
        r.states = StateMatrix(L.rows(), L.cols(), AtomState::Burnt);
        for (std::size_t i = 0; i < n; ++i)
            if ((best_mask >> i) & 1u)
                r.states.set(i, AtomState::Intact);
        r.f_target = pattern_factorized(make_panel(spec, r.states), spec.wave, AngularGrid::single(spec.direction_refl)).values[0];
        return r;
    }

    std::string phase_map_csv(std::size_t rows, std::size_t cols, const std::vector<double>& radians)
    {
        if (radians.size() != rows * cols)
            throw std::invalid_argument("phase_map_csv: size does not match dimensions");
        std::string out;
        for (std::size_t p = 0; p < rows; ++p)
        {
            for (std::size_t q = 0; q < cols; ++q)
            {
                if (q)
                    out += ',';
                out += format_double(rad2deg(radians[p * cols + q]));
            }
            out += '\n';
        }
        return out;
    }
}
