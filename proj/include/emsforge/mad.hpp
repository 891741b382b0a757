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

#ifndef EMSFORGE_MAD_HPP
#define EMSFORGE_MAD_HPP

#include "emsforge/reflection.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace emsforge
{
    /// |wrap(arg Gamma(s=1) - arg Gamma(s=0))| for one polarization, in [0, pi].
    double delta_gamma(const MetaAtomGeometry& g, const IncidentWave& wave, const ReflectionProvider& provider,
                       Polarization pol);

    struct MadCostConfig
    {
        double beta1 = 1.0;
        double beta2 = 0.1;
        IncidentWave wave;
        std::shared_ptr<const ReflectionProvider> provider;
        double magnitude_floor = 1e-6;

        MadCostConfig(IncidentWave wave, std::shared_ptr<const ReflectionProvider> provider, double beta1 = 1.0,
                      double beta2 = 0.1, double magnitude_floor = 1e-6);
    };

    /// beta1 sum_pol |dGamma - pi| + beta2 sum_pol sum_s 1 / max(|Gamma|, floor).
    double cost_mad(const MetaAtomGeometry& g, const MadCostConfig& cfg);

    struct SwarmConfig
    {
        std::size_t population = 20;       // C
        std::size_t max_iterations = 200;  // T, the initial population counts as iteration 1
        double inertia = 0.7298;
        double cognitive = 1.49618;
        double social = 1.49618;
        std::size_t stagnation_window = 30;
        double stagnation_tol = 1e-6;
        std::uint64_t rng_seed = 1;

        void validate() const;
    };

    enum class Termination
    {
        MaxIterations,
        Stagnation
    };

    std::string_view to_string(Termination t);

    struct SwarmResult
    {
        std::vector<double> x_best;
        double cost = 0.0;
        std::vector<double> history;  // best-so-far cost after each iteration
        Termination termination = Termination::MaxIterations;
        std::size_t evaluations = 0;
    };

    using CostFunction = std::function<double(const std::vector<double>&)>;

    /// Called serially, in particle order, after each batch of evaluations.
    using EvaluationHook = std::function<void(std::size_t iteration, std::size_t particle, const std::vector<double>& x,
                                              double cost)>;

    /// Particle swarm minimization over the box [lower, upper].
    ///
    /// Positions leaving the box are clamped and the velocity of the clamped coordinate is
    /// zeroed. The run stops after max_iterations or when the best cost improved by no more
    /// than stagnation_tol (relative) over the last stagnation_window iterations. Cost
    /// evaluations of one iteration may run in parallel; all random numbers are drawn
    /// beforehand in particle order, so results do not depend on the thread count.
    /// Non-finite costs are treated as +inf.
    SwarmResult swarm_minimize(const CostFunction& cost, const std::vector<double>& lower,
                               const std::vector<double>& upper, const SwarmConfig& swarm,
                               const EvaluationHook& hook = {});

    struct MadResult
    {
        MetaAtomGeometry g_opt;
        double cost = 0.0;
        std::vector<double> history;
        Termination termination = Termination::MaxIterations;
        std::uint64_t seed = 0;
    };

    /// Optimizes the descriptors of g within their bounds against cost_mad.
    MadResult design_meta_atom(const MetaAtomGeometry& g, const MadCostConfig& cfg, const SwarmConfig& swarm,
                               const EvaluationHook& hook = {});

    struct FrequencyResponseRow
    {
        double freq_hz = 0.0;
        Polarization pol = Polarization::TM;
        AtomState state = AtomState::Intact;
        double mag_db = 0.0;
        double phase_deg = 0.0;
        double delta_gamma_deg = 0.0;
    };

    /// Magnitude, phase and state split per (frequency, polarization, state); frequencies
    /// outside the provider band are skipped with a warning. wave supplies incidence and
    /// amplitude, its frequency is replaced.
    std::vector<FrequencyResponseRow> frequency_response(const MetaAtomGeometry& g, const ReflectionProvider& provider,
                                                         const IncidentWave& wave, const std::vector<double>& freqs_hz);

    /// CSV `freq_hz,pol,state,mag_db,phase_deg,delta_gamma_deg`.
    std::string frequency_response_csv(const std::vector<FrequencyResponseRow>& rows);
}

#endif
