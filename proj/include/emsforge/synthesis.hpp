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

#ifndef EMSFORGE_SYNTHESIS_HPP
#define EMSFORGE_SYNTHESIS_HPP

#include "emsforge/pattern.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace emsforge
{
    struct SynthesisSpec
    {
        Direction direction_refl;  // target (theta_refl, phi_refl)
        IncidentWave wave;
        EmsLayout layout;
        MetaAtomGeometry geometry;
        std::shared_ptr<const ReflectionProvider> provider;

        SynthesisSpec(Direction target, IncidentWave wave, EmsLayout layout, MetaAtomGeometry geometry,
                      std::shared_ptr<const ReflectionProvider> provider);
    };

    /// Per-cell phases [rad] wrapped to (-pi, pi], row-major.
    struct PhaseProfile
    {
        std::size_t rows = 0;
        std::size_t cols = 0;
        std::vector<double> xi;
    };

    /// Continuous compensation phase that collimates the reflected field onto the target:
    /// xi_pq = -(arg E_inc(r_pq) + k (x_p sin th_r cos ph_r + y_q sin th_r sin ph_r)).
    PhaseProfile ideal_phase_profile(const SynthesisSpec& spec);

    /// Wrapped-distance phase conjugation for one cell; equidistant phases select Intact.
    AtomState choose_state(double xi, double phase_intact, double phase_burnt);

    struct SynthesisReport
    {
        StateMatrix states{1, 1};
        PhaseProfile ideal_profile;
        std::vector<double> realized;   // arg Gamma^TM of the chosen state [rad]
        std::vector<double> residuals;  // wrap(xi - realized) [rad]
        double cost = 0.0;              // 1 / F(target)
        std::size_t burn_count = 0;
        std::vector<std::pair<std::size_t, std::size_t>> burn_sequence;  // (p, q) of burnt cells, row-major
        double phase_intact = 0.0;      // arg Gamma^TM(s = 1) [rad]
        double phase_burnt = 0.0;       // arg Gamma^TM(s = 0) [rad]
        std::vector<std::string> warnings;
    };

    /// Selects each cell's state by phase conjugation of the profile and fills the report.
    SynthesisReport quantize_states(const SynthesisSpec& spec, const PhaseProfile& profile);
    SynthesisReport synthesize(const SynthesisSpec& spec);

    /// Reciprocal of the pattern at the target; +inf when F == 0.
    double cost_otpems(double f_target);
    double cost_otpems(const PanelConfiguration& cfg, const IncidentWave& wave, const Direction& target);

    /// Pattern of a panel whose cells realize exp(j xi_pq) exactly.
    FarFieldPattern ideal_reference_pattern(const SynthesisSpec& spec, const AngularGrid& grid);

    struct OracleResult
    {
        StateMatrix states{1, 1};
        double f_target = 0.0;
    };

    /// Brute force over all 2^(P Q) state matrices (P Q <= 16) maximizing F at the target.
    /// The first maximizer in enumeration order (bit i of the counter = state of cell i) wins.
    OracleResult exhaustive_oracle(const SynthesisSpec& spec);

    /// Panel configuration for a given state matrix.
    PanelConfiguration make_panel(const SynthesisSpec& spec, const StateMatrix& states);

    /// P rows of Q comma-separated values (degrees) for a row-major phase map.
    std::string phase_map_csv(std::size_t rows, std::size_t cols, const std::vector<double>& radians);
}

#endif
