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

#ifndef EMSFORGE_PATTERN_HPP
#define EMSFORGE_PATTERN_HPP

#include "emsforge/core.hpp"
#include "emsforge/reflection.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace emsforge
{
    /// P x Q binary fuse states, stored row-major (p outer, q inner).
    class StateMatrix
    {
    public:
        StateMatrix(std::size_t P, std::size_t Q, AtomState fill = AtomState::Intact);
        StateMatrix(std::size_t P, std::size_t Q, const std::vector<int>& values);

        std::size_t rows() const { return P_; }
        std::size_t cols() const { return Q_; }
        std::size_t size() const { return s_.size(); }

        AtomState operator()(std::size_t p, std::size_t q) const { return s_.at(p * Q_ + q); }
        AtomState at(std::size_t i) const { return s_.at(i); }
        void set(std::size_t p, std::size_t q, AtomState s) { s_.at(p * Q_ + q) = s; }
        void set(std::size_t i, AtomState s) { s_.at(i) = s; }

        std::size_t count(AtomState s) const;
        bool operator==(const StateMatrix&) const = default;

    private:
        std::size_t P_;
        std::size_t Q_;
        std::vector<AtomState> s_;
    };

    /// Parses P rows of Q comma-separated {0,1} values.
    StateMatrix parse_state_matrix(const std::string& text);
    std::string format_state_matrix(const StateMatrix& s);

    struct PanelConfiguration
    {
        EmsLayout layout;
        MetaAtomGeometry geometry;
        StateMatrix states;
        std::shared_ptr<const ReflectionProvider> provider;

        PanelConfiguration(EmsLayout layout, MetaAtomGeometry geometry, StateMatrix states,
                           std::shared_ptr<const ReflectionProvider> provider);
    };

    // ---- Angular sampling -------------------------------------------------------------------

    struct PatternSample
    {
        Direction direction;
        double theta_signed = 0.0;  // signed angle for cuts, theta for uv samples [rad]
        double phi = 0.0;           // cut plane, or canonical phi for uv samples [rad]
        double u = 0.0;
        double v = 0.0;
        double theta_deg = 0.0;  // labels used for export and metrics
        double phi_deg = 0.0;
        std::size_t iu = 0;  // uv-grid indices (uv mode only)
        std::size_t iv = 0;
    };

    class AngularGrid
    {
    public:
        enum class Mode
        {
            PhiCut,
            UvGrid
        };

        /// Cut in the plane phi with signed theta samples in [-pi/2, pi/2].
        static AngularGrid phi_cut(double phi, std::vector<double> theta_signed);

        /// Uniform cut from -90 to +90 deg in the plane phi_deg; the default step is 0.25 deg.
        static AngularGrid phi_cut_uniform(double phi_deg = 0.0, double step_deg = 0.25);

        /// nu x nv points spanning [-1, 1]^2, keeping only u^2 + v^2 <= 1; order is v outer, u inner.
        static AngularGrid uv_grid(std::size_t nu = 201, std::size_t nv = 201);

        /// Single direction (used for target evaluations).
        static AngularGrid single(const Direction& d);

        Mode mode() const { return mode_; }
        double cut_phi() const { return phi_; }
        std::size_t nu() const { return nu_; }
        std::size_t nv() const { return nv_; }
        const std::vector<PatternSample>& samples() const { return samples_; }
        std::size_t size() const { return samples_.size(); }

    private:
        Mode mode_ = Mode::PhiCut;
        double phi_ = 0.0;
        std::size_t nu_ = 0;
        std::size_t nv_ = 0;
        std::vector<PatternSample> samples_;
    };

    /// Sampled power pattern F(theta, phi), absolute scale.
    struct FarFieldPattern
    {
        AngularGrid grid;
        std::vector<double> values;
        double frequency_hz = 0.0;

        double max() const;

        /// 10 log10(F / max F), floored at -300 dB.
        std::vector<double> normalized_db() const;
    };

    // ---- General path -----------------------------------------------------------------------

    /// Piecewise-constant surface current coefficients of one cell (x and y components).
    struct CellCurrents
    {
        std::array<complex, 2> electric;
        std::array<complex, 2> magnetic;
    };

    /// Reflection tensor per distinct state, evaluated once.
    std::array<std::optional<ReflectionTensor>, 2> evaluate_states(const PanelConfiguration& cfg, const IncidentWave& wave);

    /// Per-cell electric and magnetic current coefficients, row-major.
    std::vector<CellCurrents> equivalent_currents(const PanelConfiguration& cfg, const IncidentWave& wave);

    struct RadiationVectors
    {
        std::vector<complex> n_theta_e;
        std::vector<complex> n_phi_e;
        std::vector<complex> n_theta_m;
        std::vector<complex> n_phi_m;
    };

    RadiationVectors radiation_vectors(const EmsLayout& layout, const std::vector<CellCurrents>& currents, double k,
                                       const AngularGrid& grid);
    RadiationVectors radiation_vectors(const PanelConfiguration& cfg, const IncidentWave& wave, const AngularGrid& grid);

    FarFieldPattern pattern_general(const PanelConfiguration& cfg, const IncidentWave& wave, const AngularGrid& grid);

    // ---- Factorized path (TM, diagonal tensor) ----------------------------------------------

    std::vector<double> element_factor(const IncidentWave& wave, const EmsLayout& layout, const AngularGrid& grid);

    /// Per-cell coefficients Gamma^TM(s_pq) E_inc(r_pq), row-major.
    std::vector<complex> tm_cell_coefficients(const PanelConfiguration& cfg, const IncidentWave& wave);

    /// |sum_p sum_q c_pq exp(jk(x_p u + y_q v))|^2, summed p outer, q inner.
    std::vector<double> array_factor(const EmsLayout& layout, const std::vector<complex>& coefficients, double k,
                                     const AngularGrid& grid);
    std::vector<double> array_factor(const PanelConfiguration& cfg, const IncidentWave& wave, const AngularGrid& grid);

    FarFieldPattern pattern_factorized(const PanelConfiguration& cfg, const IncidentWave& wave, const AngularGrid& grid);

    /// (k^2/2) A P for arbitrary per-cell coefficients (e.g. an ideal continuous-phase panel).
    FarFieldPattern pattern_from_coefficients(const EmsLayout& layout, const std::vector<complex>& coefficients,
                                              const IncidentWave& wave, const AngularGrid& grid);

    // ---- Metrics ----------------------------------------------------------------------------

    struct Lobe
    {
        std::size_t index = 0;
        double theta_deg = 0.0;  // signed for cuts
        double phi_deg = 0.0;
        double level_db = 0.0;   // relative to the peak
    };

    struct PatternMetrics
    {
        std::size_t peak_index = 0;
        double peak_theta_deg = 0.0;
        double peak_phi_deg = 0.0;
        double peak_value = 0.0;
        double hpbw_deg = std::numeric_limits<double>::quiet_NaN();  // cuts only
        std::vector<Lobe> lobes;  // local maxima other than the peak, strongest first
    };

    /// Peak, half-power beamwidth and secondary lobes above floor_db (relative to the peak).
    PatternMetrics pattern_metrics(const FarFieldPattern& p, double floor_db = -30.0);

    // ---- Export -----------------------------------------------------------------------------

    /// CSV `theta_deg,phi_deg,u,v,f_abs,f_db` in grid order; extra patterns add
    /// `<name>_abs,<name>_db` column pairs (same grid required).
    std::string pattern_csv(const FarFieldPattern& p,
                            const std::vector<std::pair<std::string, const FarFieldPattern*>>& extra = {});
}

#endif
