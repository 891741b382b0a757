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

#include "emsforge/io.hpp"

#include <cmath>

#include "json.hpp"

namespace emsforge
{
    using json = nlohmann::ordered_json;

    namespace
    {
        json degrees(const std::vector<double>& rad)
        {
            json a = json::array();
            for (double x : rad)
                a.push_back(rad2deg(x));
            return a;
        }

        // JSON has no infinity or NaN; both become null
        json number(double x)
        {
            return std::isfinite(x) ? json(x) : json(nullptr);
        }
    }

    std::string synthesis_report_json(const SynthesisReport& r, const SynthesisSpec& spec)
    {
        json j;
        json states = json::array();
        for (std::size_t i = 0; i < r.states.size(); ++i)
            states.push_back(to_int(r.states.at(i)));
        j["states"] = states;
        j["xi_deg"] = degrees(r.ideal_profile.xi);
        j["realized_deg"] = degrees(r.realized);
        j["residual_deg"] = degrees(r.residuals);
        j["cost"] = number(r.cost);
        j["burn_count"] = r.burn_count;

        const auto& w = spec.wave;
        json s;
        s["P"] = spec.layout.rows();
        s["Q"] = spec.layout.cols();
        s["dx_m"] = spec.layout.dx();
        s["dy_m"] = spec.layout.dy();
        s["freq_hz"] = w.freq.hz();
        s["theta_inc_deg"] = rad2deg(w.direction.theta());
        s["phi_inc_deg"] = rad2deg(w.direction.phi());
        s["pol"] = std::string(to_string(w.polarization));
        s["e0"] = w.amplitude_e0;
        s["phase0_deg"] = rad2deg(w.phase0);
        s["theta_refl_deg"] = rad2deg(spec.direction_refl.theta());
        s["phi_refl_deg"] = rad2deg(spec.direction_refl.phi());
        s["phase_intact_deg"] = rad2deg(r.phase_intact);
        s["phase_burnt_deg"] = rad2deg(r.phase_burnt);
        j["spec"] = s;

        json seq = json::array();
        for (const auto& [p, q] : r.burn_sequence)
            seq.push_back(json::array({p, q}));
        j["burn_sequence"] = seq;
        j["warnings"] = r.warnings;
        return j.dump(2) + "\n";
    }

    std::string mad_result_json(const MadResult& r)
    {
        json j;
        json g = json::object();
        for (const auto& d : r.g_opt.descriptors())
            g[d.name] = {{"value", d.value}, {"unit", d.unit}, {"lower", d.lower}, {"upper", d.upper},
                         {"multiplicity", d.multiplicity}};
        j["g_opt"] = g;
        j["cost"] = number(r.cost);
        json h = json::array();
        for (double x : r.history)
            h.push_back(number(x));
        j["history"] = h;
        j["termination"] = std::string(to_string(r.termination));
        j["seed"] = r.seed;
        return j.dump(2) + "\n";
    }

    std::string metrics_json(const PatternMetrics& m)
    {
        json j;
        j["peak_theta_deg"] = m.peak_theta_deg;
        j["peak_phi_deg"] = m.peak_phi_deg;
        j["peak_value"] = m.peak_value;
        j["peak_db"] = 10.0 * std::log10(m.peak_value);
        j["hpbw_deg"] = number(m.hpbw_deg);
        json lobes = json::array();
        for (const auto& l : m.lobes)
            lobes.push_back({{"theta_deg", l.theta_deg}, {"phi_deg", l.phi_deg}, {"level_db", l.level_db}});
        j["lobes"] = lobes;
        return j.dump(2) + "\n";
    }
}
