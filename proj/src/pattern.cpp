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

#include "emsforge/pattern.hpp"
#include "emsforge/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace emsforge
{
    // ---- StateMatrix ------------------------------------------------------------------------

    StateMatrix::StateMatrix(std::size_t P, std::size_t Q, AtomState fill) : P_(P), Q_(Q), s_(P * Q, fill)
    {
        if (P == 0 || Q == 0)
            throw std::invalid_argument("StateMatrix: P and Q must be positive");
    }

    StateMatrix::StateMatrix(std::size_t P, std::size_t Q, const std::vector<int>& values) : StateMatrix(P, Q)
    {
        if (values.size() != P * Q)
            throw std::invalid_argument("StateMatrix: expected " + std::to_string(P * Q) + " values, got " +
                                        std::to_string(values.size()));
        for (std::size_t i = 0; i < values.size(); ++i)
            s_[i] = atom_state_from_int(values[i]);
    }

    std::size_t StateMatrix::count(AtomState s) const
    {
        return static_cast<std::size_t>(std::count(s_.begin(), s_.end(), s));
    }

    StateMatrix parse_state_matrix(const std::string& text)
    {
        std::vector<int> values;
        std::size_t rows = 0, cols = 0;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line))
        {
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            std::size_t n = 0;
            std::istringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ','))
            {
                if (cell != "0" && cell != "1")
                    throw std::invalid_argument("state matrix, row " + std::to_string(rows + 1) +
                                                ": entries must be 0 or 1");
                values.push_back(cell == "1" ? 1 : 0);
                ++n;
            }
            if (rows == 0)
                cols = n;
            else if (n != cols)
                throw std::invalid_argument("state matrix, row " + std::to_string(rows + 1) + ": expected " +
                                            std::to_string(cols) + " columns, found " + std::to_string(n));
            ++rows;
        }
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("state matrix is empty");
        return StateMatrix(rows, cols, values);
    }

    std::string format_state_matrix(const StateMatrix& s)
    {
        std::string out;
        for (std::size_t p = 0; p < s.rows(); ++p)
        {
            for (std::size_t q = 0; q < s.cols(); ++q)
            {
                if (q)
                    out += ',';
                out += s(p, q) == AtomState::Intact ? '1' : '0';
            }
            out += '\n';
        }
        return out;
    }

    PanelConfiguration::PanelConfiguration(EmsLayout layout_, MetaAtomGeometry geometry_, StateMatrix states_,
                                           std::shared_ptr<const ReflectionProvider> provider_)
        : layout(layout_), geometry(std::move(geometry_)), states(std::move(states_)), provider(std::move(provider_))
    {
        if (states.rows() != layout.rows() || states.cols() != layout.cols())
            throw std::invalid_argument("PanelConfiguration: state matrix is " + std::to_string(states.rows()) + "x" +
                                        std::to_string(states.cols()) + ", layout is " +
                                        std::to_string(layout.rows()) + "x" + std::to_string(layout.cols()));
        if (!provider)
            throw std::invalid_argument("PanelConfiguration: no reflection provider");
    }

    // ---- AngularGrid ------------------------------------------------------------------------

    AngularGrid AngularGrid::phi_cut(double phi, std::vector<double> theta_signed)
    {
        AngularGrid g;
        g.mode_ = Mode::PhiCut;
        g.phi_ = phi;
        for (std::size_t i = 0; i < theta_signed.size(); ++i)
        {
            const double t = theta_signed[i];
            if (i > 0 && !(t > theta_signed[i - 1]))
                throw std::invalid_argument("AngularGrid: cut angles must be strictly increasing");
            PatternSample s;
            s.direction = Direction::from_signed_cut(t, phi);
            s.theta_signed = t;
            s.phi = phi;
            s.u = std::sin(t) * std::cos(phi);
            s.v = std::sin(t) * std::sin(phi);
            s.theta_deg = rad2deg(t);
            s.phi_deg = rad2deg(phi);
            g.samples_.push_back(s);
        }
        if (g.samples_.empty())
            throw std::invalid_argument("AngularGrid: empty cut");
        return g;
    }

    AngularGrid AngularGrid::phi_cut_uniform(double phi_deg, double step_deg)
    {
        if (!(step_deg > 0.0) || step_deg > 90.0)
            throw std::invalid_argument("AngularGrid: step must lie in (0, 90] deg");
        const auto n = static_cast<std::size_t>(std::floor(180.0 / step_deg + 1e-9));
        std::vector<double> deg, t;
        for (std::size_t i = 0; i <= n; ++i)
        {
            deg.push_back(-90.0 + static_cast<double>(i) * step_deg);
            t.push_back(deg2rad(deg.back()));
        }
        auto g = phi_cut(deg2rad(phi_deg), std::move(t));
        for (std::size_t i = 0; i <= n; ++i)
        {
            g.samples_[i].theta_deg = deg[i];
            g.samples_[i].phi_deg = phi_deg;
        }
        return g;
    }

    AngularGrid AngularGrid::uv_grid(std::size_t nu, std::size_t nv)
    {
        if (nu < 2 || nv < 2)
            throw std::invalid_argument("AngularGrid: uv grid needs at least 2 x 2 points");
        AngularGrid g;
        g.mode_ = Mode::UvGrid;
        g.nu_ = nu;
        g.nv_ = nv;
        for (std::size_t iv = 0; iv < nv; ++iv)
            for (std::size_t iu = 0; iu < nu; ++iu)
            {
                const double u = -1.0 + 2.0 * static_cast<double>(iu) / static_cast<double>(nu - 1);
                const double v = -1.0 + 2.0 * static_cast<double>(iv) / static_cast<double>(nv - 1);
                const double rho = std::sqrt(u * u + v * v);
                if (rho > 1.0 + 1e-12)
                    continue;
                PatternSample s;
                s.direction = Direction(std::asin(std::min(rho, 1.0)), std::atan2(v, u));
                s.theta_signed = s.direction.theta();
                s.phi = s.direction.phi();
                s.u = u;
                s.v = v;
                s.theta_deg = rad2deg(s.theta_signed);
                s.phi_deg = rad2deg(s.phi);
                s.iu = iu;
                s.iv = iv;
                g.samples_.push_back(s);
            }
        return g;
    }

    AngularGrid AngularGrid::single(const Direction& d)
    {
        AngularGrid g;
        g.mode_ = Mode::PhiCut;
        g.phi_ = d.phi();
        PatternSample s;
        s.direction = d;
        s.theta_signed = d.theta();
        s.phi = d.phi();
        s.u = d.u();
        s.v = d.v();
        s.theta_deg = rad2deg(d.theta());
        s.phi_deg = rad2deg(d.phi());
        g.samples_.push_back(s);
        return g;
    }

    double FarFieldPattern::max() const
    {
        double m = 0.0;
        for (double x : values)
            m = std::max(m, x);
        return m;
    }

    std::vector<double> FarFieldPattern::normalized_db() const
    {
        const double m = max();
        std::vector<double> db(values.size(), -300.0);
        if (m > 0.0)
            for (std::size_t i = 0; i < values.size(); ++i)
                if (values[i] > 0.0)
                    db[i] = std::max(-300.0, 10.0 * std::log10(values[i] / m));
        return db;
    }

    // ---- General path -----------------------------------------------------------------------

    std::array<std::optional<ReflectionTensor>, 2> evaluate_states(const PanelConfiguration& cfg, const IncidentWave& wave)
    {
        std::array<std::optional<ReflectionTensor>, 2> g;
        for (int s = 0; s <= 1; ++s)
            if (cfg.states.count(atom_state_from_int(s)) > 0)
                g[s] = cfg.provider->evaluate(cfg.geometry, atom_state_from_int(s), wave);
        return g;
    }

    std::vector<CellCurrents> equivalent_currents(const PanelConfiguration& cfg, const IncidentWave& wave)
    {
        const auto env = wave.environment();
        const auto gamma = evaluate_states(cfg, wave);
        const Vec3 kinc = incident_wavevector(wave, env);
        const Vec3 te = polarization_vector(wave, Polarization::TE);
        const Vec3 tm = polarization_vector(wave, Polarization::TM);
        const bool tm_in = wave.polarization == Polarization::TM;

        // ẑ x (k_inc x V) = -(ẑ.k_inc) V for tangential V
        const double je_scale = -kinc[2] / env.impedance;

        const auto& L = cfg.layout;
        std::vector<CellCurrents> out(L.cell_count());
        for (std::size_t p = 0; p < L.rows(); ++p)
            for (std::size_t q = 0; q < L.cols(); ++q)
            {
                const auto& G = *gamma[to_int(cfg.states(p, q))];
                const complex e = incident_field_at(wave, env, L.x(p), L.y(q));
                const complex e_te = tm_in ? 0.0 : e, e_tm = tm_in ? e : 0.0;

                // Reflected TE/TM amplitudes; Gamma^(a-b) maps incident b onto reflected a
                const complex r_te = G.te * e_te + G.te_tm * e_tm;
                const complex r_tm = G.tm_te * e_te + G.tm * e_tm;
                const complex vx = r_te * te[0] + r_tm * tm[0];
                const complex vy = r_te * te[1] + r_tm * tm[1];

                auto& c = out[L.index(p, q)];
                c.electric = {je_scale * vx, je_scale * vy};
                c.magnetic = {vy, -vx};  // -ẑ x V
            }
        return out;
    }

    RadiationVectors radiation_vectors(const EmsLayout& L, const std::vector<CellCurrents>& currents, double k,
                                       const AngularGrid& grid)
    {
        if (currents.size() != L.cell_count())
            throw std::invalid_argument("radiation_vectors: current count does not match layout");
        const std::size_t n = grid.size();
        RadiationVectors rv;
        rv.n_theta_e.resize(n);
        rv.n_phi_e.resize(n);
        rv.n_theta_m.resize(n);
        rv.n_phi_m.resize(n);

        parallel_for(n, [&](std::size_t i)
        {
            const auto& s = grid.samples()[i];
            const double u = s.u, v = s.v;
            const double th = s.direction.theta(), ph = s.direction.phi();
            const double ct = std::cos(th), cp = std::cos(ph), sp = std::sin(ph);
            const double pixel = L.dx() * L.dy() * sinc(0.5 * k * L.dx() * u) * sinc(0.5 * k * L.dy() * v);

            complex ex = 0.0, ey = 0.0, mx = 0.0, my = 0.0;
            for (std::size_t p = 0; p < L.rows(); ++p)
                for (std::size_t q = 0; q < L.cols(); ++q)
                {
                    const complex w = std::polar(pixel, k * (L.x(p) * u + L.y(q) * v));
                    const auto& c = currents[L.index(p, q)];
                    ex += c.electric[0] * w;
                    ey += c.electric[1] * w;
                    mx += c.magnetic[0] * w;
                    my += c.magnetic[1] * w;
                }
            rv.n_theta_e[i] = ct * (ex * cp + ey * sp);
            rv.n_phi_e[i] = -ex * sp + ey * cp;
            rv.n_theta_m[i] = ct * (mx * cp + my * sp);
            rv.n_phi_m[i] = -mx * sp + my * cp;
        });
        return rv;
    }

    RadiationVectors radiation_vectors(const PanelConfiguration& cfg, const IncidentWave& wave, const AngularGrid& grid)
    {
        return radiation_vectors(cfg.layout, equivalent_currents(cfg, wave), wave.environment().wavenumber, grid);
    }

    FarFieldPattern pattern_general(const PanelConfiguration& cfg, const IncidentWave& wave, const AngularGrid& grid)
    {
        const auto env = wave.environment();
        const double k = env.wavenumber, eta = env.impedance;
        const auto rv = radiation_vectors(cfg, wave, grid);
        FarFieldPattern f{grid, std::vector<double>(grid.size()), wave.freq.hz()};
        const double scale = k * k / (2.0 * eta);
        for (std::size_t i = 0; i < grid.size(); ++i)
            f.values[i] = scale * (std::norm(rv.n_phi_m[i] + eta * rv.n_theta_e[i]) +
                                   std::norm(rv.n_theta_m[i] - eta * rv.n_phi_e[i]));
        return f;
    }

    // ---- Factorized path --------------------------------------------------------------------

    namespace
    {
        void require_tm(const IncidentWave& wave, const char* what)
        {
            if (wave.polarization != Polarization::TM)
                throw UnsupportedOperation(std::string(what) + ": only TM illumination is supported");
        }
    }

    std::vector<double> element_factor(const IncidentWave& wave, const EmsLayout& L, const AngularGrid& grid)
    {
        require_tm(wave, "element_factor");
        const auto env = wave.environment();
        const double k = env.wavenumber;
        const double kz = incident_wavevector(wave, env)[2];
        const Vec3 psi = polarization_vector(wave, Polarization::TM);

        std::vector<double> a(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            const auto& s = grid.samples()[i];
            const double th = s.direction.theta(), ph = s.direction.phi();
            const double proj = psi[0] * std::cos(th) * std::cos(ph) + psi[1] * std::cos(th) * std::sin(ph);
            const double val = kz * sinc(0.5 * k * L.dx() * s.u) * sinc(0.5 * k * L.dy() * s.v) * proj;
            a[i] = val * val;
        }
        return a;
    }

    std::vector<complex> tm_cell_coefficients(const PanelConfiguration& cfg, const IncidentWave& wave)
    {
        require_tm(wave, "factorized pattern");
        const auto gamma = evaluate_states(cfg, wave);
        for (const auto& g : gamma)
            if (g && !g->diagonal())
                throw UnsupportedOperation("factorized pattern: reflection tensor has cross-polar terms");
        const auto env = wave.environment();
        const auto& L = cfg.layout;
        std::vector<complex> c(L.cell_count());
        for (std::size_t p = 0; p < L.rows(); ++p)
            for (std::size_t q = 0; q < L.cols(); ++q)
                c[L.index(p, q)] = gamma[to_int(cfg.states(p, q))]->tm * incident_field_at(wave, env, L.x(p), L.y(q));
        return c;
    }

    std::vector<double> array_factor(const EmsLayout& L, const std::vector<complex>& c, double k, const AngularGrid& grid)
    {
        if (c.size() != L.cell_count())
            throw std::invalid_argument("array_factor: coefficient count does not match layout");
        std::vector<double> out(grid.size());
        parallel_for(grid.size(), [&](std::size_t i)
        {
            const auto& s = grid.samples()[i];
            std::vector<complex> ey(L.cols());
            for (std::size_t q = 0; q < L.cols(); ++q)
                ey[q] = std::polar(1.0, k * L.y(q) * s.v);
            complex sum = 0.0;
            for (std::size_t p = 0; p < L.rows(); ++p)
            {
                complex row = 0.0;
                for (std::size_t q = 0; q < L.cols(); ++q)
                    row += c[L.index(p, q)] * ey[q];
                sum += row * std::polar(1.0, k * L.x(p) * s.u);
            }
            out[i] = std::norm(sum);
        });
        return out;
    }

    std::vector<double> array_factor(const PanelConfiguration& cfg, const IncidentWave& wave, const AngularGrid& grid)
    {
        return array_factor(cfg.layout, tm_cell_coefficients(cfg, wave), wave.environment().wavenumber, grid);
    }

    FarFieldPattern pattern_from_coefficients(const EmsLayout& layout, const std::vector<complex>& coefficients,
                                              const IncidentWave& wave, const AngularGrid& grid)
    {
        const double k = wave.environment().wavenumber;
        const auto a = element_factor(wave, layout, grid);
        const auto pf = array_factor(layout, coefficients, k, grid);
        FarFieldPattern f{grid, std::vector<double>(grid.size()), wave.freq.hz()};
        for (std::size_t i = 0; i < grid.size(); ++i)
            f.values[i] = 0.5 * k * k * a[i] * pf[i];
        return f;
    }

    FarFieldPattern pattern_factorized(const PanelConfiguration& cfg, const IncidentWave& wave, const AngularGrid& grid)
    {
        return pattern_from_coefficients(cfg.layout, tm_cell_coefficients(cfg, wave), wave, grid);
    }

    // ---- Metrics ----------------------------------------------------------------------------

    namespace
    {
        Lobe make_lobe(const FarFieldPattern& p, std::size_t i, double peak)
        {
            const auto& s = p.grid.samples()[i];
            Lobe l;
            l.index = i;
            l.theta_deg = s.theta_deg;
            l.phi_deg = s.phi_deg;
            l.level_db = p.values[i] > 0.0 ? 10.0 * std::log10(p.values[i] / peak) : -300.0;
            return l;
        }

        // Signed angle [deg] of the half-power crossing between adjacent samples i and j
        double crossing(const FarFieldPattern& p, std::size_t i, std::size_t j, double peak)
        {
            const double half = 10.0 * std::log10(0.5);
            auto db = [&](std::size_t n) { return p.values[n] > 0.0 ? 10.0 * std::log10(p.values[n] / peak) : -300.0; };
            const double di = db(i), dj = db(j);
            const double ti = p.grid.samples()[i].theta_deg, tj = p.grid.samples()[j].theta_deg;
            const double t = (half - di) / (dj - di);
            return ti + t * (tj - ti);
        }
    }

    PatternMetrics pattern_metrics(const FarFieldPattern& p, double floor_db)
    {
        const auto& smp = p.grid.samples();
        if (p.values.size() != smp.size() || smp.empty())
            throw std::invalid_argument("pattern_metrics: values do not match grid");

        const double peak = p.max();
        if (!(peak > 0.0) || !std::isfinite(peak))
            throw NumericalError("pattern_metrics: pattern has no peak (all samples zero)");

        PatternMetrics m;
        bool found = false;
        for (std::size_t i = 0; i < smp.size(); ++i)
        {
            if (p.values[i] != peak)
                continue;
            if (!found)
            {
                m.peak_index = i;
                found = true;
                continue;
            }
            const auto& a = smp[i].direction;
            const auto& b = smp[m.peak_index].direction;
            if (a.theta() < b.theta() || (a.theta() == b.theta() && a.phi() < b.phi()))
                m.peak_index = i;
        }
        m.peak_value = peak;
        m.peak_theta_deg = smp[m.peak_index].theta_deg;
        m.peak_phi_deg = smp[m.peak_index].phi_deg;

        const double floor_lin = peak * std::pow(10.0, floor_db / 10.0);
        std::vector<std::size_t> maxima;

        if (p.grid.mode() == AngularGrid::Mode::PhiCut)
        {
            const std::size_t n = smp.size();
            const double half = 0.5 * peak;

            // half-power crossings around the peak
            std::size_t l = m.peak_index, r = m.peak_index;
            while (l > 0 && p.values[l - 1] >= half)
                --l;
            while (r + 1 < n && p.values[r + 1] >= half)
                ++r;
            if (l > 0 && r + 1 < n)
                m.hpbw_deg = crossing(p, r, r + 1, peak) - crossing(p, l - 1, l, peak);

            // plateaus count once, at their first sample
            for (std::size_t i = 0; i < n; ++i)
            {
                const bool left = i == 0 || p.values[i] > p.values[i - 1];
                const bool right = i + 1 == n || p.values[i] >= p.values[i + 1];
                if (left && right)
                    maxima.push_back(i);
            }
        }
        else
        {
            std::map<std::pair<std::size_t, std::size_t>, std::size_t> at;
            for (std::size_t i = 0; i < smp.size(); ++i)
                at[{smp[i].iu, smp[i].iv}] = i;
            for (std::size_t i = 0; i < smp.size(); ++i)
            {
                bool is_max = true;
                for (int du = -1; du <= 1 && is_max; ++du)
                    for (int dv = -1; dv <= 1 && is_max; ++dv)
                    {
                        if (du == 0 && dv == 0)
                            continue;
                        const long iu = static_cast<long>(smp[i].iu) + du, iv = static_cast<long>(smp[i].iv) + dv;
                        if (iu < 0 || iv < 0)
                            continue;
                        auto it = at.find({static_cast<std::size_t>(iu), static_cast<std::size_t>(iv)});
                        if (it == at.end())
                            continue;
                        const std::size_t j = it->second;
                        is_max = j < i ? p.values[i] > p.values[j] : p.values[i] >= p.values[j];
                    }
                if (is_max)
                    maxima.push_back(i);
            }
        }

        for (std::size_t i : maxima)
            if (i != m.peak_index && p.values[i] > floor_lin)
                m.lobes.push_back(make_lobe(p, i, peak));
        std::stable_sort(m.lobes.begin(), m.lobes.end(),
                         [](const Lobe& a, const Lobe& b) { return a.level_db > b.level_db; });
        return m;
    }

    // ---- Export -----------------------------------------------------------------------------

    std::string pattern_csv(const FarFieldPattern& p, const std::vector<std::pair<std::string, const FarFieldPattern*>>& extra)
    {
        for (const auto& [name, e] : extra)
            if (e->values.size() != p.values.size())
                throw std::invalid_argument("pattern_csv: pattern '" + name + "' has a different grid");

        std::string out = "theta_deg,phi_deg,u,v,f_abs,f_db";
        for (const auto& [name, e] : extra)
            out += "," + name + "_abs," + name + "_db";
        out += '\n';

        const auto db = p.normalized_db();
        std::vector<std::vector<double>> extra_db;
        for (const auto& [name, e] : extra)
            extra_db.push_back(e->normalized_db());

        const auto& smp = p.grid.samples();
        for (std::size_t i = 0; i < smp.size(); ++i)
        {
            const auto& s = smp[i];
            out += format_double(s.theta_deg) + ',' + format_double(s.phi_deg) + ',' +
                   format_double(s.u) + ',' + format_double(s.v) + ',' + format_double(p.values[i]) + ',' +
                   format_double(db[i]);
            for (std::size_t e = 0; e < extra.size(); ++e)
                out += ',' + format_double(extra[e].second->values[i]) + ',' + format_double(extra_db[e][i]);
            out += '\n';
        }
        return out;
    }
}
