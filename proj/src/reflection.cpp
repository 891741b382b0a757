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

#include "emsforge/reflection.hpp"
#include "emsforge/util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace emsforge
{
    TableParseError::TableParseError(std::size_t row, const std::string& what)
        : Error(row > 0 ? "reflection table, row " + std::to_string(row) + ": " + what : "reflection table: " + what), row_(row)
    {
    }

    // ---- MetaAtomGeometry -------------------------------------------------------------------

    MetaAtomGeometry::MetaAtomGeometry(std::vector<Descriptor> descriptors) : d_(std::move(descriptors))
    {
        validate();
    }

    void MetaAtomGeometry::validate() const
    {
        std::set<std::string> names;
        for (const auto& d : d_)
        {
            if (d.name.empty())
                throw std::invalid_argument("MetaAtomGeometry: empty descriptor name");
            if (!names.insert(d.name).second)
                throw std::invalid_argument("MetaAtomGeometry: duplicate descriptor '" + d.name + "'");
            if (!std::isfinite(d.value) || !std::isfinite(d.lower) || !std::isfinite(d.upper))
                throw std::invalid_argument("MetaAtomGeometry: non-finite value or bound for '" + d.name + "'");
            if (d.lower > d.value || d.value > d.upper)
                throw std::invalid_argument("MetaAtomGeometry: '" + d.name + "' outside its bounds");
            if (d.multiplicity < 1)
                throw std::invalid_argument("MetaAtomGeometry: multiplicity of '" + d.name + "' must be >= 1");
        }
    }

    MetaAtomGeometry MetaAtomGeometry::default_cell(double bound_fraction)
    {
        if (!(bound_fraction >= 0.0) || bound_fraction >= 1.0)
            throw std::invalid_argument("MetaAtomGeometry: bound fraction must lie in [0, 1)");
        auto make = [&](const char* name, double v, int mult)
        {
            return Descriptor{name, v, "m", v * (1.0 - bound_fraction), v * (1.0 + bound_fraction), mult};
        };
        return MetaAtomGeometry({make("patch_edge", 13.95e-3, 2),
                                 make("pin_radius", 0.3e-3, 1),
                                 make("microstrip_length", 3.71e-3, 1),
                                 make("cell_spacing", 2.45e-2, 2)});
    }

    bool MetaAtomGeometry::has(const std::string& name) const
    {
        return std::any_of(d_.begin(), d_.end(), [&](const Descriptor& d) { return d.name == name; });
    }

    double MetaAtomGeometry::value(const std::string& name) const
    {
        for (const auto& d : d_)
            if (d.name == name)
                return d.value;
        throw std::invalid_argument("MetaAtomGeometry: no descriptor named '" + name + "'");
    }

    std::vector<double> MetaAtomGeometry::values() const
    {
        std::vector<double> v;
        for (const auto& d : d_)
            v.push_back(d.value);
        return v;
    }

    std::vector<double> MetaAtomGeometry::lower_bounds() const
    {
        std::vector<double> v;
        for (const auto& d : d_)
            v.push_back(d.lower);
        return v;
    }

    std::vector<double> MetaAtomGeometry::upper_bounds() const
    {
        std::vector<double> v;
        for (const auto& d : d_)
            v.push_back(d.upper);
        return v;
    }

    MetaAtomGeometry MetaAtomGeometry::with_values(const std::vector<double>& values) const
    {
        if (values.size() != d_.size())
            throw std::invalid_argument("MetaAtomGeometry: expected " + std::to_string(d_.size()) + " values");
        auto d = d_;
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i].value = values[i];
        return MetaAtomGeometry(std::move(d));
    }

    MetaAtomGeometry MetaAtomGeometry::with_value(const std::string& name, double value) const
    {
        auto d = d_;
        for (auto& x : d)
            if (x.name == name)
            {
                x.value = value;
                return MetaAtomGeometry(std::move(d));
            }
        throw std::invalid_argument("MetaAtomGeometry: no descriptor named '" + name + "'");
    }

    // ---- Fuse -------------------------------------------------------------------------------

    AtomState atom_state_from_int(int s)
    {
        if (s == 0)
            return AtomState::Burnt;
        if (s == 1)
            return AtomState::Intact;
        throw std::invalid_argument("atom state must be 0 or 1, got " + std::to_string(s));
    }

    void FuseModel::validate() const
    {
        if (!(intact_resistance >= 0.0) || !(intact_inductance >= 0.0))
            throw std::invalid_argument("FuseModel: intact resistance and inductance must be >= 0");
        if (broken_branch == BrokenBranch::Residual && (!(residual_resistance >= 0.0) || !(residual_inductance >= 0.0)))
            throw std::invalid_argument("FuseModel: residual resistance and inductance must be >= 0");
    }

    complex FuseModel::intact_impedance(Frequency f) const
    {
        return {intact_resistance, f.omega() * intact_inductance};
    }

    // ---- Tensor -----------------------------------------------------------------------------

    std::string_view to_string(Component c)
    {
        switch (c)
        {
        case Component::TE:
            return "TE";
        case Component::TETM:
            return "TETM";
        case Component::TM:
            return "TM";
        case Component::TMTE:
            return "TMTE";
        }
        return "?";
    }

    Component component_from_string(std::string_view s)
    {
        if (s == "TE")
            return Component::TE;
        if (s == "TETM")
            return Component::TETM;
        if (s == "TM")
            return Component::TM;
        if (s == "TMTE")
            return Component::TMTE;
        throw std::invalid_argument("unknown component '" + std::string(s) + "'");
    }

    complex ReflectionTensor::get(Component c) const
    {
        switch (c)
        {
        case Component::TE:
            return te;
        case Component::TETM:
            return te_tm;
        case Component::TM:
            return tm;
        case Component::TMTE:
            return tm_te;
        }
        return {};
    }

    PolarValue ReflectionProvider::polar(const MetaAtomGeometry& g, AtomState s, const IncidentWave& wave, Component c) const
    {
        const complex z = evaluate(g, s, wave).get(c);
        return {std::abs(z), rad2deg(std::arg(z))};
    }

    bool ReflectionProvider::in_band(double hz) const
    {
        const auto [lo, hi] = band();
        const double tol = 1e-12 * hi;
        return hz >= lo - tol && hz <= hi + tol;
    }

    // ---- ReflectionTable --------------------------------------------------------------------

    void ReflectionTable::set(double freq_hz, AtomState s, Component c, double mag, double phase_deg)
    {
        if (!(freq_hz > 0.0) || !std::isfinite(freq_hz))
            throw std::invalid_argument("ReflectionTable: frequency must be finite and > 0");
        if (!(mag >= 0.0) || !std::isfinite(mag) || !std::isfinite(phase_deg))
            throw std::invalid_argument("ReflectionTable: magnitude must be finite and >= 0, phase finite");
        entries_[Key{freq_hz, to_int(s), c}] = Entry{mag, phase_deg, format_double(mag), format_double(phase_deg)};
        freq_text_.try_emplace(freq_hz, format_double(freq_hz));
    }

    std::vector<double> ReflectionTable::frequencies() const
    {
        std::vector<double> f;
        for (const auto& [k, e] : entries_)
            if (f.empty() || f.back() != k.freq_hz)
                f.push_back(k.freq_hz);
        return f;
    }

    const std::string& ReflectionTable::frequency_text(double hz) const
    {
        return freq_text_.at(hz);
    }

    bool ReflectionTable::has_component(Component c) const
    {
        return std::any_of(entries_.begin(), entries_.end(), [c](const auto& kv) { return kv.first.component == c; });
    }

    void ReflectionTable::validate() const
    {
        if (entries_.empty())
            throw IncompleteTableError("reflection table is empty");

        std::set<Component> all;
        for (const auto& [k, e] : entries_)
            all.insert(k.component);
        if (!all.count(Component::TE) && !all.count(Component::TM))
            throw IncompleteTableError("reflection table has neither TE nor TM entries");

        for (double f : frequencies())
            for (int s = 0; s <= 1; ++s)
            {
                std::set<Component> present;
                for (Component c : all)
                    if (entries_.count(Key{f, s, c}))
                        present.insert(c);
                if (present.empty())
                    throw IncompleteTableError("reflection table has no state " + std::to_string(s) + " rows at " +
                                               format_double(f) + " Hz");
                if (present != all)
                    throw IncompleteTableError("reflection table has an inconsistent component set at " +
                                               format_double(f) + " Hz, state " + std::to_string(s));
            }
    }

    namespace
    {
        const char* const table_header = "freq_hz,state,component,mag,phase_deg";

        // Quarter-turn phases map to exact axis values so real tables stay real
        complex polar_deg(double mag, double deg)
        {
            const double r = std::remainder(deg, 360.0);
            if (r == 0.0)
                return {mag, 0.0};
            if (r == 90.0)
                return {0.0, mag};
            if (r == -90.0)
                return {0.0, -mag};
            if (r == 180.0 || r == -180.0)
                return {-mag, 0.0};
            return std::polar(mag, deg2rad(deg));
        }

        double parse_number(std::string_view field, std::size_t row, const char* what)
        {
            double v = 0.0;
            auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v))
                throw TableParseError(row, std::string("invalid ") + what + " '" + std::string(field) + "'");
            return v;
        }
    }

    ReflectionTable load_reflection_table(std::istream& in)
    {
        ReflectionTable t;
        std::string line;
        std::size_t row = 0;
        bool have_prev = false;
        ReflectionTable::Key prev{};

        while (std::getline(in, line))
        {
            ++row;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (row == 1)
            {
                if (line != table_header)
                    throw TableParseError(1, std::string("expected header '") + table_header + "'");
                continue;
            }
            if (line.empty())
                throw TableParseError(row, "empty line");

            std::vector<std::string_view> f;
            std::string_view sv(line);
            for (std::size_t pos = 0;;)
            {
                auto comma = sv.find(',', pos);
                f.push_back(sv.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
                if (comma == std::string_view::npos)
                    break;
                pos = comma + 1;
            }
            if (f.size() != 5)
                throw TableParseError(row, "expected 5 fields, found " + std::to_string(f.size()));

            const double hz = parse_number(f[0], row, "freq_hz");
            if (!(hz > 0.0))
                throw TableParseError(row, "freq_hz must be > 0");
            int state = 0;
            if (f[1] == "0")
                state = 0;
            else if (f[1] == "1")
                state = 1;
            else
                throw TableParseError(row, "state must be 0 or 1");
            Component comp;
            try
            {
                comp = component_from_string(f[2]);
            }
            catch (const std::invalid_argument&)
            {
                throw TableParseError(row, "unknown component '" + std::string(f[2]) + "'");
            }
            const double mag = parse_number(f[3], row, "mag");
            if (mag < 0.0)
                throw TableParseError(row, "mag must be >= 0 (linear scale)");
            const double ph = parse_number(f[4], row, "phase_deg");

            ReflectionTable::Key key{hz, state, comp};
            if (have_prev)
            {
                if (key == prev)
                    throw TableParseError(row, "duplicate entry");
                if (key < prev)
                    throw TableParseError(row, "rows not sorted by (freq_hz, state, component)");
            }
            prev = key;
            have_prev = true;

            auto ft = t.freq_text_.find(hz);
            if (ft == t.freq_text_.end())
                t.freq_text_.emplace(hz, std::string(f[0]));
            else if (ft->second != f[0])
                throw TableParseError(row, "frequency spelled differently from earlier rows");
            t.entries_.emplace(key, ReflectionTable::Entry{mag, ph, std::string(f[3]), std::string(f[4])});
        }
        if (row == 0)
            throw TableParseError(0, "missing header");
        t.validate();
        return t;
    }

    ReflectionTable load_reflection_table(const std::string& text)
    {
        std::istringstream in(text);
        return load_reflection_table(in);
    }

    std::string save_reflection_table(const ReflectionTable& table)
    {
        std::string out = table_header;
        out += '\n';
        for (const auto& [k, e] : table.entries())
        {
            out += table.frequency_text(k.freq_hz);
            out += ',';
            out += std::to_string(k.state);
            out += ',';
            out += to_string(k.component);
            out += ',';
            out += e.mag_text;
            out += ',';
            out += e.phase_text;
            out += '\n';
        }
        return out;
    }

    // ---- TabulatedProvider ------------------------------------------------------------------

    TabulatedProvider::TabulatedProvider(ReflectionTable table) : table_(std::move(table))
    {
        table_.validate();
        freqs_ = table_.frequencies();
    }

    std::pair<double, double> TabulatedProvider::band() const
    {
        return {freqs_.front(), freqs_.back()};
    }

    void TabulatedProvider::check_incidence(const IncidentWave& wave) const
    {
        const Vec3 a = table_.incidence.unit_vector(), b = wave.direction.unit_vector();
        if (1.0 - dot(a, b) > 1e-12)
        {
            {
                std::lock_guard<std::mutex> lock(warned_->mutex);
                if (!warned_->seen.emplace(wave.direction.theta(), wave.direction.phi()).second)
                    return;
            }
            std::ostringstream msg;
            msg << "tabulated reflection data computed for incidence (theta, phi) = ("
                << rad2deg(table_.incidence.theta()) << ", " << rad2deg(table_.incidence.phi())
                << ") deg reused at (" << rad2deg(wave.direction.theta()) << ", " << rad2deg(wave.direction.phi())
                << ") deg";
            warn(msg.str());
        }
    }

    const ReflectionTable::Entry* TabulatedProvider::exact(double hz, int state, Component c) const
    {
        auto it = std::lower_bound(freqs_.begin(), freqs_.end(), hz);
        const double tol = 1e-12 * freqs_.back();
        double f = 0.0;
        if (it != freqs_.end() && std::abs(*it - hz) <= tol)
            f = *it;
        else if (it != freqs_.begin() && std::abs(*(it - 1) - hz) <= tol)
            f = *(it - 1);
        else
            return nullptr;
        auto e = table_.entries().find(ReflectionTable::Key{f, state, c});
        return e == table_.entries().end() ? nullptr : &e->second;
    }

    complex TabulatedProvider::lookup(double hz, int state, Component c) const
    {
        if (!table_.has_component(c))
            return {};  // components absent from the file are zero

        auto value = [&](double f)
        {
            const auto& e = table_.entries().at(ReflectionTable::Key{f, state, c});
            return polar_deg(e.mag, e.phase_deg);
        };

        if (const auto* e = exact(hz, state, c))
            return polar_deg(e->mag, e->phase_deg);

        auto hi = std::upper_bound(freqs_.begin(), freqs_.end(), hz);
        auto lo = hi - 1;
        if (table_.interpolation == Interpolation::NearestFrequency)
        {
            // ties go to the lower sample
            return (hz - *lo <= *hi - hz) ? value(*lo) : value(*hi);
        }
        const double t = (hz - *lo) / (*hi - *lo);
        return value(*lo) * (1.0 - t) + value(*hi) * t;
    }

    ReflectionTensor TabulatedProvider::evaluate(const MetaAtomGeometry&, AtomState s, const IncidentWave& wave) const
    {
        const double hz = wave.freq.hz();
        if (!in_band(hz))
            throw OutOfBandError("frequency " + format_double(hz) + " Hz outside tabulated band [" +
                                 format_double(freqs_.front()) + ", " + format_double(freqs_.back()) + "] Hz");
        check_incidence(wave);
        const int st = to_int(s);
        ReflectionTensor t;
        t.te = lookup(hz, st, Component::TE);
        t.tm = lookup(hz, st, Component::TM);
        t.te_tm = lookup(hz, st, Component::TETM);
        t.tm_te = lookup(hz, st, Component::TMTE);
        return t;
    }

    PolarValue TabulatedProvider::polar(const MetaAtomGeometry& g, AtomState s, const IncidentWave& wave, Component c) const
    {
        if (in_band(wave.freq.hz()))
            if (const auto* e = exact(wave.freq.hz(), to_int(s), c))
            {
                check_incidence(wave);
                return {e->mag, e->phase_deg};
            }
        return ReflectionProvider::polar(g, s, wave, c);
    }

    // ---- SurrogateProvider ------------------------------------------------------------------

    void Substrate::validate() const
    {
        if (!(eps_r > 0.0) || !std::isfinite(eps_r))
            throw std::invalid_argument("Substrate: eps_r must be finite and > 0");
        if (!(tan_delta >= 0.0) || !std::isfinite(tan_delta))
            throw std::invalid_argument("Substrate: tan_delta must be finite and >= 0");
        if (!(thickness > 0.0) || !std::isfinite(thickness))
            throw std::invalid_argument("Substrate: thickness must be finite and > 0");
    }

    SurrogateProvider::SurrogateProvider(Substrate substrate, FuseModel fuse, SurrogateCalibration calibration)
        : sub_(substrate), fuse_(fuse), cal_(calibration)
    {
        sub_.validate();
        fuse_.validate();
        if (!(cal_.grid_capacitance_scale > 0.0) || !(cal_.strip_width > 0.0) || !(cal_.metal_thickness >= 0.0))
            throw std::invalid_argument("SurrogateCalibration: scale and strip width must be > 0, thickness >= 0");
        if (!(cal_.f_min > 0.0) || !(cal_.f_max > cal_.f_min))
            throw std::invalid_argument("SurrogateCalibration: invalid validity band");
    }

    complex SurrogateProvider::slab_impedance(Frequency f, double theta, Polarization pol) const
    {
        // Shorted grounded slab seen from the top interface, Z = j eta_d' tan(k_z,d h)
        const double k0 = constants::two_pi * f.hz() / constants::c0;
        const complex ec = sub_.eps_r * complex(1.0, -sub_.tan_delta);
        const complex n = std::sqrt(ec);
        const double st = std::sin(theta);
        const complex cos_d = std::sqrt(1.0 - st * st / ec);
        const complex eta_d = constants::eta0 / n;
        const complex t = std::tan(k0 * n * cos_d * sub_.thickness);
        const complex eta_pol = pol == Polarization::TE ? eta_d / cos_d : eta_d * cos_d;
        return complex(0.0, 1.0) * eta_pol * t;
    }

    complex SurrogateProvider::grid_impedance(Frequency f, const MetaAtomGeometry& g) const
    {
        // Capacitive patch grid, C = kappa eps0 (eps_r + 1)/2 (2D/pi) ln(1/sin(pi (D - a) / (2D)))
        const double D = g.value("cell_spacing");
        const double a = g.value("patch_edge");
        if (!(a > 0.0) || !(a < D))
            throw std::invalid_argument("SurrogateProvider: patch_edge must lie in (0, cell_spacing)");
        const double c = cal_.grid_capacitance_scale * constants::eps0 * 0.5 * (sub_.eps_r + 1.0) *
                         (2.0 * D / constants::pi) * std::log(1.0 / std::sin(constants::pi * (D - a) / (2.0 * D)));
        return 1.0 / complex(0.0, f.omega() * c);
    }

    double SurrogateProvider::via_inductance(const MetaAtomGeometry& g) const
    {
        // Cylindrical via through the substrate
        const double r = g.value("pin_radius");
        const double h = sub_.thickness;
        const double rh = std::sqrt(r * r + h * h);
        return constants::mu0 / constants::two_pi * (h * std::log((h + rh) / r) + 1.5 * (r - rh));
    }

    double SurrogateProvider::strip_inductance(const MetaAtomGeometry& g) const
    {
        // Flat rectangular strip feeding the fuse
        const double len = g.value("microstrip_length");
        const double wt = cal_.strip_width + cal_.metal_thickness;
        return constants::mu0 / constants::two_pi * len * (std::log(2.0 * len / wt) + 0.5 + 0.2235 * wt / len);
    }

    std::optional<complex> SurrogateProvider::branch_impedance(Frequency f, const MetaAtomGeometry& g, AtomState s) const
    {
        double r = 0.0, l = 0.0;
        if (s == AtomState::Intact)
        {
            r = fuse_.intact_resistance;
            l = fuse_.intact_inductance;
        }
        else if (fuse_.broken_branch == BrokenBranch::Residual)
        {
            r = fuse_.residual_resistance;
            l = fuse_.residual_inductance;
        }
        else
            return std::nullopt;
        return complex(r, f.omega() * (l + via_inductance(g) + strip_inductance(g)));
    }

    complex SurrogateProvider::surface_impedance(Frequency f, double theta, Polarization pol, const MetaAtomGeometry& g,
                                                 AtomState s) const
    {
        complex y = 1.0 / slab_impedance(f, theta, pol) + 1.0 / grid_impedance(f, g);
        if (auto zb = branch_impedance(f, g, s))
            y += 1.0 / *zb;
        return 1.0 / y;
    }

    ReflectionTensor SurrogateProvider::evaluate(const MetaAtomGeometry& g, AtomState s, const IncidentWave& wave) const
    {
        const double hz = wave.freq.hz();
        if (!in_band(hz))
            throw OutOfBandError("frequency " + format_double(hz) + " Hz outside surrogate band [" +
                                 format_double(cal_.f_min) + ", " + format_double(cal_.f_max) + "] Hz");
        const double th = wave.direction.theta();
        const double ct = std::cos(th);
        auto gamma = [&](Polarization pol)
        {
            if (ct < 1e-12)
                return complex(pol == Polarization::TE ? -1.0 : 1.0, 0.0);  // grazing limit
            const complex zs = surface_impedance(wave.freq, th, pol, g, s);
            const double eta_w = pol == Polarization::TE ? constants::eta0 / ct : constants::eta0 * ct;
            return (zs - eta_w) / (zs + eta_w);
        };
        ReflectionTensor t;
        t.te = gamma(Polarization::TE);
        t.tm = gamma(Polarization::TM);
        return t;
    }
}
