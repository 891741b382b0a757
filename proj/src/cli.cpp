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

#include "emsforge/cli.hpp"
#include "emsforge/io.hpp"
#include "emsforge/util.hpp"

#include <cmath>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"

namespace emsforge
{
    using json = nlohmann::json;
    namespace fs = std::filesystem;

    ConfigError::ConfigError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field))
    {
    }

    EmsLayout RunConfig::layout() const
    {
        return layout(P, Q, wave.freq.hz());
    }

    EmsLayout RunConfig::layout(std::size_t p, std::size_t q, double freq_hz) const
    {
        const double lambda = constants::c0 / freq_hz;
        return EmsLayout(p, q, dx_absolute ? dx_m : dx_over_lambda * lambda, dy_absolute ? dy_m : dy_over_lambda * lambda);
    }

    // ---- Configuration parsing --------------------------------------------------------------

    namespace
    {
        const char* const schema_version = "ems-forge/1";

        // Typed access to one JSON object with dotted-path error messages
        class Node
        {
        public:
            Node(const json& j, std::string path) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    throw ConfigError(path_, "expected an object");
            }

            std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
            bool has(const std::string& key) const { return j_.contains(key); }

            std::vector<std::string> keys() const
            {
                std::vector<std::string> k;
                for (const auto& [key, v] : j_.items())
                    k.push_back(key);
                return k;
            }

            void allow(std::initializer_list<const char*> keys) const
            {
                std::set<std::string> ok(keys.begin(), keys.end());
                for (const auto& [k, v] : j_.items())
                    if (!ok.count(k))
                        throw ConfigError(field(k), "unknown key");
            }

            const json& raw(const std::string& key) const
            {
                if (!has(key))
                    throw ConfigError(field(key), "missing required field");
                return j_.at(key);
            }

            Node child(const std::string& key) const { return Node(raw(key), field(key)); }

            double number(const std::string& key) const
            {
                const auto& v = raw(key);
                if (!v.is_number())
                    throw ConfigError(field(key), "expected a number");
                const double x = v.get<double>();
                if (!std::isfinite(x))
                    throw ConfigError(field(key), "expected a finite number");
                return x;
            }

            double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

            double positive(const std::string& key, double fallback) const
            {
                const double x = number(key, fallback);
                if (!(x > 0.0))
                    throw ConfigError(field(key), "must be > 0");
                return x;
            }

            double non_negative(const std::string& key, double fallback) const
            {
                const double x = number(key, fallback);
                if (!(x >= 0.0))
                    throw ConfigError(field(key), "must be >= 0");
                return x;
            }

            std::size_t count(const std::string& key, std::size_t fallback, std::size_t min_value = 1) const
            {
                if (!has(key))
                    return fallback;
                const auto& v = raw(key);
                if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min_value))
                    throw ConfigError(field(key), "expected an integer >= " + std::to_string(min_value));
                return static_cast<std::size_t>(v.get<long long>());
            }

            std::string text(const std::string& key) const
            {
                const auto& v = raw(key);
                if (!v.is_string())
                    throw ConfigError(field(key), "expected a string");
                return v.get<std::string>();
            }

            std::string text(const std::string& key, const std::string& fallback) const
            {
                return has(key) ? text(key) : fallback;
            }

            double angle_deg(const std::string& key, double fallback, double lo, double hi) const
            {
                const double x = number(key, fallback);
                if (x < lo || x > hi)
                    throw ConfigError(field(key), "angle outside [" + format_double(lo) + ", " + format_double(hi) + "] deg");
                return x;
            }

        private:
            const json& j_;
            std::string path_;
        };

        IncidentWave parse_wave(const Node& n)
        {
            n.allow({"freq_hz", "theta_inc_deg", "phi_inc_deg", "pol", "e0", "phase0_deg"});
            const double f = n.positive("freq_hz", 5.5e9);
            const double th = n.angle_deg("theta_inc_deg", 0.0, -90.0, 90.0);
            const double ph = n.angle_deg("phi_inc_deg", 0.0, -360.0, 360.0);
            Polarization pol;
            try
            {
                pol = polarization_from_string(n.text("pol", "TM"));
            }
            catch (const std::invalid_argument& e)
            {
                throw ConfigError(n.field("pol"), e.what());
            }
            const double e0 = n.positive("e0", 1.0);
            const double phase0 = n.number("phase0_deg", 0.0);
            return IncidentWave(Frequency(f), Direction::from_degrees(th, ph), pol, e0, deg2rad(phase0));
        }

        MetaAtomGeometry parse_geometry(const Node& n)
        {
            n.allow({"bound_fraction", "descriptors"});
            auto g = MetaAtomGeometry::default_cell(n.non_negative("bound_fraction", 0.25));
            if (!n.has("descriptors"))
                return g;
            const Node d = n.child("descriptors");
            auto desc = g.descriptors();
            for (auto& x : desc)
            {
                if (!d.has(x.name))
                    continue;
                const Node e = d.child(x.name);
                e.allow({"value", "lower", "upper"});
                x.value = e.positive("value", x.value);
                x.lower = e.positive("lower", x.lower);
                x.upper = e.positive("upper", x.upper);
                if (!(x.lower <= x.value && x.value <= x.upper))
                    throw ConfigError(e.field("value"), "must lie within [lower, upper]");
            }
            for (const auto& k : d.keys())
                if (!g.has(k))
                    throw ConfigError(d.field(k), "unknown descriptor");
            return MetaAtomGeometry(desc);
        }

        std::shared_ptr<const ReflectionProvider> parse_provider(const Node& n, const fs::path& base, std::string& kind)
        {
            kind = n.text("kind");
            if (kind == "tabulated")
            {
                n.allow({"kind", "path", "interpolation", "incidence_theta_deg", "incidence_phi_deg"});
                fs::path p = n.text("path");
                if (p.is_relative())
                    p = base / p;
                if (!fs::exists(p))
                    throw ConfigError(n.field("path"), "file not found: " + p.string());
                ReflectionTable table;
                try
                {
                    table = load_reflection_table(read_text_file(p));
                }
                catch (const Error& e)
                {
                    throw ConfigError(n.field("path"), e.what());
                }
                const std::string mode = n.text("interpolation", "nearest");
                if (mode == "nearest")
                    table.interpolation = Interpolation::NearestFrequency;
                else if (mode == "linear")
                    table.interpolation = Interpolation::LinearComplex;
                else
                    throw ConfigError(n.field("interpolation"), "expected 'nearest' or 'linear'");
                table.incidence = Direction::from_degrees(n.angle_deg("incidence_theta_deg", 0.0, -90.0, 90.0),
                                                          n.angle_deg("incidence_phi_deg", 0.0, -360.0, 360.0));
                return std::make_shared<TabulatedProvider>(std::move(table));
            }
            if (kind == "surrogate")
            {
                n.allow({"kind", "substrate", "fuse", "calibration"});
                Substrate sub;
                if (n.has("substrate"))
                {
                    const Node s = n.child("substrate");
                    s.allow({"eps_r", "tan_delta", "thickness_m"});
                    sub.eps_r = s.positive("eps_r", sub.eps_r);
                    sub.tan_delta = s.non_negative("tan_delta", sub.tan_delta);
                    sub.thickness = s.positive("thickness_m", sub.thickness);
                }
                FuseModel fuse;
                if (n.has("fuse"))
                {
                    const Node f = n.child("fuse");
                    f.allow({"intact_resistance_ohm", "intact_inductance_h", "broken_branch", "residual_resistance_ohm",
                             "residual_inductance_h"});
                    fuse.intact_resistance = f.non_negative("intact_resistance_ohm", fuse.intact_resistance);
                    fuse.intact_inductance = f.non_negative("intact_inductance_h", fuse.intact_inductance);
                    const std::string b = f.text("broken_branch", "open");
                    if (b == "open")
                        fuse.broken_branch = BrokenBranch::OpenCircuit;
                    else if (b == "residual")
                        fuse.broken_branch = BrokenBranch::Residual;
                    else
                        throw ConfigError(f.field("broken_branch"), "expected 'open' or 'residual'");
                    fuse.residual_resistance = f.non_negative("residual_resistance_ohm", 0.0);
                    fuse.residual_inductance = f.non_negative("residual_inductance_h", 0.0);
                }
                SurrogateCalibration cal;
                if (n.has("calibration"))
                {
                    const Node c = n.child("calibration");
                    c.allow({"grid_capacitance_scale", "strip_width_m", "metal_thickness_m", "f_min_hz", "f_max_hz"});
                    cal.grid_capacitance_scale = c.positive("grid_capacitance_scale", cal.grid_capacitance_scale);
                    cal.strip_width = c.positive("strip_width_m", cal.strip_width);
                    cal.metal_thickness = c.non_negative("metal_thickness_m", cal.metal_thickness);
                    cal.f_min = c.positive("f_min_hz", cal.f_min);
                    cal.f_max = c.positive("f_max_hz", cal.f_max);
                    if (!(cal.f_max > cal.f_min))
                        throw ConfigError(c.field("f_max_hz"), "must exceed f_min_hz");
                }
                return std::make_shared<SurrogateProvider>(sub, fuse, cal);
            }
            throw ConfigError(n.field("kind"), "expected 'tabulated' or 'surrogate'");
        }

        SweepBlock parse_sweep(const Node& n)
        {
            n.allow({"kind", "values"});
            SweepBlock s;
            const std::string kind = n.text("kind");
            if (kind == "aperture")
                s.kind = SweepKind::Aperture;
            else if (kind == "incidence")
                s.kind = SweepKind::Incidence;
            else if (kind == "scan")
                s.kind = SweepKind::Scan;
            else
                throw ConfigError(n.field("kind"), "expected 'aperture', 'incidence' or 'scan'");

            const auto& v = n.raw("values");
            if (!v.is_array() || v.empty())
                throw ConfigError(n.field("values"), "expected a non-empty array");
            for (std::size_t i = 0; i < v.size(); ++i)
            {
                const std::string f = n.field("values") + "[" + std::to_string(i) + "]";
                std::vector<double> point;
                if (v[i].is_number())
                    point.push_back(v[i].get<double>());
                else if (v[i].is_array())
                    for (const auto& x : v[i])
                    {
                        if (!x.is_number())
                            throw ConfigError(f, "expected numbers");
                        point.push_back(x.get<double>());
                    }
                else
                    throw ConfigError(f, "expected a number or an array of numbers");

                switch (s.kind)
                {
                case SweepKind::Aperture:
                    if (point.empty() || point.size() > 2)
                        throw ConfigError(f, "expected P or [P, Q]");
                    for (double x : point)
                        if (!(x >= 1.0) || x != std::floor(x))
                            throw ConfigError(f, "panel sizes must be positive integers");
                    if (point.size() == 1)
                        point.push_back(point[0]);
                    break;
                case SweepKind::Incidence:
                    if (point.size() != 2)
                        throw ConfigError(f, "expected [theta_inc_deg, theta_refl_deg]");
                    for (double x : point)
                        if (std::abs(x) > 90.0)
                            throw ConfigError(f, "angles must lie in [-90, 90] deg");
                    break;
                case SweepKind::Scan:
                    if (point.size() != 1 || std::abs(point[0]) > 90.0)
                        throw ConfigError(f, "expected theta_refl_deg in [-90, 90]");
                    break;
                }
                s.values.push_back(point);
            }
            return s;
        }

        OptimizerBlock parse_optimizer(const Node& n)
        {
            n.allow({"beta1", "beta2", "magnitude_floor", "population", "max_iterations", "inertia", "cognitive", "social",
                     "stagnation_window", "stagnation_tol", "seed", "band_hz"});
            OptimizerBlock o;
            o.beta1 = n.non_negative("beta1", o.beta1);
            o.beta2 = n.non_negative("beta2", o.beta2);
            if (!(o.beta1 + o.beta2 > 0.0))
                throw ConfigError(n.field("beta1"), "beta1 + beta2 must be > 0");
            o.magnitude_floor = n.positive("magnitude_floor", o.magnitude_floor);
            auto& s = o.swarm;
            s.population = n.count("population", s.population, 2);
            s.max_iterations = n.count("max_iterations", s.max_iterations, 1);
            s.inertia = n.number("inertia", s.inertia);
            s.cognitive = n.number("cognitive", s.cognitive);
            s.social = n.number("social", s.social);
            s.stagnation_window = n.count("stagnation_window", s.stagnation_window, 1);
            s.stagnation_tol = n.non_negative("stagnation_tol", s.stagnation_tol);
            s.rng_seed = n.count("seed", s.rng_seed, 0);

            if (n.has("band_hz"))
            {
                const auto& b = n.raw("band_hz");
                if (b.is_array())
                {
                    for (const auto& x : b)
                    {
                        if (!x.is_number() || !(x.get<double>() > 0.0))
                            throw ConfigError(n.field("band_hz"), "expected positive frequencies");
                        o.band_hz.push_back(x.get<double>());
                    }
                }
                else
                {
                    const Node bn(b, n.field("band_hz"));
                    bn.allow({"start", "stop", "points"});
                    const double a = bn.positive("start", 0.0), z = bn.positive("stop", 0.0);
                    const std::size_t np = bn.count("points", 2, 1);
                    if (z < a)
                        throw ConfigError(bn.field("stop"), "must be >= start");
                    for (std::size_t i = 0; i < np; ++i)
                        {
                        // weighted form keeps integral endpoints on integral Hz values
                        const double m = static_cast<double>(np - 1), t = static_cast<double>(i);
                        o.band_hz.push_back(np == 1 ? a : (a * (m - t) + z * t) / m);
                    }
                }
                if (o.band_hz.empty())
                    throw ConfigError(n.field("band_hz"), "empty band");
            }
            return o;
        }
    }

    RunConfig parse_run_config(const std::string& text, const fs::path& base)
    {
        json root;
        try
        {
            root = json::parse(text);
        }
        catch (const json::parse_error& e)
        {
            throw ConfigError("", std::string("invalid JSON: ") + e.what());
        }
        const Node n(root, "");
        n.allow({"schema", "scenario", "wave", "layout", "provider", "geometry", "target", "grid", "sweep", "optimizer"});
        if (n.text("schema") != schema_version)
            throw ConfigError("schema", std::string("unsupported schema, expected '") + schema_version + "'");

        RunConfig c;
        c.scenario = n.text("scenario", "");
        static const json empty = json::object();
        c.wave = parse_wave(n.has("wave") ? n.child("wave") : Node(empty, "wave"));

        const Node l = n.child("layout");
        l.allow({"P", "Q", "dx_over_lambda", "dy_over_lambda", "dx_m", "dy_m"});
        c.P = l.count("P", 0);
        c.Q = l.count("Q", 0);
        if (!l.has("P"))
            throw ConfigError(l.field("P"), "missing required field");
        if (!l.has("Q"))
            throw ConfigError(l.field("Q"), "missing required field");
        c.dx_over_lambda = l.positive("dx_over_lambda", 0.45);
        c.dy_over_lambda = l.positive("dy_over_lambda", 0.45);
        c.dx_absolute = l.has("dx_m");
        c.dy_absolute = l.has("dy_m");
        c.dx_m = l.positive("dx_m", 1.0);
        c.dy_m = l.positive("dy_m", 1.0);

        c.provider = parse_provider(n.child("provider"), base, c.provider_kind);
        c.geometry = n.has("geometry") ? parse_geometry(n.child("geometry")) : MetaAtomGeometry::default_cell();

        if (n.has("target"))
        {
            const Node t = n.child("target");
            t.allow({"theta_refl_deg", "phi_refl_deg"});
            c.target = Direction::from_degrees(t.angle_deg("theta_refl_deg", 0.0, -90.0, 90.0),
                                               t.angle_deg("phi_refl_deg", 0.0, -360.0, 360.0));
            if (!t.has("theta_refl_deg"))
                throw ConfigError(t.field("theta_refl_deg"), "missing required field");
        }

        if (n.has("grid"))
        {
            const Node g = n.child("grid");
            g.allow({"phi_deg", "step_deg", "nu", "nv"});
            c.grid.phi_deg = g.angle_deg("phi_deg", 0.0, -360.0, 360.0);
            c.grid.step_deg = g.positive("step_deg", 0.25);
            if (c.grid.step_deg > 90.0)
                throw ConfigError(g.field("step_deg"), "must be <= 90");
            c.grid.nu = g.count("nu", 201, 2);
            c.grid.nv = g.count("nv", 201, 2);
        }

        if (n.has("sweep"))
            c.sweep = parse_sweep(n.child("sweep"));
        if (n.has("optimizer"))
            c.optimizer = parse_optimizer(n.child("optimizer"));

        if (!c.provider->in_band(c.wave.freq.hz()))
            throw ConfigError("wave.freq_hz", "outside the provider's validity band");
        return c;
    }

    RunConfig load_run_config(const fs::path& path)
    {
        std::string text;
        try
        {
            text = read_text_file(path);
        }
        catch (const Error& e)
        {
            throw ConfigError("--config", e.what());
        }
        return parse_run_config(text, path.parent_path());
    }

    // ---- Commands ---------------------------------------------------------------------------

    namespace
    {
        struct Options
        {
            fs::path config;
            fs::path out;
            bool compare_ideal = false;
            bool uv = false;
            std::optional<std::uint64_t> seed;
            std::optional<fs::path> states;
        };

        void put(const fs::path& dir, const std::string& name, const std::string& content)
        {
            write_file_atomic(dir / name, content);
        }

        Direction require_target(const RunConfig& c)
        {
            if (!c.target)
                throw ConfigError("target", "missing required block");
            return *c.target;
        }

        AngularGrid cut_grid(const RunConfig& c)
        {
            return AngularGrid::phi_cut_uniform(c.grid.phi_deg, c.grid.step_deg);
        }

        // Factorized path when it applies (TM, diagonal tensor), the general path otherwise
        FarFieldPattern evaluate_pattern(const PanelConfiguration& panel, const IncidentWave& wave, const AngularGrid& grid)
        {
            if (wave.polarization == Polarization::TM)
            {
                const auto g = evaluate_states(panel, wave);
                bool diagonal = true;
                for (const auto& t : g)
                    diagonal = diagonal && (!t || t->diagonal());
                if (diagonal)
                    return pattern_factorized(panel, wave, grid);
            }
            return pattern_general(panel, wave, grid);
        }

        int cmd_synthesize(const RunConfig& c, const Options& o)
        {
            const SynthesisSpec spec(require_target(c), c.wave, c.layout(), c.geometry, c.provider);
            const auto report = synthesize(spec);
            const auto& L = spec.layout;

            put(o.out, "states.csv", format_state_matrix(report.states));
            put(o.out, "report.json", synthesis_report_json(report, spec));
            put(o.out, "phase_ideal.csv", phase_map_csv(L.rows(), L.cols(), report.ideal_profile.xi));
            put(o.out, "phase_realized.csv", phase_map_csv(L.rows(), L.cols(), report.realized));
            put(o.out, "phase_residual.csv", phase_map_csv(L.rows(), L.cols(), report.residuals));

            const auto panel = make_panel(spec, report.states);
            auto emit = [&](const AngularGrid& grid, const std::string& name)
            {
                const auto f = pattern_factorized(panel, c.wave, grid);
                if (o.compare_ideal)
                {
                    const auto ideal = ideal_reference_pattern(spec, grid);
                    put(o.out, name, pattern_csv(f, {{"ideal", &ideal}}));
                }
                else
                    put(o.out, name, pattern_csv(f));
                return f;
            };
            const auto cut = emit(cut_grid(c), "pattern_cut.csv");
            put(o.out, "metrics.json", metrics_json(pattern_metrics(cut)));
            if (o.uv)
                emit(AngularGrid::uv_grid(c.grid.nu, c.grid.nv), "pattern_uv.csv");

            if (!std::isfinite(report.cost))
                warn("synthesized pattern vanishes in the target direction (infinite cost)");
            return exit_ok;
        }

        int cmd_pattern(const RunConfig& c, const Options& o)
        {
            const auto L = c.layout();
            StateMatrix states(L.rows(), L.cols(), AtomState::Intact);
            if (o.states)
            {
                try
                {
                    states = parse_state_matrix(read_text_file(*o.states));
                }
                catch (const std::exception& e)
                {
                    throw ConfigError("--states", e.what());
                }
                if (states.rows() != L.rows() || states.cols() != L.cols())
                    throw ConfigError("--states", "state matrix is " + std::to_string(states.rows()) + "x" +
                                                      std::to_string(states.cols()) + ", layout (P, Q) is " +
                                                      std::to_string(L.rows()) + "x" + std::to_string(L.cols()));
            }
            const PanelConfiguration panel(L, c.geometry, states, c.provider);

            auto emit = [&](const AngularGrid& grid, const std::string& name)
            {
                const auto f = evaluate_pattern(panel, c.wave, grid);
                if (o.compare_ideal)
                {
                    const SynthesisSpec spec(require_target(c), c.wave, L, c.geometry, c.provider);
                    const auto ideal = ideal_reference_pattern(spec, grid);
                    put(o.out, name, pattern_csv(f, {{"ideal", &ideal}}));
                }
                else
                    put(o.out, name, pattern_csv(f));
                return f;
            };
            const auto cut = emit(cut_grid(c), "pattern_cut.csv");
            put(o.out, "metrics.json", metrics_json(pattern_metrics(cut)));
            if (o.uv)
                emit(AngularGrid::uv_grid(c.grid.nu, c.grid.nv), "pattern_uv.csv");
            return exit_ok;
        }

        std::string csv_number(double x)
        {
            return std::isfinite(x) ? format_double(x) : std::string();
        }

        int cmd_sweep(const RunConfig& c, const Options& o)
        {
            if (!c.sweep)
                throw ConfigError("sweep", "missing required block");
            const auto& sw = *c.sweep;
            const double phi_plane = deg2rad(c.grid.phi_deg);
            const auto grid = cut_grid(c);

            std::string summary = "sweep_value,peak_theta_deg,peak_db,hpbw_deg,second_lobe_theta_deg,second_lobe_db\n";
            for (std::size_t i = 0; i < sw.values.size(); ++i)
            {
                const auto& v = sw.values[i];
                IncidentWave wave = c.wave;
                std::size_t P = c.P, Q = c.Q;
                Direction target;
                std::string label;
                switch (sw.kind)
                {
                case SweepKind::Aperture:
                    P = static_cast<std::size_t>(v[0]);
                    Q = static_cast<std::size_t>(v[1]);
                    target = require_target(c);
                    label = P == Q ? std::to_string(P) : std::to_string(P) + "x" + std::to_string(Q);
                    break;
                case SweepKind::Incidence:
                    wave.direction = Direction::from_signed_cut(deg2rad(v[0]), phi_plane);
                    target = Direction::from_signed_cut(deg2rad(v[1]), phi_plane);
                    label = format_double(v[0]) + ":" + format_double(v[1]);
                    break;
                case SweepKind::Scan:
                    target = Direction::from_signed_cut(deg2rad(v[0]), phi_plane);
                    label = format_double(v[0]);
                    break;
                }

                const SynthesisSpec spec(target, wave, c.layout(P, Q, wave.freq.hz()), c.geometry, c.provider);
                const auto report = synthesize(spec);
                const auto f = pattern_factorized(make_panel(spec, report.states), wave, grid);
                if (o.compare_ideal)
                {
                    const auto ideal = ideal_reference_pattern(spec, grid);
                    put(o.out, "pattern_" + std::to_string(i) + ".csv", pattern_csv(f, {{"ideal", &ideal}}));
                }
                else
                    put(o.out, "pattern_" + std::to_string(i) + ".csv", pattern_csv(f));

                const auto m = pattern_metrics(f);
                const double peak_db = 10.0 * std::log10(m.peak_value);
                summary += label + ',' + format_double(m.peak_theta_deg) + ',' + format_double(peak_db) + ',' +
                           csv_number(m.hpbw_deg) + ',';
                if (m.lobes.empty())
                    summary += ",\n";
                else
                    summary += format_double(m.lobes[0].theta_deg) + ',' + format_double(peak_db + m.lobes[0].level_db) + '\n';
            }
            put(o.out, "summary.csv", summary);
            return exit_ok;
        }

        int cmd_design_atom(const RunConfig& c, const Options& o)
        {
            if (!c.optimizer)
                throw ConfigError("optimizer", "missing required block");
            if (c.provider->is_tabulated())
                throw UnsupportedOperation("design-atom needs a surrogate provider: a tabulated provider does not depend on the geometry");
            auto opt = *c.optimizer;
            if (o.seed)
                opt.swarm.rng_seed = *o.seed;

            const MadCostConfig cost(c.wave, c.provider, opt.beta1, opt.beta2, opt.magnitude_floor);
            const auto result = design_meta_atom(c.geometry, cost, opt.swarm);
            put(o.out, "mad_result.json", mad_result_json(result));

            const auto band = opt.band_hz.empty() ? std::vector<double>{c.wave.freq.hz()} : opt.band_hz;
            put(o.out, "frequency_response.csv",
                frequency_response_csv(frequency_response(result.g_opt, *c.provider, c.wave, band)));
            return exit_ok;
        }
    }

    int run_cli(int argc, const char* const* argv)
    {
        CLI::App app{"Synthesis and analysis of one-time-programmable electromagnetic skins", "ems-forge"};
        app.require_subcommand(1);

        Options o;
        std::uint64_t seed = 0;
        std::string states;
        auto add_common = [&](CLI::App* sub)
        {
            sub->add_option("--config", o.config, "JSON run configuration")->required();
            sub->add_option("--out", o.out, "Output directory")->required();
            sub->add_flag("--compare-ideal", o.compare_ideal, "Add the ideal continuous-phase reference columns");
            sub->add_flag("--uv", o.uv, "Also export a uv-plane map");
            sub->add_option("--seed", seed, "Override the optimizer seed");
        };
        auto* syn = app.add_subcommand("synthesize", "Synthesize the fuse state matrix for a target direction");
        auto* pat = app.add_subcommand("pattern", "Evaluate the far-field pattern of a state matrix");
        auto* swp = app.add_subcommand("sweep", "Run an aperture, incidence or scan sweep");
        auto* des = app.add_subcommand("design-atom", "Optimize the meta-atom descriptors");
        for (auto* s : {syn, pat, swp, des})
            add_common(s);
        pat->add_option("--states", states, "State matrix CSV (default: all intact)");

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::Success& e)
        {
            return app.exit(e);
        }
        catch (const CLI::ParseError& e)
        {
            app.exit(e);
            return exit_config;
        }
        for (auto* s : {syn, pat, swp, des})
            if (s->count("--seed"))
                o.seed = seed;
        if (!states.empty())
            o.states = fs::path(states);

        try
        {
            const RunConfig cfg = load_run_config(o.config);
            std::error_code ec;
            fs::create_directories(o.out, ec);
            if (ec || !fs::is_directory(o.out))
                throw ConfigError("--out", "cannot create output directory '" + o.out.string() + "'");

            if (syn->parsed())
                return cmd_synthesize(cfg, o);
            if (pat->parsed())
                return cmd_pattern(cfg, o);
            if (swp->parsed())
                return cmd_sweep(cfg, o);
            return cmd_design_atom(cfg, o);
        }
        catch (const ConfigError& e)
        {
            std::cerr << "ems-forge: configuration error: " << e.what() << '\n';
            return exit_config;
        }
        catch (const OutOfBandError& e)
        {
            std::cerr << "ems-forge: configuration error: " << e.what() << '\n';
            return exit_config;
        }
        catch (const UnsupportedOperation& e)
        {
            std::cerr << "ems-forge: unsupported: " << e.what() << '\n';
            return exit_unsupported;
        }
        catch (const std::invalid_argument& e)
        {
            std::cerr << "ems-forge: configuration error: " << e.what() << '\n';
            return exit_config;
        }
        catch (const NumericalError& e)
        {
            std::cerr << "ems-forge: numerical failure: " << e.what() << '\n';
            return exit_numerical;
        }
        catch (const std::exception& e)
        {
            std::cerr << "ems-forge: error: " << e.what() << '\n';
            return exit_numerical;
        }
    }
}
