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

#ifndef EMSFORGE_REFLECTION_HPP
#define EMSFORGE_REFLECTION_HPP

#include "emsforge/core.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <mutex>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace emsforge
{
    // ---- Errors -----------------------------------------------------------------------------

    // A reflection table lacks a state (or component) that the query needs.
    class IncompleteTableError : public Error
    {
    public:
        using Error::Error;
    };

    // Malformed reflection-table text; row() is the 1-based line number (header = 1), 0 if unknown.
    class TableParseError : public Error
    {
    public:
        TableParseError(std::size_t row, const std::string& what);
        std::size_t row() const { return row_; }

    private:
        std::size_t row_;
    };

    // ---- Geometry ---------------------------------------------------------------------------

    /// One geometric descriptor. Tied descriptors (e.g. the two patch edges of a square cell)
    /// are stored once with multiplicity > 1.
    struct Descriptor
    {
        std::string name;
        double value = 0.0;
        std::string unit = "m";
        double lower = 0.0;
        double upper = 0.0;
        int multiplicity = 1;
    };

    class MetaAtomGeometry
    {
    public:
        MetaAtomGeometry() = default;
        explicit MetaAtomGeometry(std::vector<Descriptor> descriptors);

        /// Square patch cell at 5.5 GHz: patch_edge 13.95 mm (x2), pin_radius 0.3 mm,
        /// microstrip_length 3.71 mm, cell_spacing 24.5 mm (x2), bounds +/- bound_fraction.
        static MetaAtomGeometry default_cell(double bound_fraction = 0.25);

        std::size_t size() const { return d_.size(); }
        const Descriptor& operator[](std::size_t i) const { return d_.at(i); }
        const std::vector<Descriptor>& descriptors() const { return d_; }

        double value(const std::string& name) const;
        bool has(const std::string& name) const;

        std::vector<double> values() const;
        std::vector<double> lower_bounds() const;
        std::vector<double> upper_bounds() const;

        /// Copy with new values (one per stored descriptor); throws if any value leaves its bounds.
        MetaAtomGeometry with_values(const std::vector<double>& values) const;
        MetaAtomGeometry with_value(const std::string& name, double value) const;

    private:
        std::vector<Descriptor> d_;
        void validate() const;
    };

    // ---- Fuse and state ---------------------------------------------------------------------

    enum class AtomState : std::uint8_t
    {
        Burnt = 0,
        Intact = 1
    };

    inline int to_int(AtomState s) { return static_cast<int>(s); }
    AtomState atom_state_from_int(int s);

    enum class BrokenBranch
    {
        OpenCircuit,
        Residual
    };

    /// Lumped electrical model of the expendable fuse. Defaults are the measured intact values;
    /// a burnt fuse removes its branch unless a residual R/L is requested.
    struct FuseModel
    {
        double intact_resistance = 0.6;     // [ohm]
        double intact_inductance = 3.0e-9;  // [H]
        BrokenBranch broken_branch = BrokenBranch::OpenCircuit;
        double residual_resistance = 0.0;   // [ohm], used by BrokenBranch::Residual
        double residual_inductance = 0.0;   // [H]

        void validate() const;

        /// Series impedance R + j omega L of the intact fuse.
        complex intact_impedance(Frequency f) const;
    };

    // ---- Reflection tensor ------------------------------------------------------------------

    enum class Component
    {
        TE,
        TETM,
        TM,
        TMTE
    };

    std::string_view to_string(Component c);
    Component component_from_string(std::string_view s);

    struct ReflectionTensor
    {
        complex te{0.0, 0.0};
        complex tm{0.0, 0.0};
        complex te_tm{0.0, 0.0};
        complex tm_te{0.0, 0.0};

        complex get(Component c) const;
        complex co(Polarization pol) const { return pol == Polarization::TE ? te : tm; }
        bool diagonal() const { return te_tm == complex{} && tm_te == complex{}; }
    };

    /// Magnitude (linear) and phase (degrees) of one tensor entry.
    struct PolarValue
    {
        double mag = 0.0;
        double phase_deg = 0.0;
    };

    class ReflectionProvider
    {
    public:
        virtual ~ReflectionProvider() = default;

        /// Full tensor for geometry g, state s and illumination wave. Throws OutOfBandError
        /// outside band().
        virtual ReflectionTensor evaluate(const MetaAtomGeometry& g, AtomState s, const IncidentWave& wave) const = 0;

        /// Closed validity band [f_min, f_max] in Hz.
        virtual std::pair<double, double> band() const = 0;

        /// True when the geometry is ignored (nothing to optimize).
        virtual bool is_tabulated() const { return false; }

        /// Polar form of one entry. Tabulated providers return the stored numbers unchanged at
        /// sample frequencies so exports reproduce the input file.
        virtual PolarValue polar(const MetaAtomGeometry& g, AtomState s, const IncidentWave& wave, Component c) const;

        bool in_band(double hz) const;
    };

    // ---- Tabulated data ---------------------------------------------------------------------

    enum class Interpolation
    {
        NearestFrequency,
        LinearComplex
    };

    /// Reflection samples keyed by (frequency, state, component). Field texts are kept next to
    /// the parsed values so that save(load(x)) reproduces x byte for byte.
    class ReflectionTable
    {
    public:
        struct Entry
        {
            double mag = 0.0;
            double phase_deg = 0.0;
            std::string mag_text;
            std::string phase_text;
        };

        struct Key
        {
            double freq_hz;
            int state;
            Component component;
            auto operator<=>(const Key&) const = default;
        };

        ReflectionTable() = default;

        /// Adds or replaces an entry; texts are generated from the values.
        void set(double freq_hz, AtomState s, Component c, double mag, double phase_deg);

        const std::map<Key, Entry>& entries() const { return entries_; }
        std::vector<double> frequencies() const;
        const std::string& frequency_text(double hz) const;
        bool has_component(Component c) const;

        Direction incidence;  // direction the samples were computed for
        Interpolation interpolation = Interpolation::NearestFrequency;

        /// Checks both states present at every frequency and the same component set everywhere.
        void validate() const;

    private:
        friend ReflectionTable load_reflection_table(std::istream& in);
        std::map<Key, Entry> entries_;
        std::map<double, std::string> freq_text_;
    };

    /// Parses the CSV form `freq_hz,state,component,mag,phase_deg`.
    ReflectionTable load_reflection_table(std::istream& in);
    ReflectionTable load_reflection_table(const std::string& text);
    std::string save_reflection_table(const ReflectionTable& table);

    class TabulatedProvider : public ReflectionProvider
    {
    public:
        explicit TabulatedProvider(ReflectionTable table);

        ReflectionTensor evaluate(const MetaAtomGeometry& g, AtomState s, const IncidentWave& wave) const override;
        std::pair<double, double> band() const override;
        bool is_tabulated() const override { return true; }
        PolarValue polar(const MetaAtomGeometry& g, AtomState s, const IncidentWave& wave, Component c) const override;

        const ReflectionTable& table() const { return table_; }

    private:
        ReflectionTable table_;
        std::vector<double> freqs_;

        // Off-incidence reuse is reported once per direction
        struct WarnedSet
        {
            std::mutex mutex;
            std::set<std::pair<double, double>> seen;
        };
        std::shared_ptr<WarnedSet> warned_ = std::make_shared<WarnedSet>();

        void check_incidence(const IncidentWave& wave) const;
        complex lookup(double hz, int state, Component c) const;
        const ReflectionTable::Entry* exact(double hz, int state, Component c) const;
    };

    // ---- Lumped-circuit surrogate -----------------------------------------------------------

    struct Substrate
    {
        double eps_r = 3.66;
        double tan_delta = 4.0e-3;
        double thickness = 5.1e-4;  // [m]

        void validate() const;
    };

    /// Free parameters of the surrogate that are not geometric descriptors.
    struct SurrogateCalibration
    {
        double grid_capacitance_scale = 9.56;  // kappa, multiplies the patch-grid capacitance
        double strip_width = 0.5e-3;           // [m]
        double metal_thickness = 35.0e-6;      // [m]
        double f_min = 1.0e9;                  // validity band [Hz]
        double f_max = 20.0e9;
    };

    /// Grounded-patch cell with one fuse-switched shorting branch, modelled as the parallel
    /// combination of the shorted dielectric slab, the capacitive patch grid and the branch.
    ///
    /// Uses the descriptors patch_edge, pin_radius, microstrip_length and cell_spacing.
    class SurrogateProvider : public ReflectionProvider
    {
    public:
        SurrogateProvider(Substrate substrate = {}, FuseModel fuse = {}, SurrogateCalibration calibration = {});

        ReflectionTensor evaluate(const MetaAtomGeometry& g, AtomState s, const IncidentWave& wave) const override;
        std::pair<double, double> band() const override { return {cal_.f_min, cal_.f_max}; }

        const Substrate& substrate() const { return sub_; }
        const FuseModel& fuse() const { return fuse_; }
        const SurrogateCalibration& calibration() const { return cal_; }

        // Individual circuit elements, exposed for inspection and tests
        complex slab_impedance(Frequency f, double theta, Polarization pol) const;
        complex grid_impedance(Frequency f, const MetaAtomGeometry& g) const;
        double via_inductance(const MetaAtomGeometry& g) const;
        double strip_inductance(const MetaAtomGeometry& g) const;

        /// Series impedance of the shorting branch; empty when the branch is open.
        std::optional<complex> branch_impedance(Frequency f, const MetaAtomGeometry& g, AtomState s) const;

        complex surface_impedance(Frequency f, double theta, Polarization pol, const MetaAtomGeometry& g, AtomState s) const;

    private:
        Substrate sub_;
        FuseModel fuse_;
        SurrogateCalibration cal_;
    };
}

#endif
