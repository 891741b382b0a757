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

#ifndef EMSFORGE_CLI_HPP
#define EMSFORGE_CLI_HPP

#include "emsforge/mad.hpp"
#include "emsforge/synthesis.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace emsforge
{
    // Invalid run configuration; field() is the dotted path of the offending entry.
    class ConfigError : public Error
    {
    public:
        ConfigError(std::string field, const std::string& what);
        const std::string& field() const { return field_; }

    private:
        std::string field_;
    };

    enum ExitCode : int
    {
        exit_ok = 0,
        exit_config = 2,
        exit_unsupported = 3,
        exit_numerical = 4
    };

    enum class SweepKind
    {
        Aperture,
        Incidence,
        Scan
    };

    struct SweepBlock
    {
        SweepKind kind = SweepKind::Aperture;
        std::vector<std::vector<double>> values;  // one entry per sweep point
    };

    struct OptimizerBlock
    {
        double beta1 = 1.0;
        double beta2 = 0.1;
        double magnitude_floor = 1e-6;
        SwarmConfig swarm;
        std::vector<double> band_hz;  // frequency-response samples
    };

    struct GridBlock
    {
        double phi_deg = 0.0;
        double step_deg = 0.25;
        std::size_t nu = 201;
        std::size_t nv = 201;
    };

    struct RunConfig
    {
        std::string scenario;
        IncidentWave wave{Frequency(5.5e9), Direction(), Polarization::TM};
        std::size_t P = 1, Q = 1;
        double dx_m = 0.0, dy_m = 0.0;
        double dx_over_lambda = 0.45, dy_over_lambda = 0.45;
        bool dx_absolute = false, dy_absolute = false;
        std::string provider_kind;
        std::shared_ptr<const ReflectionProvider> provider;
        MetaAtomGeometry geometry;
        std::optional<Direction> target;
        GridBlock grid;
        std::optional<SweepBlock> sweep;
        std::optional<OptimizerBlock> optimizer;

        EmsLayout layout() const;
        EmsLayout layout(std::size_t P, std::size_t Q, double freq_hz) const;
    };

    /// Parses and validates a JSON run configuration; relative paths resolve against the
    /// configuration file's directory. Throws ConfigError.
    RunConfig load_run_config(const std::filesystem::path& path);
    RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);

    /// Entry point of the ems-forge command; returns the process exit code.
    int run_cli(int argc, const char* const* argv);
}

#endif
