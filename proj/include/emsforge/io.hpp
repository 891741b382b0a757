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

#ifndef EMSFORGE_IO_HPP
#define EMSFORGE_IO_HPP

#include "emsforge/mad.hpp"
#include "emsforge/pattern.hpp"
#include "emsforge/synthesis.hpp"

#include <string>

namespace emsforge
{
    /// JSON with keys states, xi_deg, realized_deg, residual_deg, cost, burn_count, spec
    /// (arrays row-major), plus burn_sequence and warnings.
    std::string synthesis_report_json(const SynthesisReport& report, const SynthesisSpec& spec);

    /// JSON with keys g_opt (named descriptors), cost, history, termination, seed.
    std::string mad_result_json(const MadResult& result);

    /// JSON with the peak, half-power beamwidth and lobe list of a pattern.
    std::string metrics_json(const PatternMetrics& m);
}

#endif
