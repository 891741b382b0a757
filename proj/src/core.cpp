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

#include "emsforge/core.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>

namespace emsforge
{
    namespace
    {
        std::mutex warning_mutex;

        // function-local so that handlers installed during static initialization survive
        WarningHandler& warning_handler()
        {
            static WarningHandler handler;
            return handler;
        }
    }

    void set_warning_handler(WarningHandler handler)
    {
        std::lock_guard<std::mutex> lock(warning_mutex);
        warning_handler() = std::move(handler);
    }

    void warn(std::string_view message)
    {
        std::lock_guard<std::mutex> lock(warning_mutex);
        if (auto& h = warning_handler())
            h(message);
        else
            std::cerr << "warning: " << message << '\n';
    }

    double wrap_phase(double x)
    {
        if (!std::isfinite(x))
            throw std::invalid_argument("wrap_phase: non-finite phase");

        // std::remainder returns a value in [-pi, pi]; fold the closed lower end onto +pi
        double r = std::remainder(x, constants::two_pi);
        if (r <= -constants::pi)
            r += constants::two_pi;
        return r;
    }

    Frequency::Frequency(double hz) : hz_(hz)
    {
        if (!(hz > 0.0) || !std::isfinite(hz))
            throw std::invalid_argument("Frequency: value must be finite and > 0 Hz");
    }

    WaveEnvironment WaveEnvironment::free_space(Frequency f)
    {
        WaveEnvironment env{};
        env.wavenumber = constants::two_pi * f.hz() / constants::c0;
        env.impedance = constants::eta0;
        env.wavelength = constants::c0 / f.hz();
        return env;
    }

    Direction::Direction(double theta, double phi)
    {
        if (!std::isfinite(theta) || !std::isfinite(phi))
            throw std::invalid_argument("Direction: non-finite angle");
        if (theta < 0.0)
        {
            theta = -theta;
            phi += constants::pi;
        }
        if (theta > constants::pi / 2.0 + 1e-12)
            throw std::invalid_argument("Direction: theta outside [0, pi/2]");
        theta_ = std::min(theta, constants::pi / 2.0);
        phi = std::fmod(phi, constants::two_pi);
        if (phi < 0.0)
            phi += constants::two_pi;
        if (phi >= constants::two_pi)
            phi = 0.0;
        phi_ = phi;
    }

    Direction Direction::from_degrees(double theta_deg, double phi_deg)
    {
        return Direction(deg2rad(theta_deg), deg2rad(phi_deg));
    }

    Direction Direction::from_signed_cut(double theta_signed, double phi_plane)
    {
        if (std::abs(theta_signed) > constants::pi / 2.0 + 1e-12)
            throw std::invalid_argument("Direction: signed cut angle outside [-pi/2, pi/2]");
        return Direction(theta_signed, phi_plane);
    }

    double Direction::u() const { return std::sin(theta_) * std::cos(phi_); }
    double Direction::v() const { return std::sin(theta_) * std::sin(phi_); }

    Vec3 Direction::unit_vector() const
    {
        const double st = std::sin(theta_);
        return {st * std::cos(phi_), st * std::sin(phi_), std::cos(theta_)};
    }

    double Direction::signed_theta_in_plane(double phi_plane) const
    {
        // Projection of the transverse part onto the plane's in-plane axis
        const double along = u() * std::cos(phi_plane) + v() * std::sin(phi_plane);
        return along < 0.0 ? -theta_ : theta_;
    }

    std::string_view to_string(Polarization pol)
    {
        return pol == Polarization::TE ? "TE" : "TM";
    }

    Polarization polarization_from_string(std::string_view s)
    {
        if (s == "TE" || s == "te")
            return Polarization::TE;
        if (s == "TM" || s == "tm")
            return Polarization::TM;
        throw std::invalid_argument("unknown polarization '" + std::string(s) + "'");
    }

    IncidentWave::IncidentWave(Frequency f, Direction dir, Polarization pol, double e0, double phase)
        : freq(f), direction(dir), polarization(pol), amplitude_e0(e0), phase0(phase)
    {
        if (!(e0 > 0.0) || !std::isfinite(e0))
            throw std::invalid_argument("IncidentWave: amplitude must be finite and > 0");
        if (!std::isfinite(phase))
            throw std::invalid_argument("IncidentWave: non-finite phase");
    }

    EmsLayout::EmsLayout(std::size_t P, std::size_t Q, double dx, double dy) : P_(P), Q_(Q), dx_(dx), dy_(dy)
    {
        if (P == 0 || Q == 0)
            throw std::invalid_argument("EmsLayout: P and Q must be positive");
        if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy))
            throw std::invalid_argument("EmsLayout: cell spacings must be finite and > 0");
    }

    double EmsLayout::x(std::size_t p) const
    {
        return (static_cast<double>(p) - 0.5 * static_cast<double>(P_ - 1)) * dx_;
    }

    double EmsLayout::y(std::size_t q) const
    {
        return (static_cast<double>(q) - 0.5 * static_cast<double>(Q_ - 1)) * dy_;
    }

    Vec3 incident_wavevector(const IncidentWave& wave, const WaveEnvironment& env)
    {
        const Vec3 r = wave.direction.unit_vector();
        return {-env.wavenumber * r[0], -env.wavenumber * r[1], -env.wavenumber * r[2]};
    }

    complex incident_field_at(const IncidentWave& wave, const WaveEnvironment& env, double x, double y)
    {
        const Vec3 k = incident_wavevector(wave, env);
        const double phase = wave.phase0 - (k[0] * x + k[1] * y);
        return std::polar(wave.amplitude_e0, phase);
    }

    Vec3 polarization_vector(const IncidentWave& wave, Polarization pol)
    {
        const double th = wave.direction.theta(), ph = wave.direction.phi();
        if (pol == Polarization::TE)
            return {-std::sin(ph), std::cos(ph), 0.0};
        return {std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th)};
    }

    double sinc(double x)
    {
        if (std::abs(x) < 1e-8)
            return 1.0 - x * x / 6.0;
        return std::sin(x) / x;
    }
}
