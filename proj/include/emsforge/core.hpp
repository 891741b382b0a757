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

#ifndef EMSFORGE_CORE_HPP
#define EMSFORGE_CORE_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace emsforge
{
    using complex = std::complex<double>;
    using Vec3 = std::array<double, 3>;

    namespace constants
    {
        inline constexpr double pi = std::numbers::pi;
        inline constexpr double two_pi = 2.0 * std::numbers::pi;
        inline constexpr double c0 = 299792458.0;               // [m/s]
        inline constexpr double mu0 = 1.25663706212e-6;         // [H/m]
        inline constexpr double eps0 = 1.0 / (mu0 * c0 * c0);   // [F/m]
        inline constexpr double eta0 = mu0 * c0;                // [ohm], 376.730...
    }

    // ---- Errors -----------------------------------------------------------------------------

    // Base class of every error raised by the library.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Frequency outside the validity band of a reflection provider.
    class OutOfBandError : public Error
    {
    public:
        using Error::Error;
    };

    // The requested operation is not supported for the given inputs (e.g. TE illumination on a TM-only path).
    class UnsupportedOperation : public Error
    {
    public:
        using Error::Error;
    };

    // A computation produced no usable result (e.g. all-zero pattern).
    class NumericalError : public Error
    {
    public:
        using Error::Error;
    };

    // Non-fatal diagnostics are routed through a process-wide handler (stderr by default).
    using WarningHandler = std::function<void(std::string_view)>;
    void set_warning_handler(WarningHandler handler);
    void warn(std::string_view message);

    // ---- Angles and phases ------------------------------------------------------------------

    constexpr double deg2rad(double deg) { return deg * constants::pi / 180.0; }
    constexpr double rad2deg(double rad) { return rad * 180.0 / constants::pi; }

    /// Wraps a phase into (-pi, pi]. Throws std::invalid_argument for non-finite input.
    double wrap_phase(double x);

    // ---- Domain types -----------------------------------------------------------------------

    /// Strictly positive frequency in hertz.
    class Frequency
    {
    public:
        explicit Frequency(double hz);
        double hz() const { return hz_; }
        double omega() const { return constants::two_pi * hz_; }

    private:
        double hz_;
    };

    /// Free-space propagation constants at one frequency.
    struct WaveEnvironment
    {
        double wavenumber;  // k [rad/m]
        double impedance;   // eta [ohm]
        double wavelength;  // lambda [m]

        static WaveEnvironment free_space(Frequency f);
    };

    /// Direction in the canonical spherical form: theta in [0, pi/2], phi in [0, 2pi).
    ///
    /// Plane cuts use a signed theta in [-pi/2, pi/2] on a fixed plane phi; a negative
    /// theta maps to (|theta|, phi + pi).
    class Direction
    {
    public:
        Direction() = default;
        Direction(double theta, double phi);

        static Direction from_degrees(double theta_deg, double phi_deg);
        static Direction from_signed_cut(double theta_signed, double phi_plane);

        double theta() const { return theta_; }
        double phi() const { return phi_; }

        double u() const;  // sin(theta) cos(phi)
        double v() const;  // sin(theta) sin(phi)

        Vec3 unit_vector() const;

        // Signed angle of this direction measured in the plane phi_plane; only meaningful when
        // the direction lies in that plane (or at broadside).
        double signed_theta_in_plane(double phi_plane) const;

    private:
        double theta_ = 0.0;
        double phi_ = 0.0;
    };

    enum class Polarization
    {
        TE,
        TM
    };

    std::string_view to_string(Polarization pol);
    Polarization polarization_from_string(std::string_view s);

    /// Time-harmonic plane wave illuminating the panel from the z > 0 half-space.
    struct IncidentWave
    {
        Frequency freq{1.0};
        Direction direction;
        Polarization polarization = Polarization::TM;
        double amplitude_e0 = 1.0;  // [V/m]
        double phase0 = 0.0;        // [rad]

        IncidentWave(Frequency f, Direction dir, Polarization pol, double e0 = 1.0, double phase = 0.0);

        WaveEnvironment environment() const { return WaveEnvironment::free_space(freq); }
    };

    /// Regular P x Q arrangement of cells centred on the panel barycenter.
    ///
    /// Cells are indexed p = 0..P-1 along x and q = 0..Q-1 along y; the centre of cell (p, q) is
    /// x_p = (p - (P-1)/2) dx, y_q = (q - (Q-1)/2) dy.
    class EmsLayout
    {
    public:
        EmsLayout(std::size_t P, std::size_t Q, double dx, double dy);

        std::size_t rows() const { return P_; }
        std::size_t cols() const { return Q_; }
        std::size_t cell_count() const { return P_ * Q_; }
        double dx() const { return dx_; }
        double dy() const { return dy_; }

        double x(std::size_t p) const;
        double y(std::size_t q) const;
        std::size_t index(std::size_t p, std::size_t q) const { return p * Q_ + q; }

        double aperture_area() const { return static_cast<double>(P_ * Q_) * dx_ * dy_; }

    private:
        std::size_t P_;
        std::size_t Q_;
        double dx_;
        double dy_;
    };

    // ---- Incident field ---------------------------------------------------------------------

    /// Incident wave vector k_inc = -k (sin th cos ph, sin th sin ph, cos th).
    Vec3 incident_wavevector(const IncidentWave& wave, const WaveEnvironment& env);

    /// Complex incident field amplitude at a point of the z = 0 plane, E0 exp(j phase0) exp(-j k_inc . r).
    complex incident_field_at(const IncidentWave& wave, const WaveEnvironment& env, double x, double y);

    /// Unit vector of the incident electric field for the given polarization:
    /// TE -> phi_hat(phi_inc), TM -> theta_hat(theta_inc, phi_inc).
    Vec3 polarization_vector(const IncidentWave& wave, Polarization pol);

    inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

    /// sin(x)/x with sinc(0) = 1.
    double sinc(double x);
}

#endif
