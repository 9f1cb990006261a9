#pragma once

#include "quadtune/acoustics/directivity.hpp"
#include "quadtune/acoustics/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace quadtune::acoustics {

enum class EmissionMode { parametric, polynomial };

/// Second-order response surface per band in the normalized deviations
/// dz = zeta - zeta_ref and dw = (Omega - Omega_ref) / Omega_ref:
///   L = c0 + c1 dz + c2 dz^2 + c3 dw + c4 dw^2 + c5 dz dw   (vehicle-level, dB)
struct PolynomialEmission {
    double zeta_ref = 0.0;
    std::vector<std::array<double, 6>> coefficients;  // one row per band
};

/// Sound power emission of the vehicle at the reference hover condition,
/// scaled per rotor and with RPM.
struct EmissionModel {
    EmissionMode mode = EmissionMode::parametric;
    std::vector<double> centers;             // Hz
    std::vector<double> reference_spectrum;  // dB, whole vehicle at omega_ref hover
    double omega_ref_rpm = 2500.0;
    double rpm_exponent = 5.0;
    double single_rotor_offset_db = -6.0;
    double silence_floor_db = 0.0;
    DirectivityPattern directivity;          // parametric mode; empty means omnidirectional
    PolynomialEmission polynomial;

    void validate() const
    {
        if (centers.empty() || centers.size() != reference_spectrum.size())
            throw std::invalid_argument("emission: reference spectrum must have one level per band");
        for (std::size_t i = 1; i < centers.size(); ++i)
            if (!(centers[i] > centers[i - 1])) throw std::invalid_argument("emission: band centers must increase");
        for (double l : reference_spectrum)
            if (!std::isfinite(l)) throw std::invalid_argument("emission: reference spectrum must be finite");
        if (!(omega_ref_rpm > 0.0)) throw std::invalid_argument("emission: reference RPM must be > 0");
        directivity.validate(centers.size());
        if (mode == EmissionMode::polynomial && polynomial.coefficients.size() != centers.size())
            throw std::invalid_argument("emission: polynomial mode needs one coefficient row per band");
    }
};

/// Broadband hump centred on the blade-passing band at the reference speed,
/// rolling off 2.5 dB per band, normalized to `total_db` over the band set.
inline std::vector<double> default_reference_spectrum(const std::vector<double>& centers, double bpf_hz,
                                                      double total_db = 85.0)
{
    std::vector<double> l(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double bands_away = std::abs(10.0 * std::log10(centers[i] / bpf_hz));
        l[i] = -2.5 * bands_away - 0.05 * bands_away * bands_away;
    }
    const double shift = total_db - broadband(std::span<const double>(l));
    for (double& v : l) v += shift;
    return l;
}

inline EmissionModel default_emission_model(int blade_count = 2)
{
    EmissionModel m;
    m.centers = third_octave_centers();
    const double bpf = blade_count * m.omega_ref_rpm / 60.0;
    m.reference_spectrum = default_reference_spectrum(m.centers, bpf);
    m.directivity = default_directivity();
    return m;
}

/// Precomputes directivity normalizations so repeated spectrum queries are cheap.
class Emitter {
public:
    explicit Emitter(EmissionModel model) : model_(std::move(model))
    {
        model_.validate();
        if (!model_.directivity.empty())
            for (std::size_t b = 0; b < bands(); ++b) mean_.push_back(model_.directivity.spherical_mean(b));
        reference_broadband_ = broadband(std::span<const double>(model_.reference_spectrum));
        floor_broadband_ = model_.silence_floor_db + 10.0 * std::log10(static_cast<double>(bands()));
    }

    std::size_t bands() const noexcept { return model_.centers.size(); }
    const EmissionModel& model() const noexcept { return model_; }

    double directivity_db(std::size_t band, double zeta) const
    {
        if (model_.mode != EmissionMode::parametric || model_.directivity.empty()) return 0.0;
        return 10.0 * std::log10(model_.directivity.value(band, zeta) / mean_[band]);
    }

    /// One rotor's band levels without directivity (parametric) or at `zeta` (polynomial).
    void rotor_levels(double omega_rpm, double zeta, std::vector<double>& out) const
    {
        out.resize(bands());
        if (!(omega_rpm > 0.0)) {
            std::fill(out.begin(), out.end(), model_.silence_floor_db);
            return;
        }
        if (model_.mode == EmissionMode::parametric) {
            const double shift = model_.single_rotor_offset_db +
                                 10.0 * model_.rpm_exponent * std::log10(omega_rpm / model_.omega_ref_rpm);
            for (std::size_t b = 0; b < bands(); ++b) out[b] = model_.reference_spectrum[b] + shift;
        } else {
            const double dz = zeta - model_.polynomial.zeta_ref;
            const double dw = (omega_rpm - model_.omega_ref_rpm) / model_.omega_ref_rpm;
            for (std::size_t b = 0; b < bands(); ++b) {
                const auto& c = model_.polynomial.coefficients[b];
                out[b] = c[0] + c[1] * dz + c[2] * dz * dz + c[3] * dw + c[4] * dw * dw + c[5] * dz * dw +
                         model_.single_rotor_offset_db;
            }
        }
    }

    /// L_w(f, zeta, Omega) for one rotor.
    ThirdOctaveSpectrum rotor_spectrum(double omega_rpm, double zeta) const
    {
        ThirdOctaveSpectrum s{model_.centers, {}};
        rotor_levels(omega_rpm, zeta, s.levels);
        if (omega_rpm > 0.0)
            for (std::size_t b = 0; b < bands(); ++b) s.levels[b] += directivity_db(b, zeta);
        return s;
    }

    /// Band-wise power sum over the rotors at a common radiation angle.
    template <std::size_t N>
    void source_levels(const std::array<double, N>& rpm, double zeta, std::vector<double>& out) const
    {
        out.assign(bands(), 0.0);
        std::vector<double> one;
        std::vector<double> energy(bands(), 0.0);
        for (double w : rpm) {
            rotor_levels(w, zeta, one);
            for (std::size_t b = 0; b < bands(); ++b) energy[b] += std::pow(10.0, one[b] / 10.0);
        }
        for (std::size_t b = 0; b < bands(); ++b) out[b] = 10.0 * std::log10(energy[b]);
    }

    /// Broadband sound power of the rotors without directivity (the SWL series of the cost).
    template <std::size_t N>
    double source_broadband(const std::array<double, N>& rpm) const
    {
        if (model_.mode == EmissionMode::parametric) {
            double energy = 0.0;
            for (double w : rpm) {
                const double level = w > 0.0 ? reference_broadband_ + model_.single_rotor_offset_db +
                                                   10.0 * model_.rpm_exponent * std::log10(w / model_.omega_ref_rpm)
                                             : floor_broadband_;
                energy += std::pow(10.0, level / 10.0);
            }
            return 10.0 * std::log10(energy);
        }
        std::vector<double> levels;
        source_levels(rpm, model_.polynomial.zeta_ref, levels);
        return broadband(std::span<const double>(levels));
    }

private:
    EmissionModel model_;
    std::vector<double> mean_;
    double reference_broadband_ = 0.0;
    double floor_broadband_ = 0.0;
};

/// Single-rotor spectrum at speed omega (RPM) and radiation angle zeta (rad).
inline ThirdOctaveSpectrum emit_spectrum(const EmissionModel& model, double omega_rpm, double zeta)
{
    if (!(omega_rpm >= 0.0)) throw std::domain_error("emit_spectrum: omega must be >= 0");
    return Emitter(model).rotor_spectrum(omega_rpm, zeta);
}

} // namespace quadtune::acoustics
