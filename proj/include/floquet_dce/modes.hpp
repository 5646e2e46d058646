#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "floquet_dce/dispersion.hpp"

namespace fdce {

struct AmplitudeRatios {
    cplx creation;      // <a,0|phibar> / <a*,1|phibar>, evaluated at the root
    cplx annihilation;  // <a*,1|phi> / <a,0|phi>
    bool decoupled = false;  // f0 = 0: the creation ratio is undefined
};

struct DegenerateModeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

AmplitudeRatios amplitude_ratios(const Root& root, const ReducedParams& rp);

// The creation member of the +- pair that `root` belongs to (root itself if it
// is a creation root, otherwise -z' on swapped sheets).
Root creation_partner(const Root& root, const ReducedParams& rp);

// <a*,1|phibar><a,0|phi> from the symplectic normalisation, zbar' = creation root.
cplx normalization_product(const Root& root, const ReducedParams& rp);

struct BandAmplitude {
    double k;
    cplx c_plus;   // b_k,0 amplitude per unit <a,0|phi>
    cplx c_minus;  // b_k*,1 amplitude per unit <a*,1|phi>
};

// Continuum kernels -g_k/(z'+wB'-cos k) and +g_k/(z'-wB'+cos k), g_k = g sin k/sqrt(pi).
// `on_cut` reports whether a kernel denominator vanished on the grid (lip value used).
std::vector<BandAmplitude> band_amplitudes(const Root& root, const ReducedParams& rp, const std::vector<double>& kgrid,
                                           bool* on_cut = nullptr);

struct ModeCoefficients {
    Root root;
    AmplitudeRatios ratios;
    cplx norm_product;
    std::vector<BandAmplitude> band;
    bool lip_flag = false;
};

ModeCoefficients mode_coefficients(const Root& root, const ReducedParams& rp, const std::vector<double>& kgrid);
nlohmann::json mode_to_json(const ModeCoefficients& m);
ModeCoefficients mode_from_json(const nlohmann::json& j);
void export_mode(const ModeCoefficients& m, const std::string& path);

std::vector<double> midpoint_kgrid(int n);

// Largest band amplitude relative to the cavity amplitude of the same mode.
double band_to_cavity_ratio(const ModeCoefficients& m);

}  // namespace fdce
