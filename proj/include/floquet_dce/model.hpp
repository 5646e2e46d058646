#pragma once

#include <limits>
#include <numbers>
#include <stdexcept>

namespace fdce {

// Lab-frame parameters of the driven cavity + semi-infinite tight-binding band.
// Frequencies in the same (arbitrary) unit as B.
struct ModelParams {
    double omega0 = 1.0;   // cavity frequency
    double Omega = 2.0;    // drive frequency
    double f0 = 0.2;       // drive amplitude
    double theta = 0.0;    // drive phase, only used by the time-domain oracle
    double omegaB = 1.0;   // band centre
    double B = 1.0;        // half bandwidth
    double g = 1.0 / std::numbers::pi;
};

// Frame-shifted parameters in units of B.
struct ReducedParams {
    double omega0p = 0.0;  // (omega0 - Omega/2) / B
    double omegaBp = 0.0;  // (omegaB - Omega/2) / B
    double f0 = 0.2;       // f0 / B
    double g = 1.0 / std::numbers::pi;
    double B = 1.0;        // original bandwidth, kept for reconstruction
};

void validate(const ModelParams& p);
void validate(const ReducedParams& rp);

ReducedParams reduce(const ModelParams& p);

// Inverse of reduce for a given drive frequency (lab frame, original units).
ModelParams expand(const ReducedParams& rp, double Omega, double theta = 0.0);

struct ValidityReport {
    double ratio = std::numeric_limits<double>::infinity();  // (Omega - 2B)/f0
    double threshold = 10.0;
    bool pass = true;
};

ValidityReport check_rotating_frame_validity(const ModelParams& p, double threshold = 10.0);

}  // namespace fdce
