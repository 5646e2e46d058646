#include "floquet_dce/model.hpp"

#include <cmath>
#include <string>

namespace fdce {

namespace {
void require(bool ok, const char* what)
{
    if (!ok) throw std::invalid_argument(std::string("invalid parameters: ") + what);
}
}  // namespace

void validate(const ModelParams& p)
{
    require(std::isfinite(p.omega0) && std::isfinite(p.Omega) && std::isfinite(p.omegaB) &&
                std::isfinite(p.theta) && std::isfinite(p.f0) && std::isfinite(p.g) &&
                std::isfinite(p.B),
            "non-finite value");
    require(p.B > 0, "B must be > 0");
    require(p.f0 >= 0, "f0 must be >= 0");
    require(p.g >= 0, "g must be >= 0");
}

void validate(const ReducedParams& rp)
{
    require(std::isfinite(rp.omega0p) && std::isfinite(rp.omegaBp) && std::isfinite(rp.f0) &&
                std::isfinite(rp.g) && std::isfinite(rp.B),
            "non-finite value");
    require(rp.B > 0, "B must be > 0");
    require(rp.f0 >= 0, "f0 must be >= 0");
    require(rp.g >= 0, "g must be >= 0");
}

ReducedParams reduce(const ModelParams& p)
{
    validate(p);
    ReducedParams rp;
    rp.omega0p = (p.omega0 - 0.5 * p.Omega) / p.B;
    rp.omegaBp = (p.omegaB - 0.5 * p.Omega) / p.B;
    rp.f0 = p.f0 / p.B;
    rp.g = p.g;  // dimensionless
    rp.B = p.B;
    return rp;
}

ModelParams expand(const ReducedParams& rp, double Omega, double theta)
{
    ModelParams p;
    p.B = rp.B;
    p.Omega = Omega;
    p.theta = theta;
    p.omega0 = rp.omega0p * rp.B + 0.5 * Omega;
    p.omegaB = rp.omegaBp * rp.B + 0.5 * Omega;
    p.f0 = rp.f0 * rp.B;
    p.g = rp.g;
    return p;
}

ValidityReport check_rotating_frame_validity(const ModelParams& p, double threshold)
{
    validate(p);
    ValidityReport r;
    r.threshold = threshold;
    if (p.f0 == 0.0) return r;  // undriven: trivially valid
    r.ratio = (p.Omega - 2.0 * p.B) / p.f0;
    r.pass = r.ratio > threshold;
    return r;
}

}  // namespace fdce
