#include "floquet_dce/modes.hpp"

#include <cmath>
#include <numbers>

#include "floquet_dce/io.hpp"

namespace fdce {

AmplitudeRatios amplitude_ratios(const Root& root, const ReducedParams& rp)
{
    const cplx i(0, 1);
    const cplx F2 = factor_minus(root.z, rp, root.sheets);
    AmplitudeRatios r;
    if (rp.f0 == 0.0) {
        r.decoupled = true;
        r.creation = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
        r.annihilation = 0.0;
        return r;
    }
    r.creation = F2 / (-i * rp.f0);
    r.annihilation = -i * rp.f0 / F2;
    return r;
}

Root creation_partner(const Root& root, const ReducedParams& rp)
{
    if (root.kind == ModeKind::creation) return root;
    Root p = classify(-root.z, swap(root.sheets), rp);
    p.kind = ModeKind::creation;
    return p;
}

cplx normalization_product(const Root& root, const ReducedParams& rp)
{
    const Root zb = creation_partner(root, rp);
    const cplx z = zb.z;
    const cplx F1 = factor_plus(z, rp, zb.sheets), F2 = factor_minus(z, rp, zb.sheets);
    const cplx dm = sigma_derivative(z - rp.omegaBp, rp.g, zb.sheets.minus);
    const cplx dp = sigma_derivative(z + rp.omegaBp, rp.g, zb.sheets.plus);
    if (std::abs(F1) == 0.0) throw DegenerateModeError("normalisation: vanishing annihilation factor");
    const cplx bracket = (1.0 - dm) + (F2 / F1) * (1.0 - dp);
    if (std::abs(bracket) < 1e-10) throw DegenerateModeError("normalisation bracket vanishes (exceptional point)");
    return 1.0 / bracket;
}

std::vector<BandAmplitude> band_amplitudes(const Root& root, const ReducedParams& rp, const std::vector<double>& kgrid,
                                           bool* on_cut)
{
    std::vector<BandAmplitude> out;
    if (on_cut) *on_cut = false;
    if (rp.g == 0.0) return out;
    const double norm = rp.g / std::sqrt(std::numbers::pi);
    const cplx lip(0.0, 1e-300);
    for (double k : kgrid) {
        const double gk = norm * std::sin(k);
        cplx dp = root.z + rp.omegaBp - std::cos(k);
        cplx dm = root.z - rp.omegaBp + std::cos(k);
        if (dp == 0.0 || dm == 0.0) {
            if (on_cut) *on_cut = true;
            if (dp == 0.0) dp = lip;
            if (dm == 0.0) dm = lip;
        }
        out.push_back({k, -gk / dp, gk / dm});
    }
    return out;
}

ModeCoefficients mode_coefficients(const Root& root, const ReducedParams& rp, const std::vector<double>& kgrid)
{
    ModeCoefficients m;
    m.root = root;
    m.ratios = amplitude_ratios(root, rp);
    m.norm_product = normalization_product(root, rp);
    m.band = band_amplitudes(root, rp, kgrid, &m.lip_flag);
    return m;
}

nlohmann::json mode_to_json(const ModeCoefficients& m)
{
    nlohmann::json band = nlohmann::json::array();
    for (const auto& b : m.band)
        band.push_back({b.k, b.c_plus.real(), b.c_plus.imag(), b.c_minus.real(), b.c_minus.imag()});
    auto cj = [](cplx z) {
        // JSON has no NaN; undefined ratios are written as null
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return nlohmann::json(nullptr);
        return to_json(z);
    };
    return {{"schema_version", kSchemaVersion},
            {"zprime", to_json(m.root.z)},
            {"sheets", {to_string(m.root.sheets.plus), to_string(m.root.sheets.minus)}},
            {"kind", to_string(m.root.kind)},
            {"stability", to_string(m.root.stability)},
            {"residual", m.root.residual},
            {"ratio_creation", cj(m.ratios.creation)},
            {"ratio_annihilation", cj(m.ratios.annihilation)},
            {"decoupled", m.ratios.decoupled},
            {"norm_product", to_json(m.norm_product)},
            {"lip_flag", m.lip_flag},
            {"band", band}};
}

ModeCoefficients mode_from_json(const nlohmann::json& j)
{
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw std::runtime_error("mode JSON: unsupported schema");
    ModeCoefficients m;
    m.root.z = complex_from_json(j.at("zprime"));
    m.root.sheets = {sheet_from_string(j.at("sheets").at(0)), sheet_from_string(j.at("sheets").at(1))};
    m.root.kind = j.at("kind") == "creation" ? ModeKind::creation : ModeKind::annihilation;
    const std::string st = j.at("stability");
    m.root.stability = st == "decaying"     ? Stability::decaying
                       : st == "amplifying" ? Stability::amplifying
                       : st == "stationary" ? Stability::stationary
                                            : Stability::stable_oscillatory;
    m.root.residual = j.at("residual");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    m.ratios.creation = j.at("ratio_creation").is_null() ? cplx(nan, 0) : complex_from_json(j.at("ratio_creation"));
    m.ratios.annihilation =
        j.at("ratio_annihilation").is_null() ? cplx(nan, 0) : complex_from_json(j.at("ratio_annihilation"));
    m.ratios.decoupled = j.at("decoupled");
    m.norm_product = complex_from_json(j.at("norm_product"));
    m.lip_flag = j.at("lip_flag");
    for (const auto& r : j.at("band"))
        m.band.push_back({r.at(0), {r.at(1).get<double>(), r.at(2).get<double>()},
                          {r.at(3).get<double>(), r.at(4).get<double>()}});
    return m;
}

void export_mode(const ModeCoefficients& m, const std::string& path)
{
    write_text_file(path, mode_to_json(m).dump(2) + "\n");
}

std::vector<double> midpoint_kgrid(int n)
{
    std::vector<double> k(n);
    for (int j = 0; j < n; ++j) k[j] = std::numbers::pi * (j + 0.5) / n;
    return k;
}

double band_to_cavity_ratio(const ModeCoefficients& m)
{
    // phi: <a,0|phi> = 1, <a*,1|phi> = ratio_annihilation
    const double a0 = 1.0;
    const double a1 = m.ratios.decoupled ? 0.0 : std::abs(m.ratios.annihilation);
    double band = 0.0;
    for (const auto& b : m.band) band = std::max({band, std::abs(b.c_plus) * a0, std::abs(b.c_minus) * a1});
    return band / std::hypot(a0, a1);
}

}  // namespace fdce
