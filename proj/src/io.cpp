#include "floquet_dce/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fdce {

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json to_json(std::complex<double> z) { return nlohmann::json::array({z.real(), z.imag()}); }

std::complex<double> complex_from_json(const nlohmann::json& j)
{
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

nlohmann::json to_json(const ModelParams& p)
{
    return {{"omega0", p.omega0}, {"Omega", p.Omega}, {"f0", p.f0}, {"theta", p.theta},
            {"omegaB", p.omegaB}, {"B", p.B},         {"g", p.g}};
}

ModelParams model_params_from_json(const nlohmann::json& j, ModelParams p)
{
    auto get = [&](const char* key, double& dst) {
        if (j.contains(key)) dst = j.at(key).get<double>();
    };
    get("omega0", p.omega0);
    get("Omega", p.Omega);
    get("f0", p.f0);
    get("theta", p.theta);
    get("omegaB", p.omegaB);
    get("B", p.B);
    get("g", p.g);
    return p;
}

nlohmann::json to_json(const ReducedParams& rp)
{
    return {{"omega0p", rp.omega0p}, {"omegaBp", rp.omegaBp}, {"f0", rp.f0}, {"g", rp.g}, {"B", rp.B}};
}

nlohmann::json to_json(const Root& r)
{
    return {{"zprime", to_json(r.z)},
            {"sheets", {to_string(r.sheets.plus), to_string(r.sheets.minus)}},
            {"residual", r.residual},
            {"kind", to_string(r.kind)},
            {"stability", to_string(r.stability)}};
}

}  // namespace fdce
