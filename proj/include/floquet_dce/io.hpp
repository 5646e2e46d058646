#pragma once

#include <complex>
#include <string>

#include <json.hpp>

#include "floquet_dce/dispersion.hpp"
#include "floquet_dce/model.hpp"

namespace fdce {

inline constexpr int kSchemaVersion = 1;

std::string fmt17(double v);  // %.17g, round-trips exactly
void write_text_file(const std::string& path, const std::string& text);  // throws with path context
std::string read_text_file(const std::string& path);

nlohmann::json to_json(std::complex<double> z);
std::complex<double> complex_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ModelParams& p);
ModelParams model_params_from_json(const nlohmann::json& j, ModelParams base = {});
nlohmann::json to_json(const ReducedParams& rp);
nlohmann::json to_json(const Root& r);

}  // namespace fdce
