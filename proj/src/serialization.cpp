/**********
 *   Copyright 2026 The polarsep Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#include "polarsep/serialization.hpp"

#include "polarsep/errors.hpp"
#include "polarsep/image_io.hpp"

#include <fstream>
#include <numbers>

namespace polarsep {

Json to_json(const FilterArray& array) {
    Json angles = Json::array();
    for (double a : array.orientations().angles())
        angles.push_back(a * 180.0 / std::numbers::pi);
    return Json{{"height", array.height()},
                {"width", array.width()},
                {"angles_deg", std::move(angles)},
                {"orientation_index", array.indices()}};
}

FilterArray filter_array_from_json(const Json& j) {
    try {
        const auto height = j.at("height").get<std::size_t>();
        const auto width = j.at("width").get<std::size_t>();
        std::vector<double> angles;
        for (const auto& deg : j.at("angles_deg"))
            angles.push_back(deg.get<double>() * std::numbers::pi / 180.0);
        std::vector<std::uint16_t> index;
        index.reserve(height * width);
        for (const auto& v : j.at("orientation_index")) {
            const auto i = v.get<std::int64_t>();
            if (i < 0 || i > 65535)
                throw ValidationError("filter array: orientation index out of range");
            index.push_back(static_cast<std::uint16_t>(i));
        }
        return FilterArray(height, width, std::move(index), OrientationSet(std::move(angles)));
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("filter array json: ") + e.what());
    }
}

Json to_json(const SolverConfig& cfg) {
    return Json{{"gamma_d", cfg.gamma_d},         {"gamma_s", cfg.gamma_s},
                {"norm", std::string(to_string(cfg.norm))},
                {"lambda", cfg.lambda},           {"huber_delta", cfg.huber_delta},
                {"cg_tol", cfg.cg_tol},           {"cg_max_iter", cfg.cg_max_iter},
                {"outer_max_iter", cfg.outer_max_iter}, {"outer_tol", cfg.outer_tol}};
}

SolverConfig solver_config_from_json(const Json& j, SolverConfig base) {
    if (!j.is_object())
        throw ValidationError("solver config must be a JSON object");
    try {
        auto take = [&](const char* key, auto& field) {
            if (j.contains(key))
                field = j.at(key).get<std::decay_t<decltype(field)>>();
        };
        take("gamma_d", base.gamma_d);
        take("gamma_s", base.gamma_s);
        take("lambda", base.lambda);
        take("huber_delta", base.huber_delta);
        take("cg_tol", base.cg_tol);
        take("cg_max_iter", base.cg_max_iter);
        take("outer_max_iter", base.outer_max_iter);
        take("outer_tol", base.outer_tol);
        if (j.contains("norm")) {
            const auto name = j.at("norm").get<std::string>();
            const auto norm = parse_tv_norm(name);
            if (!norm)
                throw ValidationError("unknown norm '" + name + "'");
            base.norm = *norm;
        }
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("solver config json: ") + e.what());
    }
    base.validate();
    return base;
}

Json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError(IoError::Kind::Open, "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw IoError(IoError::Kind::MalformedHeader, path.string() + ": " + e.what());
    }
}

void save_json(const std::filesystem::path& path, const Json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

} // namespace polarsep
