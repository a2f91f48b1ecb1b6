#pragma once

#include <string>

#include <json.hpp>

namespace dslab {

struct Verdict {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string ensemble;
    nlohmann::json detail = nlohmann::json::object();

    nlohmann::json to_json() const;
};

}  // namespace dslab
