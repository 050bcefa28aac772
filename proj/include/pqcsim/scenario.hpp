#pragma once

#include <string>

namespace pqcsim {

struct ScenarioSpec {
    std::string name;
    double weight = 0.0;
    double npp_per_day = 0.0;
    double intrabank_per_day = 0.0;
    double rtgs_per_day = 0.0;
    double swift_per_day = 0.0;
    std::string multi_day_family;  // empty, "christmas" or "crash"
};

}  // namespace pqcsim
