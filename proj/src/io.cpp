#include "spectral/io.hpp"

namespace spectral {

nlohmann::json to_json(const EtaResult& r)
{
    return {{"method", to_string(r.method)},
            {"value", r.eta0},
            {"error", r.error_estimate},
            {"mod_z", r.mod_z_class},
            {"zero_modes", r.zero_modes}};
}

nlohmann::json to_json(const GradedSeries& s)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : s.coefficient_map()) j[k] = v;
    return j;
}

}  // namespace spectral
