#include "lplq/json_io.hpp"

#include "lplq/errors.hpp"

namespace lplq {

nlohmann::json to_json(const StepFunction2D& f) {
    nlohmann::json j;
    j["base"] = f.base().lengths();
    nlohmann::json fibers = nlohmann::json::array();
    for (std::size_t i = 0; i < f.base_size(); ++i) {
        nlohmann::json fib;
        fib["lens"] = f.fiber(i).partition().lengths();
        fib["vals"] = f.fiber(i).values();
        fibers.push_back(std::move(fib));
    }
    j["fibers"] = std::move(fibers);
    return j;
}

StepFunction2D step2d_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("base") || !j.contains("fibers"))
        throw invariant_error("step function JSON: need base and fibers");
    Partition1D base(j.at("base").get<std::vector<double>>());
    std::vector<StepFunction1D> fibers;
    for (const auto& fib : j.at("fibers")) {
        Partition1D fp(fib.at("lens").get<std::vector<double>>());
        fibers.emplace_back(std::move(fp), fib.at("vals").get<std::vector<double>>());
    }
    return StepFunction2D(std::move(base), std::move(fibers));
}

}  // namespace lplq
