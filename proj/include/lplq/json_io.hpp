#pragma once

#include <json.hpp>

#include "lplq/step_function.hpp"

namespace lplq {

// Wire format: {"base": [len...], "fibers": [{"lens": [...], "vals": [...]}...]}.
// Round-trips losslessly at double precision.
nlohmann::json to_json(const StepFunction2D& f);
StepFunction2D step2d_from_json(const nlohmann::json& j);

}  // namespace lplq
