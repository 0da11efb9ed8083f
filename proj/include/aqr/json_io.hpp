#pragma once

#include <string>

#include <json.hpp>

#include "aqr/estimator.hpp"
#include "aqr/misspec.hpp"
#include "aqr/model.hpp"
#include "aqr/spec_tests.hpp"

namespace aqr {

using nlohmann::json;

json to_json(const AsymmetrySpec& spec);
AsymmetrySpec spec_from_json(const json& j);

json to_json(const ParentQuantileCurve& curve);
ParentQuantileCurve curve_from_json(const json& j);

json to_json(const MleResult& r);
json to_json(const BootstrapResult& r);
json to_json(const TestReport& r);
json to_json(const MisspecRow& r);

// Writes pretty JSON via temp-then-rename so failures never leave partial files.
void write_json_file(const std::string& path, const json& j);

}  // namespace aqr
