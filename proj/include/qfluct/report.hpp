#pragma once

#include <string>

#include <json.hpp>

#include "qfluct/annex_oracle.hpp"
#include "qfluct/channel.hpp"
#include "qfluct/observables.hpp"
#include "qfluct/states.hpp"
#include "qfluct/urelations.hpp"

namespace qfluct {

using Json = nlohmann::ordered_json;

/// Twelve significant digits, shortest form (`%.12g`).
std::string format_number(double v);
/// A JSON number rounded to twelve significant digits; non-finite values become null.
Json json_number(double v);
/// {"re": ..., "im": ...}
Json json_complex(complex z);

Json to_json(const URVerdict& v);
Json to_json(const EstimatorSet& set);
Json to_json(const ClosedFormCard& card);
Json to_json(const OracleCard& card);
Json to_json(const CheckReport& report);
Json to_json(const ErrorReport& report);
Json to_json(const std::vector<CardEntry>& entries);

}  // namespace qfluct
