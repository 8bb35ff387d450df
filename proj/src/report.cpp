#include "qfluct/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace qfluct {

std::string format_number(double v) {
    if (v == 0.0) return "0";  // folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

Json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::strtod(format_number(v).c_str(), nullptr);
}

Json json_complex(complex z) {
    Json j;
    j["re"] = json_number(z.real());
    j["im"] = json_number(z.imag());
    return j;
}

Json to_json(const URVerdict& v) {
    Json j;
    j["pair"] = v.pair;
    j["delta_a"] = json_number(v.delta_a);
    j["delta_b"] = json_number(v.delta_b);
    j["lhs"] = json_number(v.lhs);
    j["cs_rhs"] = json_number(v.cs_rhs);
    j["rs_rhs"] = json_number(v.rs_rhs);
    j["gap_ab"] = json_complex(v.gap_ab);
    j["gap_ba"] = json_complex(v.gap_ba);
    j["class"] = to_string(v.cls);
    return j;
}

Json to_json(const EstimatorSet& set) {
    Json j;
    j["labels"] = set.labels;
    Json means = Json::array();
    for (auto m : set.means) means.push_back(json_complex(m));
    j["means"] = means;
    Json deltas = Json::array();
    for (auto d : set.deltas) deltas.push_back(json_number(d));
    j["deltas"] = deltas;
    Json corr = Json::array();
    for (Eigen::Index r = 0; r < set.correlation.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < set.correlation.cols(); ++c) {
            row.push_back(json_complex(set.correlation(r, c)));
        }
        corr.push_back(row);
    }
    j["correlation"] = corr;
    return j;
}

Json to_json(const ClosedFormCard& card) {
    Json j;
    j["state"] = card.state;
    Json entries = Json::array();
    for (const auto& e : card.entries) {
        entries.push_back({{"label", e.label}, {"value", json_complex(e.value)}, {"source", e.source}});
    }
    j["entries"] = entries;
    return j;
}

Json to_json(const OracleCard& card) {
    Json j;
    Json params;
    for (const auto& [k, v] : card.parameters) params[k] = json_number(v);
    j["parameters"] = params;
    Json entries = Json::array();
    for (const auto& e : card.entries) {
        entries.push_back({{"label", e.label}, {"value", json_complex(e.value)}, {"source", e.source}});
    }
    j["entries"] = entries;
    return j;
}

Json to_json(const CheckReport& report) {
    Json j;
    j["pass"] = report.pass;
    Json rows = Json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"label", r.label},
                        {"expected", json_complex(r.expected)},
                        {"actual", json_complex(r.actual)},
                        {"error", json_number(r.error)},
                        {"pass", r.pass}});
    }
    j["rows"] = rows;
    return j;
}

Json to_json(const ErrorReport& report) {
    Json j = Json::object();
    for (const auto& e : report.entries) j[e.label] = json_number(e.value);
    return j;
}

Json to_json(const std::vector<CardEntry>& entries) {
    Json j = Json::object();
    for (const auto& e : entries) j[e.label] = json_complex(e.value);
    return j;
}

}  // namespace qfluct
