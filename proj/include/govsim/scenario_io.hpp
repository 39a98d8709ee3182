#pragma once

// Scenario documents and trace files.
//
// Both use JSON: scenarios as a single document, traces as one object per
// line with a header record first. Parsing is strict (unknown fields are
// rejected); emission is hand-rolled so field order is fixed and every float
// is written with 6 decimal digits, which keeps golden files byte-stable.

#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "govsim/harness.hpp"
#include "govsim/scenario.hpp"

namespace govsim {

// ---------------------------------------------------------------------------
// Emission helpers

namespace jsonio {

inline void append_fixed6(std::string& out, double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
    out.append(buf, r.ptr);
}

inline void append_string(std::string& out, std::string_view s) {
    out.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    out.push_back('"');
}

inline void append_field_name(std::string& out, std::string_view name) {
    append_string(out, name);
    out.push_back(':');
}

} // namespace jsonio

// ---------------------------------------------------------------------------
// Scenario parsing

struct SchemaIssue {
    std::string field;
    std::string message;
};

struct ScenarioParseResult {
    std::optional<Scenario> scenario;
    std::vector<SchemaIssue> errors;
    std::vector<SchemaIssue> warnings;

    bool ok() const { return scenario.has_value(); }
};

namespace detail_io {

using nlohmann::json;

class FieldCollector {
public:
    explicit FieldCollector(std::vector<SchemaIssue>& issues) : issues_(issues) {}

    void add(std::string field, std::string message) {
        issues_.push_back({std::move(field), std::move(message)});
    }

    void reject_unknown(const json& obj, std::string_view ctx,
                        std::initializer_list<std::string_view> allowed) {
        for (const auto& item : obj.items()) {
            bool known = false;
            for (std::string_view a : allowed) known |= item.key() == a;
            if (!known) add(std::string(ctx) + item.key(), "unknown field rejected");
        }
    }

    double number(const json& obj, std::string_view ctx, std::string_view key, bool required,
                  double fallback) {
        const std::string k(key);
        if (!obj.contains(k)) {
            if (required) add(std::string(ctx) + k, "missing required field");
            return fallback;
        }
        if (!obj[k].is_number()) {
            add(std::string(ctx) + k, "expected a number");
            return fallback;
        }
        return obj[k].get<double>();
    }

    std::int64_t integer(const json& obj, std::string_view ctx, std::string_view key,
                         bool required, std::int64_t fallback) {
        const std::string k(key);
        if (!obj.contains(k)) {
            if (required) add(std::string(ctx) + k, "missing required field");
            return fallback;
        }
        if (!obj[k].is_number_integer() && !obj[k].is_number_unsigned()) {
            add(std::string(ctx) + k, "expected an integer");
            return fallback;
        }
        return obj[k].get<std::int64_t>();
    }

    std::string text(const json& obj, std::string_view ctx, std::string_view key, bool required,
                     std::string fallback) {
        const std::string k(key);
        if (!obj.contains(k)) {
            if (required) add(std::string(ctx) + k, "missing required field");
            return fallback;
        }
        if (!obj[k].is_string()) {
            add(std::string(ctx) + k, "expected a string");
            return fallback;
        }
        return obj[k].get<std::string>();
    }

    std::optional<EntityId> entity_id(const json& obj, std::string_view ctx, std::string_view key,
                                      bool required) {
        const std::string value = text(obj, ctx, key, required, "");
        if (value.empty()) return std::nullopt;
        try {
            return EntityId(value);
        } catch (const std::invalid_argument& e) {
            add(std::string(ctx) + std::string(key), e.what());
            return std::nullopt;
        }
    }

    template <typename Enum>
    std::optional<Enum> enumerated(const json& obj, std::string_view ctx, std::string_view key,
                                   bool required) {
        const std::string value = text(obj, ctx, key, required, "");
        if (value.empty()) return std::nullopt;
        const std::optional<Enum> parsed = enum_from_string<Enum>(value);
        if (!parsed) add(std::string(ctx) + std::string(key), "value '" + value + "' not in the closed set");
        return parsed;
    }

private:
    std::vector<SchemaIssue>& issues_;
};

} // namespace detail_io

inline ScenarioParseResult parse_scenario(std::string_view text) {
    using detail_io::json;
    ScenarioParseResult result;
    detail_io::FieldCollector fields(result.errors);

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        result.errors.push_back({"", e.what()}); // message carries line/column
        return result;
    }
    if (!doc.is_object()) {
        result.errors.push_back({"", "scenario document must be a JSON object"});
        return result;
    }

    fields.reject_unknown(doc, "",
                          {"schema_version", "name", "overtake_type_label", "road_length",
                           "visibility_range", "dt", "params", "vehicles", "cpses", "rsus",
                           "driver_policies", "rules"});

    Scenario sc;
    sc.schema_version = static_cast<int>(fields.integer(doc, "", "schema_version", false, 1));
    sc.name = fields.text(doc, "", "name", true, "");
    sc.overtake_type_label = fields.text(doc, "", "overtake_type_label", false, "Type1");
    sc.road_length = fields.number(doc, "", "road_length", true, 0.0);
    sc.visibility_range = fields.number(doc, "", "visibility_range", false, 200.0);
    sc.dt = fields.number(doc, "", "dt", false, 0.1);

    if (doc.contains("params")) {
        const json& p = doc["params"];
        if (!p.is_object()) {
            fields.add("params", "expected an object");
        } else {
            fields.reject_unknown(p, "params.",
                                  {"v_max", "a_max", "t_lc", "safety_margin", "d_return",
                                   "headway", "warning_margin", "freshness_ticks",
                                   "zone_margin_back", "zone_margin_front", "critical_conflict",
                                   "block_limit", "need_speed_delta", "need_ticks", "abort_decel",
                                   "follow_range"});
            SimParams& sp = sc.params;
            sp.v_max = fields.number(p, "params.", "v_max", false, sp.v_max);
            sp.a_max = fields.number(p, "params.", "a_max", false, sp.a_max);
            sp.t_lc = fields.number(p, "params.", "t_lc", false, sp.t_lc);
            sp.safety_margin = fields.number(p, "params.", "safety_margin", false, sp.safety_margin);
            sp.d_return = fields.number(p, "params.", "d_return", false, sp.d_return);
            sp.headway = fields.number(p, "params.", "headway", false, sp.headway);
            sp.warning_margin =
                fields.number(p, "params.", "warning_margin", false, sp.warning_margin);
            sp.freshness_ticks = static_cast<int>(
                fields.integer(p, "params.", "freshness_ticks", false, sp.freshness_ticks));
            sp.zone_margin_back =
                fields.number(p, "params.", "zone_margin_back", false, sp.zone_margin_back);
            sp.zone_margin_front =
                fields.number(p, "params.", "zone_margin_front", false, sp.zone_margin_front);
            sp.critical_conflict =
                fields.number(p, "params.", "critical_conflict", false, sp.critical_conflict);
            sp.block_limit = static_cast<int>(
                fields.integer(p, "params.", "block_limit", false, sp.block_limit));
            sp.need_speed_delta =
                fields.number(p, "params.", "need_speed_delta", false, sp.need_speed_delta);
            sp.need_ticks =
                static_cast<int>(fields.integer(p, "params.", "need_ticks", false, sp.need_ticks));
            sp.abort_decel = fields.number(p, "params.", "abort_decel", false, sp.abort_decel);
            sp.follow_range = fields.number(p, "params.", "follow_range", false, sp.follow_range);
        }
    }

    if (!doc.contains("vehicles") || !doc["vehicles"].is_array()) {
        fields.add("vehicles", "missing required field");
    } else {
        size_t index = 0;
        for (const json& v : doc["vehicles"]) {
            const std::string ctx = "vehicles[" + std::to_string(index++) + "].";
            if (!v.is_object()) {
                fields.add(ctx, "expected an object");
                continue;
            }
            fields.reject_unknown(v, ctx, {"id", "lane", "heading", "x", "v", "a", "length"});
            VehicleState vs;
            if (auto id = fields.entity_id(v, ctx, "id", true)) vs.id = *id;
            if (auto lane = fields.enumerated<Lane>(v, ctx, "lane", false)) vs.lane = *lane;
            if (auto heading = fields.enumerated<Heading>(v, ctx, "heading", false))
                vs.heading = *heading;
            vs.x = fields.number(v, ctx, "x", true, 0.0);
            vs.v = fields.number(v, ctx, "v", true, 0.0);
            vs.a = fields.number(v, ctx, "a", false, 0.0);
            vs.length = fields.number(v, ctx, "length", false, 5.0);
            sc.vehicles.push_back(std::move(vs));
        }
    }

    if (!doc.contains("cpses") || !doc["cpses"].is_array()) {
        fields.add("cpses", "missing required field");
    } else {
        size_t index = 0;
        for (const json& c : doc["cpses"]) {
            const std::string ctx = "cpses[" + std::to_string(index++) + "].";
            if (!c.is_object()) {
                fields.add(ctx, "expected an object");
                continue;
            }
            fields.reject_unknown(c, ctx, {"id", "kind", "sensing_range", "hosted_on"});
            Cps cps;
            if (auto id = fields.entity_id(c, ctx, "id", true)) cps.id = *id;
            if (auto kind = fields.enumerated<CpsKind>(c, ctx, "kind", true)) cps.kind = *kind;
            cps.sensing_range = fields.number(c, ctx, "sensing_range", false, 0.0);
            if (c.contains("hosted_on")) cps.hosted_on = fields.entity_id(c, ctx, "hosted_on", false);
            sc.cpses.push_back(std::move(cps));
        }
    }

    if (doc.contains("rsus")) {
        if (!doc["rsus"].is_array()) {
            fields.add("rsus", "expected an array");
        } else {
            size_t index = 0;
            for (const json& r : doc["rsus"]) {
                const std::string ctx = "rsus[" + std::to_string(index++) + "].";
                if (!r.is_object()) {
                    fields.add(ctx, "expected an object");
                    continue;
                }
                fields.reject_unknown(
                    r, ctx, {"cps", "position", "coverage_radius", "latency_ticks", "drop_probability"});
                RsuSite site;
                if (auto id = fields.entity_id(r, ctx, "cps", true)) site.cps = *id;
                site.position = fields.number(r, ctx, "position", true, 0.0);
                site.coverage_radius = fields.number(r, ctx, "coverage_radius", false, 500.0);
                site.latency_ticks =
                    static_cast<int>(fields.integer(r, ctx, "latency_ticks", false, 0));
                site.drop_probability = fields.number(r, ctx, "drop_probability", false, 0.0);
                sc.rsus.push_back(std::move(site));
            }
        }
    }

    if (doc.contains("driver_policies")) {
        if (!doc["driver_policies"].is_object()) {
            fields.add("driver_policies", "expected an object");
        } else {
            for (const auto& item : doc["driver_policies"].items()) {
                const std::string ctx = "driver_policies." + item.key() + ".";
                const json& p = item.value();
                if (!p.is_object()) {
                    fields.add(ctx, "expected an object");
                    continue;
                }
                fields.reject_unknown(p, ctx,
                                      {"kind", "desired_speed", "gap_acceptance_margin",
                                       "compliance_probability", "perception_noise_std"});
                DriverPolicy policy;
                const std::string kind_text = fields.text(p, ctx, "kind", false, "compliant");
                const auto kind = driver_kind_from_string(kind_text);
                if (!kind) {
                    fields.add(ctx + "kind", "value '" + kind_text + "' not in the closed set");
                    continue;
                }
                policy.kind = *kind;
                switch (policy.kind) { // kind-dependent defaults
                    case DriverKind::Compliant:
                        policy.gap_acceptance_margin = 3.0;
                        policy.compliance_probability = 1.0;
                        break;
                    case DriverKind::Oblivious:
                        policy.gap_acceptance_margin = 3.0;
                        policy.compliance_probability = 0.0;
                        break;
                    case DriverKind::Aggressive:
                        policy.gap_acceptance_margin = 1.0;
                        policy.compliance_probability = 0.5;
                        break;
                }
                policy.desired_speed = fields.number(p, ctx, "desired_speed", false, 27.0);
                policy.gap_acceptance_margin = fields.number(p, ctx, "gap_acceptance_margin",
                                                             false, policy.gap_acceptance_margin);
                policy.compliance_probability = fields.number(
                    p, ctx, "compliance_probability", false, policy.compliance_probability);
                policy.perception_noise_std =
                    fields.number(p, ctx, "perception_noise_std", false, 20.0);
                sc.driver_policies[item.key()] = policy;
            }
        }
    }

    if (doc.contains("rules")) {
        const json& r = doc["rules"];
        if (r.is_string() && r.get<std::string>() == "default") {
            sc.default_rules = true;
        } else if (r.is_array()) {
            sc.default_rules = false;
            size_t index = 0;
            for (const json& rule_json : r) {
                const std::string ctx = "rules[" + std::to_string(index++) + "].";
                if (!rule_json.is_object()) {
                    fields.add(ctx, "expected an object");
                    continue;
                }
                fields.reject_unknown(rule_json, ctx,
                                      {"id", "condition", "grant_base", "holder", "subject",
                                       "activity_kind"});
                GovernanceRule rule;
                if (auto id = fields.entity_id(rule_json, ctx, "id", true)) rule.id = *id;
                if (auto c = fields.enumerated<AutonomyLevel>(rule_json, ctx, "condition", true))
                    rule.condition = *c;
                if (rule_json.contains("grant_base") && !rule_json["grant_base"].is_null())
                    rule.grant_base = fields.enumerated<PowerBase>(rule_json, ctx, "grant_base", false);
                if (auto h = fields.entity_id(rule_json, ctx, "holder", true)) rule.holder = *h;
                if (auto s = fields.entity_id(rule_json, ctx, "subject", true)) rule.subject = *s;
                if (auto k =
                        fields.enumerated<ActivityKind>(rule_json, ctx, "activity_kind", false))
                    rule.activity_kind = *k;
                sc.rules.push_back(std::move(rule));
            }
        } else {
            fields.add("rules", "expected \"default\" or an array of rules");
        }
    }

    if (!result.errors.empty()) return result;

    for (Violation& v : validate_scenario(sc)) {
        if (v.severity == Violation::Severity::Error)
            result.errors.push_back({v.code, v.message});
        else
            result.warnings.push_back({v.code, v.message});
    }
    if (!result.errors.empty()) return result;

    result.scenario = std::move(sc);
    return result;
}

/// Canonical form: fixed field order, floats with 6 decimals. Applying
/// parse + serialize twice yields the same bytes as applying it once.
inline std::string serialize_scenario(const Scenario& sc) {
    using jsonio::append_field_name;
    using jsonio::append_fixed6;
    using jsonio::append_string;

    std::string out;
    out.reserve(2048);
    auto field = [&](std::string_view name) { append_field_name(out, name); };

    out += "{\n  ";
    field("schema_version");
    out += std::to_string(sc.schema_version);
    out += ",\n  ";
    field("name");
    append_string(out, sc.name);
    out += ",\n  ";
    field("overtake_type_label");
    append_string(out, sc.overtake_type_label);
    out += ",\n  ";
    field("road_length");
    append_fixed6(out, sc.road_length);
    out += ",\n  ";
    field("visibility_range");
    append_fixed6(out, sc.visibility_range);
    out += ",\n  ";
    field("dt");
    append_fixed6(out, sc.dt);
    out += ",\n  ";

    field("params");
    out += "{";
    const SimParams& p = sc.params;
    auto pf = [&](std::string_view name, double v, bool last = false) {
        field(name);
        append_fixed6(out, v);
        if (!last) out += ", ";
    };
    auto pi = [&](std::string_view name, std::int64_t v, bool last = false) {
        field(name);
        out += std::to_string(v);
        if (!last) out += ", ";
    };
    pf("v_max", p.v_max);
    pf("a_max", p.a_max);
    pf("t_lc", p.t_lc);
    pf("safety_margin", p.safety_margin);
    pf("d_return", p.d_return);
    pf("headway", p.headway);
    pf("warning_margin", p.warning_margin);
    pi("freshness_ticks", p.freshness_ticks);
    pf("zone_margin_back", p.zone_margin_back);
    pf("zone_margin_front", p.zone_margin_front);
    pf("critical_conflict", p.critical_conflict);
    pi("block_limit", p.block_limit);
    pf("need_speed_delta", p.need_speed_delta);
    pi("need_ticks", p.need_ticks);
    pf("abort_decel", p.abort_decel);
    pf("follow_range", p.follow_range, true);
    out += "},\n  ";

    field("vehicles");
    out += "[";
    for (size_t i = 0; i < sc.vehicles.size(); ++i) {
        const VehicleState& v = sc.vehicles[i];
        out += i == 0 ? "\n    {" : ",\n    {";
        field("id");
        append_string(out, v.id.value());
        out += ", ";
        field("lane");
        append_string(out, to_string(v.lane));
        out += ", ";
        field("heading");
        append_string(out, to_string(v.heading));
        out += ", ";
        pf("x", v.x);
        pf("v", v.v);
        pf("a", v.a);
        pf("length", v.length, true);
        out += "}";
    }
    out += sc.vehicles.empty() ? "],\n  " : "\n  ],\n  ";

    field("cpses");
    out += "[";
    for (size_t i = 0; i < sc.cpses.size(); ++i) {
        const Cps& c = sc.cpses[i];
        out += i == 0 ? "\n    {" : ",\n    {";
        field("id");
        append_string(out, c.id.value());
        out += ", ";
        field("kind");
        append_string(out, to_string(c.kind));
        out += ", ";
        pf("sensing_range", c.sensing_range, !c.hosted_on.has_value());
        if (c.hosted_on) {
            field("hosted_on");
            append_string(out, c.hosted_on->value());
        }
        out += "}";
    }
    out += sc.cpses.empty() ? "],\n  " : "\n  ],\n  ";

    field("rsus");
    out += "[";
    for (size_t i = 0; i < sc.rsus.size(); ++i) {
        const RsuSite& r = sc.rsus[i];
        out += i == 0 ? "\n    {" : ",\n    {";
        field("cps");
        append_string(out, r.cps.value());
        out += ", ";
        pf("position", r.position);
        pf("coverage_radius", r.coverage_radius);
        pi("latency_ticks", r.latency_ticks);
        pf("drop_probability", r.drop_probability, true);
        out += "}";
    }
    out += sc.rsus.empty() ? "],\n  " : "\n  ],\n  ";

    field("driver_policies");
    out += "{";
    bool first_policy = true;
    for (const auto& [id, policy] : sc.driver_policies) {
        out += first_policy ? "\n    " : ",\n    ";
        first_policy = false;
        append_string(out, id);
        out += ": {";
        field("kind");
        append_string(out, to_string(policy.kind));
        out += ", ";
        pf("desired_speed", policy.desired_speed);
        pf("gap_acceptance_margin", policy.gap_acceptance_margin);
        pf("compliance_probability", policy.compliance_probability);
        pf("perception_noise_std", policy.perception_noise_std, true);
        out += "}";
    }
    out += sc.driver_policies.empty() ? "},\n  " : "\n  },\n  ";

    field("rules");
    if (sc.default_rules) {
        out += "\"default\"";
    } else {
        out += "[";
        for (size_t i = 0; i < sc.rules.size(); ++i) {
            const GovernanceRule& r = sc.rules[i];
            out += i == 0 ? "\n    {" : ",\n    {";
            field("id");
            append_string(out, r.id.value());
            out += ", ";
            field("condition");
            append_string(out, to_string(r.condition));
            out += ", ";
            field("grant_base");
            if (r.grant_base)
                append_string(out, to_string(*r.grant_base));
            else
                out += "null";
            out += ", ";
            field("holder");
            append_string(out, r.holder.value());
            out += ", ";
            field("subject");
            append_string(out, r.subject.value());
            out += ", ";
            field("activity_kind");
            append_string(out, to_string(r.activity_kind));
            out += "}";
        }
        out += sc.rules.empty() ? "]" : "\n  ]";
    }
    out += "\n}\n";
    return out;
}

// ---------------------------------------------------------------------------
// Trace files

class TraceParseError : public std::runtime_error {
public:
    TraceParseError(std::size_t line, const std::string& message)
        : std::runtime_error("trace line " + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

inline void write_trace(const Trace& trace, std::ostream& sink) {
    using jsonio::append_field_name;
    using jsonio::append_fixed6;
    using jsonio::append_string;

    std::string line;
    line.reserve(512);
    auto field = [&](std::string_view name) { append_field_name(line, name); };

    line += "{";
    field("schema_version");
    line += std::to_string(trace.header.schema_version);
    line += ",";
    field("scenario");
    append_string(line, trace.header.scenario);
    line += ",";
    field("seed");
    line += std::to_string(trace.header.seed);
    line += ",";
    field("label");
    append_string(line, trace.header.label);
    line += "}\n";
    sink << line;

    for (const TraceEvent& event : trace.events) {
        line.clear();
        line += "{";
        field("tick");
        line += std::to_string(event.tick);
        line += ",";
        field("kind");

        if (const auto* snap = std::get_if<StateSnapshotRec>(&event.payload)) {
            line += "\"state_snapshot\",";
            field("phase");
            append_string(line, to_string(snap->phase));
            line += ",";
            field("mode");
            append_string(line, to_string(snap->mode));
            line += ",";
            field("vehicles");
            line += "[";
            for (size_t i = 0; i < snap->vehicles.size(); ++i) {
                const SnapshotVehicle& v = snap->vehicles[i];
                if (i) line += ",";
                line += "{";
                field("id");
                append_string(line, v.id.value());
                line += ",";
                field("lane");
                append_string(line, to_string(v.lane));
                line += ",";
                field("heading");
                append_string(line, to_string(v.heading));
                line += ",";
                field("x");
                append_fixed6(line, v.x);
                line += ",";
                field("v");
                append_fixed6(line, v.v);
                line += ",";
                field("zone");
                append_string(line, to_string(v.zone));
                line += "}";
            }
            line += "]";
        } else if (const auto* eval = std::get_if<AutonomyEvalRec>(&event.payload)) {
            line += "\"autonomy_eval\",";
            field("subject");
            append_string(line, eval->subject.value());
            line += ",";
            field("activity");
            append_string(line, eval->activity.value());
            line += ",";
            field("awareness");
            append_string(line, to_string(eval->awareness));
            line += ",";
            field("controllability");
            append_string(line, to_string(eval->controllability));
            line += ",";
            field("autonomy");
            append_string(line, to_string(eval->autonomy));
        } else if (const auto* grant = std::get_if<PowerGrantRec>(&event.payload)) {
            line += "\"power_grant\",";
            field("holder");
            append_string(line, grant->grant.holder.value());
            line += ",";
            field("subject");
            append_string(line, grant->grant.subject.value());
            line += ",";
            field("activity");
            append_string(line, grant->grant.activity.value());
            line += ",";
            field("base");
            append_string(line, to_string(grant->grant.base));
        } else if (const auto* adas = std::get_if<AdasEventRec>(&event.payload)) {
            line += "\"adas_event\",";
            field("event");
            append_string(line, to_string(adas->event.kind));
            line += ",";
            field("subject");
            append_string(line, adas->event.subject.value());
            if (adas->event.reason) {
                line += ",";
                field("reason");
                append_string(line, to_string(*adas->event.reason));
            }
            if (adas->event.action) {
                line += ",";
                field("action");
                append_string(line, to_string(*adas->event.action));
            }
        } else if (const auto* collision = std::get_if<CollisionRec>(&event.payload)) {
            line += "\"collision\",";
            field("a");
            append_string(line, collision->a.value());
            line += ",";
            field("b");
            append_string(line, collision->b.value());
        } else if (const auto* outcome = std::get_if<OutcomeRec>(&event.payload)) {
            line += "\"outcome\",";
            field("outcome");
            append_string(line, to_string(outcome->kind));
        }
        line += "}\n";
        sink << line;
    }
}

namespace detail_io {

inline const json& require_field(const json& obj, const char* key, std::size_t line_number) {
    if (!obj.contains(key))
        throw TraceParseError(line_number, std::string("missing field '") + key + "'");
    return obj.at(key);
}

inline EntityId parse_id(const json& obj, const char* key, std::size_t line_number) {
    const json& v = require_field(obj, key, line_number);
    if (!v.is_string())
        throw TraceParseError(line_number, std::string(key) + " must be a string");
    try {
        return EntityId(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw TraceParseError(line_number, e.what());
    }
}

inline TraceEvent parse_trace_event(const json& j, std::size_t n) {
    TraceEvent event;
    event.tick = require_field(j, "tick", n).get<Tick>();

    const std::string kind = require_field(j, "kind", n).get<std::string>();
    if (kind == "state_snapshot") {
        StateSnapshotRec rec;
        const auto phase = phase_from_string(require_field(j, "phase", n).get<std::string>());
        const auto mode = mode_from_string(require_field(j, "mode", n).get<std::string>());
        if (!phase) throw TraceParseError(n, "unknown phase");
        if (!mode) throw TraceParseError(n, "unknown mode");
        rec.phase = *phase;
        rec.mode = *mode;
        const json& vehicles = require_field(j, "vehicles", n);
        if (!vehicles.is_array()) throw TraceParseError(n, "vehicles must be an array");
        for (const json& v : vehicles) {
            SnapshotVehicle sv;
            sv.id = parse_id(v, "id", n);
            const auto lane = enum_from_string<Lane>(require_field(v, "lane", n).get<std::string>());
            const auto heading =
                enum_from_string<Heading>(require_field(v, "heading", n).get<std::string>());
            if (!lane || !heading) throw TraceParseError(n, "unknown lane/heading");
            sv.lane = *lane;
            sv.heading = *heading;
            sv.x = require_field(v, "x", n).get<double>();
            sv.v = require_field(v, "v", n).get<double>();
            const std::string zone = require_field(v, "zone", n).get<std::string>();
            if (zone == "safe")
                sv.zone = Zone::Safe;
            else if (zone == "warning")
                sv.zone = Zone::Warning;
            else if (zone == "danger")
                sv.zone = Zone::Danger;
            else
                throw TraceParseError(n, "unknown zone");
            rec.vehicles.push_back(std::move(sv));
        }
        event.payload = std::move(rec);
    } else if (kind == "autonomy_eval") {
        AutonomyEvalRec rec;
        rec.subject = parse_id(j, "subject", n);
        rec.activity = parse_id(j, "activity", n);
        const auto awareness =
            enum_from_string<AwarenessKind>(require_field(j, "awareness", n).get<std::string>());
        const auto controllability = enum_from_string<ControllabilityLevel>(
            require_field(j, "controllability", n).get<std::string>());
        const auto autonomy =
            enum_from_string<AutonomyLevel>(require_field(j, "autonomy", n).get<std::string>());
        if (!awareness || !controllability || !autonomy)
            throw TraceParseError(n, "unknown classification value");
        rec.awareness = *awareness;
        rec.controllability = *controllability;
        rec.autonomy = *autonomy;
        event.payload = std::move(rec);
    } else if (kind == "power_grant") {
        PowerGrantRec rec;
        rec.grant.holder = parse_id(j, "holder", n);
        rec.grant.subject = parse_id(j, "subject", n);
        rec.grant.activity = parse_id(j, "activity", n);
        const auto base = enum_from_string<PowerBase>(require_field(j, "base", n).get<std::string>());
        if (!base) throw TraceParseError(n, "unknown power base");
        rec.grant.base = *base;
        rec.grant.granted_at_tick = event.tick;
        event.payload = std::move(rec);
    } else if (kind == "adas_event") {
        AdasEventRec rec;
        rec.event.tick = event.tick;
        const std::string event_kind = require_field(j, "event", n).get<std::string>();
        if (event_kind == "monitor")
            rec.event.kind = AdasEvent::Kind::Monitor;
        else if (event_kind == "warn")
            rec.event.kind = AdasEvent::Kind::Warn;
        else if (event_kind == "control")
            rec.event.kind = AdasEvent::Kind::Control;
        else
            throw TraceParseError(n, "unknown adas event kind");
        rec.event.subject = parse_id(j, "subject", n);
        if (j.contains("reason")) {
            const auto reason = warn_reason_from_string(j["reason"].get<std::string>());
            if (!reason) throw TraceParseError(n, "unknown warn reason");
            rec.event.reason = reason;
        }
        if (j.contains("action")) {
            const auto action = control_action_from_string(j["action"].get<std::string>());
            if (!action) throw TraceParseError(n, "unknown control action");
            rec.event.action = action;
        }
        if (rec.event.kind == AdasEvent::Kind::Control && !rec.event.action)
            throw TraceParseError(n, "control event without action");
        event.payload = std::move(rec);
    } else if (kind == "collision") {
        CollisionRec rec;
        rec.a = parse_id(j, "a", n);
        rec.b = parse_id(j, "b", n);
        event.payload = std::move(rec);
    } else if (kind == "outcome") {
        OutcomeRec rec;
        const std::string outcome = require_field(j, "outcome", n).get<std::string>();
        if (outcome == "completed")
            rec.kind = OutcomeRec::Kind::Completed;
        else if (outcome == "aborted")
            rec.kind = OutcomeRec::Kind::Aborted;
        else if (outcome == "blocked")
            rec.kind = OutcomeRec::Kind::Blocked;
        else
            throw TraceParseError(n, "unknown outcome");
        event.payload = std::move(rec);
    } else {
        throw TraceParseError(n, "unknown event kind '" + kind + "'");
    }
    return event;
}

} // namespace detail_io

inline Trace read_trace(std::istream& source) {
    using detail_io::json;

    Trace trace;
    std::string line;
    std::size_t line_number = 0;

    auto parse_line = [&](const std::string& text) -> json {
        try {
            json j = json::parse(text);
            if (!j.is_object()) throw TraceParseError(line_number, "expected a JSON object");
            return j;
        } catch (const json::parse_error& e) {
            throw TraceParseError(line_number, e.what());
        }
    };

    if (!std::getline(source, line)) throw TraceParseError(1, "missing header record");
    line_number = 1;
    try {
        const json header = parse_line(line);
        trace.header.schema_version =
            detail_io::require_field(header, "schema_version", line_number).get<int>();
        if (trace.header.schema_version != 1)
            throw TraceParseError(line_number, "unsupported schema_version");
        trace.header.scenario =
            detail_io::require_field(header, "scenario", line_number).get<std::string>();
        trace.header.seed = detail_io::require_field(header, "seed", line_number).get<std::uint64_t>();
        trace.header.label = header.contains("label") ? header["label"].get<std::string>() : "";
    } catch (const json::exception& e) {
        throw TraceParseError(line_number, e.what());
    }

    Tick previous_tick = std::numeric_limits<Tick>::min();
    while (std::getline(source, line)) {
        ++line_number;
        if (line.empty()) throw TraceParseError(line_number, "empty line");
        const json j = parse_line(line);
        try {
            TraceEvent event = detail_io::parse_trace_event(j, line_number);
            if (event.tick < previous_tick)
                throw TraceParseError(line_number, "ticks must be nondecreasing");
            previous_tick = event.tick;
            trace.events.push_back(std::move(event));
        } catch (const json::exception& e) {
            throw TraceParseError(line_number, e.what());
        }
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Aggregation

struct ScenarioCounters {
    std::int64_t attempted = 0;
    std::int64_t completed = 0;
    std::int64_t aborted = 0;
    std::int64_t blocked = 0;
    std::int64_t warns = 0;
    std::int64_t controls = 0;
    std::int64_t collisions = 0;

    ScenarioCounters& operator+=(const ScenarioCounters& other) {
        attempted += other.attempted;
        completed += other.completed;
        aborted += other.aborted;
        blocked += other.blocked;
        warns += other.warns;
        controls += other.controls;
        collisions += other.collisions;
        return *this;
    }

    friend bool operator==(const ScenarioCounters&, const ScenarioCounters&) = default;
};

struct Report {
    std::map<std::string, ScenarioCounters> per_scenario;
    std::map<std::string, ScenarioCounters> per_type;

    friend bool operator==(const Report&, const Report&) = default;
};

inline ScenarioCounters count_trace(const Trace& trace) {
    ScenarioCounters c;
    OvertakePhase previous_phase = OvertakePhase::Following;
    for (const TraceEvent& event : trace.events) {
        if (const auto* snap = std::get_if<StateSnapshotRec>(&event.payload)) {
            if (snap->phase == OvertakePhase::Initiating &&
                previous_phase != OvertakePhase::Initiating)
                ++c.attempted;
            previous_phase = snap->phase;
        } else if (const auto* adas = std::get_if<AdasEventRec>(&event.payload)) {
            if (adas->event.kind == AdasEvent::Kind::Warn) ++c.warns;
            if (adas->event.kind == AdasEvent::Kind::Control) ++c.controls;
        } else if (std::get_if<CollisionRec>(&event.payload)) {
            ++c.collisions;
        } else if (const auto* outcome = std::get_if<OutcomeRec>(&event.payload)) {
            switch (outcome->kind) {
                case OutcomeRec::Kind::Completed: ++c.completed; break;
                case OutcomeRec::Kind::Aborted: ++c.aborted; break;
                case OutcomeRec::Kind::Blocked:
                    ++c.blocked;
                    ++c.attempted; // a blocked initiation never reaches Initiating
                    break;
            }
        }
    }
    return c;
}

inline Report summarize(std::span<const Trace> traces) {
    Report report;
    for (const Trace& trace : traces) {
        const ScenarioCounters c = count_trace(trace);
        report.per_scenario[trace.header.scenario] += c;
        report.per_type[trace.header.label.empty() ? "unlabeled" : trace.header.label] += c;
    }
    return report;
}

inline void write_report_csv(const Report& report, std::ostream& sink) {
    sink << "scenario,attempted,completed,aborted,blocked,warns,controls,collisions\n";
    for (const auto& [name, c] : report.per_scenario) {
        sink << name << ',' << c.attempted << ',' << c.completed << ',' << c.aborted << ','
             << c.blocked << ',' << c.warns << ',' << c.controls << ',' << c.collisions << '\n';
    }
}

} // namespace govsim
