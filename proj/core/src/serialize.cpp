#include "mechint/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

namespace mechint {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw std::invalid_argument(what); }

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(0, std::string("malformed JSON: ") + e.what());
    }
}

void expect_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) schema_error(std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || key == k;
        if (!ok) schema_error(std::string("unknown key '") + key + "' in " + where);
    }
}

template <typename T>
T get_required(const json& obj, const char* where, const char* key) {
    if (!obj.contains(key))
        schema_error(std::string(where) + " is missing required key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        schema_error(std::string("key '") + key + "' in " + where + " has the wrong type");
    }
}

template <typename T>
T get_optional(const json& obj, const char* where, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        schema_error(std::string("key '") + key + "' in " + where + " has the wrong type");
    }
}

NodeSet node_set(const json& obj, const char* where, const char* key) {
    auto names = get_optional<std::vector<std::string>>(obj, where, key, {});
    return NodeSet(names.begin(), names.end());
}

json to_array(const NodeSet& s) { return json(std::vector<std::string>(s.begin(), s.end())); }

QueryKind query_kind_from(const std::string& s) {
    if (s == "total") return QueryKind::Total;
    if (s == "context-specific") return QueryKind::ContextSpecific;
    if (s == "direct-effect") return QueryKind::DirectEffect;
    schema_error("unknown query kind '" + s + "'");
}

Statistic statistic_from(const std::string& s) {
    if (s == "superadditivity") return Statistic::Superadditivity;
    if (s == "excess-risk") return Statistic::ExcessRisk;
    if (s == "none") return Statistic::None;
    schema_error("unknown statistic '" + s + "'");
}

json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double from_number_or_null(const json& v) {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return v.get<double>();
}

}  // namespace

AnalysisRequest parse_analysis_request(const std::string& json_text) {
    json doc = parse_text(json_text);
    expect_keys(doc, "request", {"roles", "query", "flags"});
    if (!doc.contains("roles")) schema_error("request is missing 'roles'");

    AnalysisRequest req;
    const json& roles = doc.at("roles");
    expect_keys(roles, "roles", {"a", "b", "y", "c", "u", "f", "sigma_ab", "sigma_f"});
    req.roles.a = get_required<std::string>(roles, "roles", "a");
    req.roles.b = get_required<std::string>(roles, "roles", "b");
    req.roles.y = get_required<std::string>(roles, "roles", "y");
    req.roles.sigma_ab = get_required<std::string>(roles, "roles", "sigma_ab");
    req.roles.c = node_set(roles, "roles", "c");
    req.roles.u = node_set(roles, "roles", "u");
    req.roles.f = node_set(roles, "roles", "f");
    req.roles.sigma_f = node_set(roles, "roles", "sigma_f");

    if (doc.contains("query")) {
        const json& query = doc.at("query");
        expect_keys(query, "query", {"kind", "context", "controlled"});
        req.query.kind =
            query_kind_from(get_optional<std::string>(query, "query", "kind", "total"));
        req.query.context = node_set(query, "query", "context");
        req.query.controlled = node_set(query, "query", "controlled");
    }

    if (doc.contains("flags")) {
        const json& flags = doc.at("flags");
        expect_keys(flags, "flags",
                    {"binary_ab", "effect_direction_known", "uniform_positivity_asserted",
                     "monotone_effects_asserted"});
        req.flags.binary_ab = get_optional<bool>(flags, "flags", "binary_ab", false);
        req.flags.effect_direction_known =
            get_optional<bool>(flags, "flags", "effect_direction_known", true);
        req.flags.uniform_positivity_asserted =
            get_optional<bool>(flags, "flags", "uniform_positivity_asserted", false);
        req.flags.monotone_effects_asserted =
            get_optional<bool>(flags, "flags", "monotone_effects_asserted", false);
    }
    return req;
}

std::string to_json(const AnalysisRequest& req, int indent) {
    json doc;
    doc["roles"] = {{"a", req.roles.a},
                    {"b", req.roles.b},
                    {"y", req.roles.y},
                    {"c", to_array(req.roles.c)},
                    {"u", to_array(req.roles.u)},
                    {"f", to_array(req.roles.f)},
                    {"sigma_ab", req.roles.sigma_ab},
                    {"sigma_f", to_array(req.roles.sigma_f)}};
    doc["query"] = {{"kind", to_string(req.query.kind)},
                    {"context", to_array(req.query.context)},
                    {"controlled", to_array(req.query.controlled)}};
    doc["flags"] = {{"binary_ab", req.flags.binary_ab},
                    {"effect_direction_known", req.flags.effect_direction_known},
                    {"uniform_positivity_asserted", req.flags.uniform_positivity_asserted},
                    {"monotone_effects_asserted", req.flags.monotone_effects_asserted}};
    return doc.dump(indent);
}

std::string to_json(const IdentificationReport& report, int indent) {
    json conditions = json::array();
    for (const auto& c : report.conditions)
        conditions.push_back({{"id", c.id},
                              {"left", to_array(c.left)},
                              {"right", to_array(c.right)},
                              {"given", to_array(c.given)},
                              {"statement", c.statement},
                              {"holds", c.holds},
                              {"required", c.required}});
    json doc = {{"identifiable", report.identifiable},
                {"statistic", to_string(report.statistic)},
                {"conditions", conditions},
                {"corollaries_used", report.corollaries_used},
                {"reduction", report.reduction},
                {"unverifiable_assumptions", report.unverifiable_assumptions},
                {"narrative", report.narrative}};
    return doc.dump(indent);
}

IdentificationReport identification_report_from_json(const std::string& json_text) {
    json doc = parse_text(json_text);
    expect_keys(doc, "report",
                {"identifiable", "statistic", "conditions", "corollaries_used", "reduction",
                 "unverifiable_assumptions", "narrative"});
    IdentificationReport report;
    report.identifiable = get_required<bool>(doc, "report", "identifiable");
    report.statistic = statistic_from(get_required<std::string>(doc, "report", "statistic"));
    for (const auto& c : doc.at("conditions")) {
        ConditionResult res;
        res.id = get_required<std::string>(c, "condition", "id");
        res.left = node_set(c, "condition", "left");
        res.right = node_set(c, "condition", "right");
        res.given = node_set(c, "condition", "given");
        res.statement = get_required<std::string>(c, "condition", "statement");
        res.holds = get_required<bool>(c, "condition", "holds");
        res.required = get_required<bool>(c, "condition", "required");
        report.conditions.push_back(std::move(res));
    }
    report.corollaries_used =
        get_optional<std::vector<std::string>>(doc, "report", "corollaries_used", {});
    report.reduction = get_optional<std::string>(doc, "report", "reduction", "");
    report.unverifiable_assumptions =
        get_optional<std::vector<std::string>>(doc, "report", "unverifiable_assumptions", {});
    report.narrative = get_optional<std::string>(doc, "report", "narrative", "");
    return report;
}

namespace {

json counts_to_json(const CellCounts& c) {
    json out = json::array();
    for (int i = 0; i < 2; ++i) {
        json row = json::array();
        for (int j = 0; j < 2; ++j) row.push_back({c.n[i][j][0], c.n[i][j][1]});
        out.push_back(row);
    }
    return out;
}

CellCounts counts_from_json(const json& j) {
    CellCounts c;
    for (int i = 0; i < 2; ++i)
        for (int j2 = 0; j2 < 2; ++j2)
            for (int y = 0; y < 2; ++y) c.n[i][j2][y] = j.at(i).at(j2).at(y).get<double>();
    return c;
}

}  // namespace

std::string to_json(const TestReport& report, int indent) {
    json strata = json::array();
    for (const auto& s : report.strata) {
        strata.push_back({{"key", s.key},
                          {"label", format_stratum(report.context_columns, s.key)},
                          {"counts", counts_to_json(s.counts)},
                          {"estimable", s.estimable},
                          {"value", number_or_null(s.value)},
                          {"se", number_or_null(s.se)},
                          {"z", number_or_null(s.z)},
                          {"p", number_or_null(s.p)},
                          {"corrected", s.corrected},
                          {"note", s.note}});
    }
    json doc = {{"statistic", to_string(report.stat)},
                {"mode", to_string(report.mode)},
                {"correction", report.correction},
                {"alpha", report.alpha},
                {"context_columns", report.context_columns},
                {"strata", strata},
                {"summary",
                 {{"n_strata", report.strata.size()},
                  {"n_estimable", report.n_estimable},
                  {"n_rejected", report.n_rejected},
                  {"min_p", report.min_p ? json(*report.min_p) : json(nullptr)}}},
                {"caveat", report.caveat}};
    return doc.dump(indent);
}

TestReport test_report_from_json(const std::string& json_text) {
    json doc = parse_text(json_text);
    expect_keys(doc, "report",
                {"statistic", "mode", "correction", "alpha", "context_columns", "strata",
                 "summary", "caveat"});
    TestReport report;
    std::string stat = get_required<std::string>(doc, "report", "statistic");
    if (stat == "superadditivity")
        report.stat = StatKind::Superadditivity;
    else if (stat == "excess-risk")
        report.stat = StatKind::ExcessRisk;
    else
        schema_error("unknown statistic '" + stat + "'");
    std::string mode = get_required<std::string>(doc, "report", "mode");
    if (mode == "prospective")
        report.mode = SamplingMode::Prospective;
    else if (mode == "retrospective")
        report.mode = SamplingMode::Retrospective;
    else
        schema_error("unknown mode '" + mode + "'");
    report.correction = get_required<bool>(doc, "report", "correction");
    report.alpha = get_required<double>(doc, "report", "alpha");
    report.context_columns =
        get_optional<std::vector<std::string>>(doc, "report", "context_columns", {});
    for (const auto& s : doc.at("strata")) {
        StratumResult res;
        res.key = get_optional<std::vector<double>>(s, "stratum", "key", {});
        res.counts = counts_from_json(s.at("counts"));
        res.estimable = get_required<bool>(s, "stratum", "estimable");
        res.value = from_number_or_null(s.at("value"));
        res.se = from_number_or_null(s.at("se"));
        res.z = from_number_or_null(s.at("z"));
        res.p = from_number_or_null(s.at("p"));
        res.corrected = get_required<bool>(s, "stratum", "corrected");
        res.note = get_optional<std::string>(s, "stratum", "note", "");
        report.strata.push_back(std::move(res));
    }
    const json& summary = doc.at("summary");
    report.n_estimable = get_required<std::size_t>(summary, "summary", "n_estimable");
    report.n_rejected = get_required<std::size_t>(summary, "summary", "n_rejected");
    if (summary.contains("min_p") && !summary.at("min_p").is_null())
        report.min_p = summary.at("min_p").get<double>();
    report.caveat = get_optional<std::string>(doc, "report", "caveat", "");
    return report;
}

GenerativeSpec parse_generative_spec(const std::string& json_text) {
    json doc = parse_text(json_text);
    expect_keys(doc, "spec",
                {"context", "a_values", "b_values", "ab_law", "outcome", "monotone", "null_model"});
    GenerativeSpec spec;

    if (doc.contains("context")) {
        const json& ctx = doc.at("context");
        expect_keys(ctx, "context", {"variables", "support"});
        for (const auto& v : ctx.at("variables")) {
            expect_keys(v, "context variable", {"name", "observed"});
            spec.context_vars.push_back({get_required<std::string>(v, "context variable", "name"),
                                         get_optional<bool>(v, "context variable", "observed", true)});
        }
        for (const auto& atom : ctx.at("support")) {
            expect_keys(atom, "context atom", {"values", "prob"});
            spec.context_law.push_back(
                {get_required<std::vector<double>>(atom, "context atom", "values"),
                 get_required<double>(atom, "context atom", "prob")});
        }
    } else {
        spec.context_law = {{{}, 1.0}};
    }

    spec.a_values = get_required<std::vector<double>>(doc, "spec", "a_values");
    spec.b_values = get_required<std::vector<double>>(doc, "spec", "b_values");

    if (!doc.contains("ab_law")) schema_error("spec is missing 'ab_law'");
    for (const auto& entry : doc.at("ab_law")) {
        expect_keys(entry, "ab_law entry", {"c", "cells"});
        AbLawEntry e;
        e.c_values = get_optional<std::vector<double>>(entry, "ab_law entry", "c", {});
        for (const auto& cell : entry.at("cells")) {
            expect_keys(cell, "ab cell", {"a", "b", "prob"});
            e.cells.push_back({get_required<double>(cell, "ab cell", "a"),
                               get_required<double>(cell, "ab cell", "b"),
                               get_required<double>(cell, "ab cell", "prob")});
        }
        spec.ab_law.push_back(std::move(e));
    }

    if (!doc.contains("outcome")) schema_error("spec is missing 'outcome'");
    const json& outcome = doc.at("outcome");
    std::string type = get_required<std::string>(outcome, "outcome", "type");
    if (type == "point-null") {
        expect_keys(outcome, "outcome", {"type", "lambda", "mu"});
        NoisyOrLaw law;
        law.lambda = get_required<std::vector<std::vector<double>>>(outcome, "outcome", "lambda");
        law.mu = get_required<std::vector<std::vector<double>>>(outcome, "outcome", "mu");
        spec.outcome = std::move(law);
    } else if (type == "table") {
        expect_keys(outcome, "outcome", {"type", "pi"});
        TableLaw law;
        law.pi = get_required<std::vector<std::vector<std::vector<double>>>>(outcome, "outcome",
                                                                             "pi");
        spec.outcome = std::move(law);
    } else if (type == "boolean-and") {
        expect_keys(outcome, "outcome", {"type", "flip_noise"});
        spec.outcome = BooleanAndLaw{get_optional<double>(outcome, "outcome", "flip_noise", 0.0)};
    } else {
        schema_error("unknown outcome law '" + type + "'");
    }

    spec.monotone_declared = get_optional<bool>(doc, "spec", "monotone", false);
    spec.null_model = get_optional<bool>(doc, "spec", "null_model", false);
    spec.validate();
    return spec;
}

std::string to_json(const GenerativeSpec& spec, int indent) {
    json doc;
    json vars = json::array();
    for (const auto& v : spec.context_vars)
        vars.push_back({{"name", v.name}, {"observed", v.observed}});
    json support = json::array();
    for (const auto& atom : spec.context_law)
        support.push_back({{"values", atom.values}, {"prob", atom.prob}});
    doc["context"] = {{"variables", vars}, {"support", support}};
    doc["a_values"] = spec.a_values;
    doc["b_values"] = spec.b_values;
    json ab = json::array();
    for (const auto& entry : spec.ab_law) {
        json cells = json::array();
        for (const auto& cell : entry.cells)
            cells.push_back({{"a", cell.a}, {"b", cell.b}, {"prob", cell.prob}});
        ab.push_back({{"c", entry.c_values}, {"cells", cells}});
    }
    doc["ab_law"] = ab;
    if (const auto* p = std::get_if<NoisyOrLaw>(&spec.outcome)) {
        doc["outcome"] = {{"type", "point-null"}, {"lambda", p->lambda}, {"mu", p->mu}};
    } else if (const auto* t = std::get_if<TableLaw>(&spec.outcome)) {
        doc["outcome"] = {{"type", "table"}, {"pi", t->pi}};
    } else {
        doc["outcome"] = {{"type", "boolean-and"},
                          {"flip_noise", std::get<BooleanAndLaw>(spec.outcome).flip_noise}};
    }
    doc["monotone"] = spec.monotone_declared;
    doc["null_model"] = spec.null_model;
    return doc.dump(indent);
}

std::string spec_digest(const GenerativeSpec& spec) {
    std::string canon = to_json(spec, -1);
    std::uint64_t hash = 1469598103934665603ull;  // FNV-1a
    for (unsigned char ch : canon) {
        hash ^= ch;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace mechint
