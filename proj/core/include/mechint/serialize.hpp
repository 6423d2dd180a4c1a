#pragma once

// JSON bindings for the external file formats: analysis requests
// (roles + query + flags), identification and test reports, and generative
// specs.  All functions work on JSON text; malformed JSON raises ParseError,
// schema violations raise std::invalid_argument.

#include <string>

#include "mechint/identify.hpp"
#include "mechint/simulate.hpp"
#include "mechint/stats.hpp"

namespace mechint {

struct AnalysisRequest {
    RoleAssignment roles;
    InteractionQuery query;
    AssumptionFlags flags;

    friend bool operator==(const AnalysisRequest&, const AnalysisRequest&) = default;
};

AnalysisRequest parse_analysis_request(const std::string& json_text);
std::string to_json(const AnalysisRequest& req, int indent = 2);

std::string to_json(const IdentificationReport& report, int indent = 2);
IdentificationReport identification_report_from_json(const std::string& json_text);

std::string to_json(const TestReport& report, int indent = 2);
TestReport test_report_from_json(const std::string& json_text);

GenerativeSpec parse_generative_spec(const std::string& json_text);
std::string to_json(const GenerativeSpec& spec, int indent = 2);

/// FNV-1a hash of the canonical (compact) JSON serialization, as 16 hex
/// digits; stable across runs for auditing simulated outputs.
std::string spec_digest(const GenerativeSpec& spec);

}  // namespace mechint
