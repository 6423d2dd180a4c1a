#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mechint/gallery.hpp"
#include "mechint/serialize.hpp"

using namespace mechint;

namespace {

const char* kRequestJson = R"({
  "roles": {"a": "A", "b": "B", "y": "Y", "c": ["G"], "sigma_ab": "sAB"},
  "query": {"kind": "context-specific", "context": ["G"]},
  "flags": {"monotone_effects_asserted": true, "uniform_positivity_asserted": true}
})";

}  // namespace

TEST_CASE("analysis request parsing") {
    auto req = parse_analysis_request(kRequestJson);
    CHECK(req.roles.a == "A");
    CHECK(req.roles.c == NodeSet{"G"});
    CHECK(req.roles.u.empty());
    CHECK(req.query.kind == QueryKind::ContextSpecific);
    CHECK(req.query.context == NodeSet{"G"});
    CHECK(req.flags.monotone_effects_asserted);
    CHECK(req.flags.effect_direction_known);  // default
    CHECK_FALSE(req.flags.binary_ab);
}

TEST_CASE("analysis request round trip") {
    auto req = parse_analysis_request(kRequestJson);
    auto back = parse_analysis_request(to_json(req));
    CHECK(back == req);
}

TEST_CASE("analysis request errors") {
    CHECK_THROWS_AS(parse_analysis_request("{"), ParseError);
    CHECK_THROWS_AS(parse_analysis_request(R"({"roles": {"a": "A"}})"), std::invalid_argument);
    CHECK_THROWS_AS(
        parse_analysis_request(
            R"({"roles": {"a":"A","b":"B","y":"Y","sigma_ab":"s","typo":1}})"),
        std::invalid_argument);
    CHECK_THROWS_AS(
        parse_analysis_request(
            R"({"roles": {"a":"A","b":"B","y":"Y","sigma_ab":"s"}, "query": {"kind": "bogus"}})"),
        std::invalid_argument);
}

TEST_CASE("identification report round trip") {
    for (const auto& gc : gallery::golden_cases()) {
        auto d = gallery::diagram(gc.diagram_key);
        auto report = plan_identification(d, gc.roles, gc.query, gc.flags);
        auto back = identification_report_from_json(to_json(report));
        CAPTURE(gc.id);
        CHECK(back == report);
    }
}

TEST_CASE("test report round trip") {
    DataTable t;
    t.columns = {"G", "A", "B", "Y"};
    t.rows = {{0, 1, 1, 1}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 0},
              {1, 1, 1, 1}};  // second stratum is inestimable
    TestConfig config;
    config.context_columns = {"G"};
    auto report = test_interaction(t, config);
    REQUIRE(report.strata.size() == 2);
    CHECK(report.strata[0].estimable);
    CHECK_FALSE(report.strata[1].estimable);

    auto back = test_report_from_json(to_json(report));
    CHECK(back == report);
}

TEST_CASE("generative spec round trip and digest stability") {
    auto specs = {gallery::point_null_calibration(), gallery::boolean_and(0.05),
                  gallery::correlated_binary_null(), gallery::negative_direction_null(),
                  gallery::rare_interacting(), gallery::stratified_point_null()};
    for (const auto& spec : specs) {
        auto text = to_json(spec);
        auto back = parse_generative_spec(text);
        CHECK(to_json(back) == text);
        CHECK(spec_digest(back) == spec_digest(spec));
        CHECK(spec_digest(spec).size() == 16);
    }
    CHECK(spec_digest(gallery::boolean_and(0.05)) != spec_digest(gallery::boolean_and(0.10)));
}

TEST_CASE("generative spec parsing errors") {
    CHECK_THROWS_AS(parse_generative_spec("not json"), ParseError);
    CHECK_THROWS_AS(parse_generative_spec("{}"), std::invalid_argument);
    // schema fine, content invalid: probabilities do not sum to one
    auto spec = gallery::point_null_calibration();
    auto text = to_json(spec);
    auto broken = text;
    auto pos = broken.find("0.25");
    broken.replace(pos, 4, "0.30");
    CHECK_THROWS_AS(parse_generative_spec(broken), std::invalid_argument);
}
