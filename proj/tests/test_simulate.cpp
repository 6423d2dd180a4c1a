#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mechint/gallery.hpp"
#include "mechint/simulate.hpp"
#include "mechint/validation.hpp"

using namespace mechint;
using doctest::Approx;

namespace {

// lambda = (1, 0.6), mu = (1, 0.5): S = [[1, .5], [.6, .3]].
GenerativeSpec product_demo() {
    GenerativeSpec s;
    s.context_law = {{{}, 1.0}};
    s.a_values = {0, 1};
    s.b_values = {0, 1};
    s.ab_law = {{{}, {{0, 0, 0.25}, {0, 1, 0.25}, {1, 0, 0.25}, {1, 1, 0.25}}}};
    s.outcome = NoisyOrLaw{{{1.0, 0.6}}, {{1.0, 0.5}}};
    s.monotone_declared = true;
    s.null_model = true;
    return s;
}

GenerativeSpec table_spec(std::vector<std::vector<double>> pi) {
    GenerativeSpec s;
    s.context_law = {{{}, 1.0}};
    s.a_values = {0, 1};
    s.b_values = {0, 1};
    s.ab_law = {{{}, {{0, 0, 0.25}, {0, 1, 0.25}, {1, 0, 0.25}, {1, 1, 0.25}}}};
    s.outcome = TableLaw{{std::move(pi)}};
    return s;
}

std::string to_csv(const DataTable& t) {
    std::ostringstream out;
    write_csv(t, out);
    return out.str();
}

}  // namespace

TEST_CASE("gallery specs validate") {
    CHECK_NOTHROW(gallery::point_null_calibration().validate());
    CHECK_NOTHROW(gallery::boolean_and(0.05).validate());
    CHECK_NOTHROW(gallery::correlated_binary_null().validate());
    CHECK_NOTHROW(gallery::negative_direction_null().validate());
    CHECK_NOTHROW(gallery::rare_interacting().validate());
    CHECK_NOTHROW(gallery::stratified_point_null().validate());
}

TEST_CASE("spec validation rejects inconsistencies") {
    auto s = product_demo();
    SUBCASE("unnormalized context") {
        s.context_law[0].prob = 0.9;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SUBCASE("unnormalized ab law") {
        s.ab_law[0].cells[0].prob = 0.5;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SUBCASE("increasing lambda") {
        s.outcome = NoisyOrLaw{{{0.6, 1.0}}, {{1.0, 0.5}}};
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SUBCASE("boolean law needs binary domains") {
        s.a_values = {0, 1, 2};
        s.outcome = BooleanAndLaw{0.0};
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SUBCASE("null model with a zero pi") {
        s.outcome = NoisyOrLaw{{{1.0, 0.0}}, {{1.0, 0.5}}};
        s.null_model = true;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SUBCASE("monotone-declared table violating monotonicity") {
        s.outcome = TableLaw{{{{0.2, 0.3}, {0.9, 0.1}}}};
        s.monotone_declared = true;
        s.null_model = false;
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
    SUBCASE("reserved context name") {
        s.context_vars = {{"A", true}};
        s.context_law = {{{0}, 1.0}};
        CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    }
}

TEST_CASE("true_pi") {
    auto demo = product_demo();
    CHECK(true_pi(demo, {}, 1, 1) == Approx(0.30));
    CHECK(true_pi(demo, {}, 0, 0) == Approx(1.0));
    CHECK(true_pi(demo, {}, 1, 0) == Approx(0.6));

    // pi(0,0) = 1 makes the product law multiplicative at the corner
    CHECK(true_pi(demo, {}, 1, 1) ==
          Approx(true_pi(demo, {}, 1, 0) * true_pi(demo, {}, 0, 1)).epsilon(1e-12));

    auto andlaw = gallery::boolean_and(0.0);
    CHECK(true_pi(andlaw, {}, 1, 1) == 0.0);
    CHECK(true_pi(andlaw, {}, 1, 0) == 1.0);
    CHECK(true_pi(andlaw, {}, 0, 1) == 1.0);
    CHECK(true_pi(andlaw, {}, 0, 0) == 1.0);

    CHECK_THROWS_AS(true_pi(demo, {}, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(true_pi(demo, {0}, 1, 1), std::invalid_argument);
}

TEST_CASE("point null check") {
    CHECK(check_point_null(product_demo()).holds);
    CHECK(check_point_null(gallery::stratified_point_null()).holds);
    CHECK_FALSE(check_point_null(gallery::boolean_and(0.0)).holds);

    // a table that happens to factor passes
    auto factored = table_spec({{0.9 * 0.8, 0.9 * 0.3}, {0.4 * 0.8, 0.4 * 0.3}});
    CHECK(check_point_null(factored).holds);
}

TEST_CASE("property: every product-form spec satisfies both null hypotheses") {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 50; ++trial) {
        auto spec = validation::random_point_null_spec(rng);
        auto point = check_point_null(spec);
        auto interval = check_interval_null(spec);
        CHECK(point.holds);
        CHECK(interval.holds);
        CHECK(interval.skipped == 0);  // positivity is enforced for null models
    }
}

TEST_CASE("interval null check") {
    CHECK(check_interval_null(product_demo()).holds);
    CHECK_FALSE(check_interval_null(gallery::boolean_and(0.0)).holds);

    // raising pi(1,1) above the product bound is antagonistic, not synergic
    auto raised = table_spec({{1.0, 0.5}, {0.6, std::min(1.0, 0.3 + 0.1)}});
    CHECK(check_interval_null(raised).holds);
    CHECK_FALSE(check_point_null(raised).holds);

    CHECK(exhibits_interaction(gallery::boolean_and(0.0)));
    CHECK(exhibits_interaction(gallery::rare_interacting()));
    CHECK_FALSE(exhibits_interaction(product_demo()));
    CHECK_FALSE(exhibits_interaction(gallery::negative_direction_null()));
}

TEST_CASE("property: interval-null violations are exactly the interaction points") {
    std::mt19937_64 rng(8080);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<double>> pi(2, std::vector<double>(2));
        for (auto& row : pi)
            for (auto& v : row) v = 0.01 + 0.99 * ((rng() >> 11) * 0x1.0p-53);
        auto spec = table_spec(pi);
        bool eqinter = pi[1][1] * pi[0][0] < pi[0][1] * pi[1][0] - 1e-9;
        CHECK(check_interval_null(spec).holds == !eqinter);
    }
}

TEST_CASE("property: monotone specs have non-increasing pi") {
    for (const auto& spec : {gallery::point_null_calibration(), gallery::stratified_point_null(),
                             gallery::boolean_and(0.05), gallery::rare_interacting()}) {
        for (const auto& atom : spec.context_law) {
            for (std::size_t ai = 1; ai < spec.a_values.size(); ++ai)
                for (std::size_t bi = 0; bi < spec.b_values.size(); ++bi)
                    CHECK(true_pi(spec, atom.values, spec.a_values[ai], spec.b_values[bi]) <=
                          true_pi(spec, atom.values, spec.a_values[ai - 1], spec.b_values[bi]) +
                              1e-12);
            for (std::size_t ai = 0; ai < spec.a_values.size(); ++ai)
                for (std::size_t bi = 1; bi < spec.b_values.size(); ++bi)
                    CHECK(true_pi(spec, atom.values, spec.a_values[ai], spec.b_values[bi]) <=
                          true_pi(spec, atom.values, spec.a_values[ai], spec.b_values[bi - 1]) +
                              1e-12);
        }
    }
}

TEST_CASE("observational sampling") {
    auto demo = product_demo();
    CHECK_THROWS_AS(sample_observational(demo, 0, 1), std::invalid_argument);

    SUBCASE("seed determinism, byte for byte") {
        auto r1 = sample_observational(demo, 500, 42);
        auto r2 = sample_observational(demo, 500, 42);
        CHECK(to_csv(r1) == to_csv(r2));
        auto r3 = sample_observational(demo, 500, 43);
        CHECK(to_csv(r1) != to_csv(r3));
    }
    SUBCASE("noiseless conjunction is deterministic") {
        auto records = sample_observational(gallery::boolean_and(0.0), 2000, 7);
        auto ai = records.column_index("A");
        auto bi = records.column_index("B");
        auto yi = records.column_index("Y");
        for (const auto& row : records.rows)
            CHECK(row[yi] == ((row[ai] == 1.0 && row[bi] == 1.0) ? 1.0 : 0.0));
    }
    SUBCASE("empirical cell frequencies match the law") {
        const std::size_t n = 1000000;
        auto records = sample_observational(demo, n, 4711);
        auto ai = records.column_index("A");
        auto bi = records.column_index("B");
        auto yi = records.column_index("Y");
        double neg[2][2] = {}, tot[2][2] = {};
        for (const auto& row : records.rows) {
            int i = static_cast<int>(row[ai]);
            int j = static_cast<int>(row[bi]);
            tot[i][j] += 1.0;
            if (row[yi] == 0.0) neg[i][j] += 1.0;
        }
        const double expected[2][2] = {{1.0, 0.5}, {0.6, 0.3}};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double p = neg[i][j] / tot[i][j];
                double se = std::sqrt(expected[i][j] * (1 - expected[i][j]) / tot[i][j]);
                CHECK(std::abs(p - expected[i][j]) <= 3 * se + 1e-9);
            }
    }
}

TEST_CASE("interventional sampling") {
    auto demo = product_demo();
    SUBCASE("forced factor values") {
        auto records = sample_interventional(demo, 1, 1, {}, 100000, 99);
        auto ai = records.column_index("A");
        auto bi = records.column_index("B");
        auto yi = records.column_index("Y");
        double neg = 0;
        for (const auto& row : records.rows) {
            CHECK(row[ai] == 1.0);
            CHECK(row[bi] == 1.0);
            if (row[yi] == 0.0) neg += 1.0;
        }
        double p = neg / static_cast<double>(records.row_count());
        double se = std::sqrt(0.3 * 0.7 / static_cast<double>(records.row_count()));
        CHECK(std::abs(p - 0.3) <= 3 * se);
    }
    SUBCASE("deterministic law under intervention") {
        auto records = sample_interventional(gallery::boolean_and(0.0), 1, 0, {}, 1000, 5);
        auto yi = records.column_index("Y");
        for (const auto& row : records.rows) CHECK(row[yi] == 0.0);
    }
    SUBCASE("observational conditioning equals intervention by construction") {
        auto strat = gallery::stratified_point_null();
        const std::size_t n = 400000;
        auto obs = sample_observational(strat, n, 2025);
        auto gi = obs.column_index("G");
        auto ai = obs.column_index("A");
        auto bi = obs.column_index("B");
        auto yi = obs.column_index("Y");
        double neg = 0, tot = 0;
        for (const auto& row : obs.rows) {
            if (row[gi] == 1.0 && row[ai] == 1.0 && row[bi] == 1.0) {
                tot += 1.0;
                if (row[yi] == 0.0) neg += 1.0;
            }
        }
        auto inter = sample_interventional(strat, 1, 1, {}, n / 4, 2026);
        double neg2 = 0, tot2 = 0;
        auto gi2 = inter.column_index("G");
        auto yi2 = inter.column_index("Y");
        for (const auto& row : inter.rows) {
            if (row[gi2] == 1.0) {
                tot2 += 1.0;
                if (row[yi2] == 0.0) neg2 += 1.0;
            }
        }
        double p1 = neg / tot, p2 = neg2 / tot2;
        double se = std::sqrt(p1 * (1 - p1) / tot + p2 * (1 - p2) / tot2);
        CHECK(std::abs(p1 - p2) <= 4 * se + 1e-9);
        // and both match the exact law
        CHECK(std::abs(p1 - true_pi(strat, {1}, 1, 1)) <= 4 * std::sqrt(p1 * (1 - p1) / tot));
    }
    SUBCASE("context overrides must stay on support") {
        auto strat = gallery::stratified_point_null();
        CHECK_NOTHROW(sample_interventional(strat, 1, 1, {{"G", 1.0}}, 10, 3));
        CHECK_THROWS_AS(sample_interventional(strat, 1, 1, {{"G", 7.0}}, 10, 3),
                        std::invalid_argument);
        CHECK_THROWS_AS(sample_interventional(strat, 1, 1, {{"Q", 1.0}}, 10, 3),
                        std::invalid_argument);
    }
    SUBCASE("overridden context is what the outcome law sees") {
        auto strat = gallery::stratified_point_null();
        auto records = sample_interventional(strat, 1, 1, {{"G", 0.0}}, 200000, 11);
        auto gi = records.column_index("G");
        auto yi = records.column_index("Y");
        double neg = 0;
        for (const auto& row : records.rows) {
            CHECK(row[gi] == 0.0);
            if (row[yi] == 0.0) neg += 1.0;
        }
        double expect = true_pi(strat, {0}, 1, 1);  // 0.6 * 0.5
        double p = neg / static_cast<double>(records.row_count());
        CHECK(std::abs(p - expect) <=
              3 * std::sqrt(expect * (1 - expect) / static_cast<double>(records.row_count())));
    }
}

TEST_CASE("case-control sampling") {
    auto rare = gallery::rare_interacting();
    SUBCASE("exact quotas") {
        auto records = sample_case_control(rare, 100, 100, 17);
        auto yi = records.column_index("Y");
        std::size_t cases = 0;
        for (const auto& row : records.rows) cases += row[yi] == 1.0;
        CHECK(records.row_count() == 200);
        CHECK(cases == 100);
    }
    SUBCASE("zero quota rejected") {
        CHECK_THROWS_AS(sample_case_control(rare, 0, 100, 17), std::invalid_argument);
    }
    SUBCASE("impossible class rejected") {
        auto degenerate = table_spec({{1.0, 1.0}, {1.0, 1.0}});  // Y = 1 never happens
        CHECK_THROWS_AS(sample_case_control(degenerate, 10, 10, 17), std::invalid_argument);
    }
    SUBCASE("rare outcome: sample odds ratio tracks the population risk ratio") {
        auto records = sample_case_control(rare, 5000, 5000, 23);
        auto ai = records.column_index("A");
        auto bi = records.column_index("B");
        auto yi = records.column_index("Y");
        double n[2][2][2] = {};
        for (const auto& row : records.rows)
            n[static_cast<int>(row[ai])][static_cast<int>(row[bi])]
             [static_cast<int>(row[yi])] += 1.0;
        double or11 = (n[1][1][1] / n[1][1][0]) / (n[0][0][1] / n[0][0][0]);
        double rr11 = (1.0 - true_pi(rare, {}, 1, 1)) / (1.0 - true_pi(rare, {}, 0, 0));
        CHECK(rr11 == Approx(10.0));
        CHECK(or11 == Approx(rr11).epsilon(0.15));
    }
}

TEST_CASE("exact population tables") {
    auto demo = product_demo();
    auto counts = population_counts(demo, 0.0, 0.0);
    auto risks = estimate_risks(counts, false);
    REQUIRE(risks.strata.size() == 1);
    const auto& sr = risks.strata[0];
    CHECK(sr.cell[0][0].r == Approx(0.0));
    CHECK(sr.cell[0][1].r == Approx(0.5));
    CHECK(sr.cell[1][0].r == Approx(0.4));
    CHECK(sr.cell[1][1].r == Approx(0.7));
    CHECK(superadditivity_stat(risks, {}).value == Approx(-0.2).epsilon(1e-12));

    CHECK(population_outcome_rate(demo) == Approx(0.4));

    auto strat = gallery::stratified_point_null();
    auto counts2 = population_counts(strat, 0.0, 0.0);
    CHECK(counts2.strata.size() == 2);
    auto risks2 = estimate_risks(counts2, false);
    // product law: population superadditivity is -(L1-L0)(M1-M0) <= 0 per stratum
    for (const auto& key : {StratumKey{0.0}, StratumKey{1.0}})
        CHECK(superadditivity_stat(risks2, key).value <= 1e-12);
}

TEST_CASE("full pipeline on simulated data") {
    SUBCASE("noisy conjunction rejects decisively") {
        auto records = sample_observational(gallery::boolean_and(0.05), 100000, 314);
        TestConfig config;
        auto report = test_interaction(records, config);
        REQUIRE(report.strata.size() == 1);
        CHECK(report.strata[0].p < 0.001);
    }
    SUBCASE("product-form data stays within three standard errors") {
        auto records = sample_observational(product_demo(), 100000, 315);
        TestConfig config;
        auto report = test_interaction(records, config);
        REQUIRE(report.strata.size() == 1);
        CHECK(report.strata[0].estimable);
        CHECK(report.strata[0].value <= 3.0 * report.strata[0].se);
    }
    SUBCASE("per-stratum results under a stratified law") {
        auto records = sample_observational(gallery::stratified_point_null(), 100000, 316);
        TestConfig config;
        config.context_columns = {"G"};
        auto report = test_interaction(records, config);
        REQUIRE(report.strata.size() == 2);
        for (const auto& s : report.strata) CHECK(s.value <= 3.0 * s.se);
    }
}

TEST_CASE("population boundary null is exactly zero") {
    auto cal = gallery::point_null_calibration();
    auto risks = estimate_risks(population_counts(cal, 0.0, 0.0), false);
    CHECK(superadditivity_stat(risks, {}).value == Approx(0.0).epsilon(1e-12));

    auto corr = gallery::correlated_binary_null();
    auto risks2 = estimate_risks(population_counts(corr, 0.0, 0.0), false);
    CHECK(superadditivity_stat(risks2, {}).value == Approx(0.0).epsilon(1e-12));
}
