#include "mechint/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mechint/identify.hpp"

namespace mechint::validation {

namespace {

// Binary relabel: 0 <-> 1 in the named column.
void flip_binary_column(DataTable& t, const std::string& column) {
    std::size_t idx = t.column_index(column);
    for (auto& row : t.rows) row[idx] = row[idx] == 0.0 ? 1.0 : 0.0;
}

int sign_of(double v, double tol = 0.0) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

}  // namespace

McResult rejection_rate(const GenerativeSpec& spec, const McOptions& opt) {
    spec.validate();
    TestConfig config;
    config.stat = opt.stat;
    config.cutoffs = {opt.tau_a, opt.tau_b};
    config.context_columns = spec.observed_context_names();
    config.alpha = opt.alpha;
    config.correction = opt.correction;

    McResult result;
    result.replicates = opt.replicates;
    for (std::size_t r = 0; r < opt.replicates; ++r) {
        DataTable records = sample_observational(spec, opt.samples, opt.seed + r);
        if (opt.relabel_ab) {
            flip_binary_column(records, config.a_column);
            flip_binary_column(records, config.b_column);
        }
        TestReport report = test_interaction(records, config);
        if (report.n_rejected > 0) ++result.rejections;
    }
    result.rate = static_cast<double>(result.rejections) / static_cast<double>(opt.replicates);
    return result;
}

SignAgreementResult retrospective_sign_agreement(const GenerativeSpec& spec, std::size_t n_cases,
                                                 std::size_t n_controls, std::size_t replicates,
                                                 std::uint64_t seed, StatKind stat) {
    spec.validate();
    SignAgreementResult result;
    result.replicates = replicates;

    // Exact prospective population statistic; all gallery specs are binary
    // so the zero cutoffs are the canonical dichotomization.
    auto risks = estimate_risks(population_counts(spec, 0.0, 0.0), false);
    if (risks.strata.size() != 1)
        throw std::invalid_argument("sign agreement expects a single-stratum spec");
    double population = (stat == StatKind::Superadditivity
                             ? superadditivity_stat(risks, risks.strata[0].key)
                             : excess_risk_stat(risks, risks.strata[0].key))
                            .value;
    result.population_sign = sign_of(population);

    TestConfig config;
    config.stat = stat;
    config.mode = SamplingMode::Retrospective;
    config.correction = true;  // guards against empty case cells in small samples

    for (std::size_t r = 0; r < replicates; ++r) {
        DataTable records = sample_case_control(spec, n_cases, n_controls, seed + r);
        TestReport report = test_interaction(records, config);
        if (!report.strata.empty() && report.strata[0].estimable &&
            sign_of(report.strata[0].value) == result.population_sign)
            ++result.agreements;
    }
    result.rate = static_cast<double>(result.agreements) / static_cast<double>(replicates);
    return result;
}

std::vector<GoldenOutcome> run_golden_examples() {
    std::vector<GoldenOutcome> out;
    for (const auto& gc : gallery::golden_cases()) {
        GoldenOutcome res;
        res.id = gc.id;
        res.expected_identifiable = gc.expect_identifiable;
        res.expected_statistic = gc.expect_statistic;
        auto d = gallery::diagram(gc.diagram_key);
        auto report = plan_identification(d, gc.roles, gc.query, gc.flags);
        res.actual_identifiable = report.identifiable;
        res.actual_statistic = report.statistic;
        res.pass = res.actual_identifiable == res.expected_identifiable &&
                   (!gc.expect_identifiable || res.actual_statistic == res.expected_statistic);
        out.push_back(std::move(res));
    }
    return out;
}

GenerativeSpec random_point_null_spec(std::mt19937_64& rng) {
    auto unit = [&rng] { return (rng() >> 11) * 0x1.0p-53; };

    GenerativeSpec spec;
    spec.context_vars = {{"G", true}};
    double p = 0.2 + 0.6 * unit();
    spec.context_law = {{{0}, p}, {{1}, 1.0 - p}};
    spec.a_values = {0, 1, 2};
    spec.b_values = {0, 1, 2};

    // Factors independent given the observed context, every cell populated.
    for (double c : {0.0, 1.0}) {
        double pa[3], pb[3], ta = 0.0, tb = 0.0;
        for (int k = 0; k < 3; ++k) {
            pa[k] = 0.05 + unit();
            pb[k] = 0.05 + unit();
            ta += pa[k];
            tb += pb[k];
        }
        AbLawEntry entry;
        entry.c_values = {c};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                entry.cells.push_back({spec.a_values[static_cast<std::size_t>(i)],
                                       spec.b_values[static_cast<std::size_t>(j)],
                                       (pa[i] / ta) * (pb[j] / tb)});
        // normalize exactly despite rounding
        double total = 0.0;
        for (const auto& cell : entry.cells) total += cell.prob;
        for (auto& cell : entry.cells) cell.prob /= total;
        spec.ab_law.push_back(std::move(entry));
    }

    auto monotone_factor = [&] {
        std::vector<double> v{0.05 + 0.95 * unit(), 0.05 + 0.95 * unit(), 0.05 + 0.95 * unit()};
        std::sort(v.begin(), v.end(), std::greater<double>());
        return v;
    };
    NoisyOrLaw law;
    law.lambda = {monotone_factor(), monotone_factor()};
    law.mu = {monotone_factor(), monotone_factor()};
    spec.outcome = std::move(law);
    spec.monotone_declared = true;
    spec.null_model = true;
    spec.validate();
    return spec;
}

PopulationScanResult population_null_scan(std::size_t n_specs, std::uint64_t seed,
                                          double tolerance) {
    PopulationScanResult result;
    result.specs = n_specs;
    result.max_value = -std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < n_specs; ++s) {
        GenerativeSpec spec = random_point_null_spec(rng);
        // every non-degenerate threshold pair over the 3-value domains
        for (double tau_a : {0.0, 1.0}) {
            for (double tau_b : {0.0, 1.0}) {
                auto risks = estimate_risks(population_counts(spec, tau_a, tau_b), false);
                for (const auto& sr : risks.strata) {
                    double value = superadditivity_stat(risks, sr.key).value;
                    ++result.points_checked;
                    result.max_value = std::max(result.max_value, value);
                    if (value > tolerance) ++result.violations;
                }
            }
        }
    }
    return result;
}

}  // namespace mechint::validation
