// mechint: influence-diagram identifiability checks, interaction tests on
// stratified data, structural-model simulation, and replication suites.
//
// Exit codes: 0 success (and identifiable verdicts), 1 input parse or I/O
// failure, 2 invalid configuration/roles/spec, 3 negative verdict (query not
// identifiable, or a replication suite failed).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mechint/gallery.hpp"
#include "mechint/identify.hpp"
#include "mechint/serialize.hpp"
#include "mechint/simulate.hpp"
#include "mechint/stats.hpp"
#include "mechint/validation.hpp"

namespace {

using namespace mechint;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

void emit_json(const std::string& path, const std::string& text) {
    if (path == "-")
        std::cout << text << "\n";
    else
        write_file(path, text + "\n");
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string num(double v, int precision = 4) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

// ---------------------------------------------------------------- check ---

void render_check_text(const IdentificationReport& report) {
    std::cout << "verdict: " << (report.identifiable ? "identifiable" : "NOT identifiable");
    if (report.identifiable) std::cout << " (test " << to_string(report.statistic) << ")";
    std::cout << "\n\nconditions:\n";
    for (const auto& cond : report.conditions) {
        std::string status = cond.holds ? "ok" : "FAIL";
        if (!cond.holds && !cond.required) status += " (waived)";
        std::cout << "  " << pad(cond.id, 13) << pad(status, 15) << cond.statement << "\n";
    }
    if (!report.corollaries_used.empty()) {
        std::cout << "applied:";
        for (const auto& label : report.corollaries_used) std::cout << " " << label;
        std::cout << "\n";
    }
    if (!report.reduction.empty()) std::cout << "reduction: " << report.reduction << "\n";
    std::cout << "\nassumptions not verifiable from data:\n";
    for (const auto& a : report.unverifiable_assumptions) std::cout << "  - " << a << "\n";
    std::cout << "\n" << report.narrative << "\n";
}

int cmd_check(const std::string& diagram_path, const std::string& request_path,
              const std::string& json_out, bool quiet) {
    InfluenceDiagram d = parse_diagram(read_file(diagram_path));
    AnalysisRequest req = parse_analysis_request(read_file(request_path));
    IdentificationReport report = plan_identification(d, req.roles, req.query, req.flags);
    if (!quiet) render_check_text(report);
    if (!json_out.empty()) emit_json(json_out, to_json(report));
    return report.identifiable ? 0 : 3;
}

// ----------------------------------------------------------------- test ---

void render_test_text(const TestReport& report) {
    std::cout << to_string(report.stat) << " test, " << to_string(report.mode) << " mode, alpha "
              << num(report.alpha) << (report.correction ? ", 0.5 correction" : "") << "\n";
    if (!report.caveat.empty()) std::cout << "note: " << report.caveat << "\n";
    std::cout << "\n"
              << pad("stratum", 18) << pad("n", 8) << pad("n11", 7) << pad("n10", 7) << pad("n01", 7)
              << pad("n00", 7) << pad("value", 10) << pad("se", 10) << pad("z", 9) << pad("p", 10)
              << "\n";
    for (const auto& s : report.strata) {
        std::cout << pad(format_stratum(report.context_columns, s.key), 18)
                  << pad(num(s.counts.total(), 10), 8);
        for (auto [i, j] : {std::pair{1, 1}, {1, 0}, {0, 1}, {0, 0}})
            std::cout << pad(num(s.counts.cell_total(i, j), 10), 7);
        if (s.estimable) {
            std::cout << pad(num(s.value), 10) << pad(num(s.se), 10) << pad(num(s.z), 9)
                      << pad(num(s.p), 10);
        } else {
            std::cout << "inestimable (" << s.note << ")";
        }
        std::cout << "\n";
    }
    std::cout << "\nstrata: " << report.strata.size() << ", estimable: " << report.n_estimable
              << ", rejecting H0 at alpha: " << report.n_rejected;
    if (report.min_p) std::cout << ", smallest p: " << num(*report.min_p);
    std::cout << "\n";
}

int cmd_test(const std::string& data_path, const TestConfig& config, const std::string& json_out,
             bool quiet) {
    DataTable records = read_csv_file(data_path);
    TestReport report = test_interaction(records, config);
    if (!quiet) render_test_text(report);
    if (!json_out.empty()) emit_json(json_out, to_json(report));
    return 0;
}

// ------------------------------------------------------------- simulate ---

void render_spec_summary(const GenerativeSpec& spec) {
    std::cout << "spec digest: " << spec_digest(spec) << "\n";
    std::cout << "true pi table (P[Y=0] with A, B set by intervention):\n";
    auto observed = spec.all_context_names();
    for (const auto& atom : spec.context_law) {
        std::cout << "  context";
        if (atom.values.empty()) {
            std::cout << " (none)";
        } else {
            for (std::size_t i = 0; i < atom.values.size(); ++i)
                std::cout << " " << observed[i] << "=" << format_csv_value(atom.values[i]);
        }
        std::cout << "  [P=" << num(atom.prob) << "]\n";
        std::cout << "    " << pad("", 8);
        for (double b : spec.b_values) std::cout << pad("b=" + format_csv_value(b), 9);
        std::cout << "\n";
        for (double a : spec.a_values) {
            std::cout << "    " << pad("a=" + format_csv_value(a), 8);
            for (double b : spec.b_values)
                std::cout << pad(num(true_pi(spec, atom.values, a, b)), 9);
            std::cout << "\n";
        }
    }
}

int cmd_simulate(const std::string& spec_path, const std::string& regime, std::size_t n,
                 std::uint64_t seed, const std::string& out_path, double a, double b,
                 const std::vector<std::string>& settings, std::size_t cases,
                 std::size_t controls) {
    GenerativeSpec spec = parse_generative_spec(read_file(spec_path));
    render_spec_summary(spec);

    DataTable records;
    if (regime == "obs") {
        records = sample_observational(spec, n, seed);
    } else if (regime == "set") {
        std::map<std::string, double> overrides;
        for (const auto& s : settings) {
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--set expects NAME=VALUE, got '" + s + "'");
            overrides[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
        }
        records = sample_interventional(spec, a, b, overrides, n, seed);
    } else if (regime == "case-control") {
        records = sample_case_control(spec, cases, controls, seed);
    } else {
        throw std::invalid_argument("unknown regime '" + regime + "'");
    }
    write_csv_file(records, out_path);
    std::cout << "wrote " << records.row_count() << " records to " << out_path << "\n";
    return 0;
}

// ------------------------------------------------------------ replicate ---

struct SuiteLine {
    std::string name;
    bool pass;
    std::string detail;
};

void print_suite(const std::vector<SuiteLine>& lines) {
    for (const auto& l : lines)
        std::cout << (l.pass ? "[PASS] " : "[FAIL] ") << pad(l.name, 34) << l.detail << "\n";
}

int cmd_replicate(const std::string& suite, std::size_t replicates, std::size_t samples,
                  std::uint64_t seed) {
    std::vector<SuiteLine> lines;
    if (suite == "examples") {
        for (const auto& res : validation::run_golden_examples()) {
            std::string detail = "expected " +
                                 std::string(res.expected_identifiable ? "identifiable" : "not") +
                                 ", got " + (res.actual_identifiable ? "identifiable" : "not");
            lines.push_back({res.id, res.pass, detail});
        }
    } else if (suite == "type1") {
        validation::McOptions opt;
        opt.replicates = replicates ? replicates : 500;
        opt.samples = samples ? samples : 10000;
        opt.seed = seed;
        auto res = validation::rejection_rate(gallery::point_null_calibration(), opt);
        lines.push_back({"type1-rejection-rate", res.rate <= 0.075,
                         num(res.rate) + " (" + std::to_string(res.rejections) + "/" +
                             std::to_string(res.replicates) + ", bound 0.075)"});
    } else if (suite == "power") {
        validation::McOptions opt;
        opt.replicates = replicates ? replicates : 200;
        opt.samples = samples ? samples : 10000;
        opt.seed = seed;
        auto res = validation::rejection_rate(gallery::boolean_and(0.05), opt);
        lines.push_back({"power-rejection-rate", res.rate >= 0.95,
                         num(res.rate) + " (" + std::to_string(res.rejections) + "/" +
                             std::to_string(res.replicates) + ", bound 0.95)"});
    } else if (suite == "retrospective") {
        auto res = validation::retrospective_sign_agreement(
            gallery::rare_interacting(), 500, 500, replicates ? replicates : 100, seed);
        lines.push_back({"retrospective-sign-agreement", res.rate >= 0.95,
                         num(res.rate) + " (" + std::to_string(res.agreements) + "/" +
                             std::to_string(res.replicates) + ", bound 0.95)"});
    } else {
        throw std::invalid_argument("unknown suite '" + suite +
                                    "' (expected examples, type1, power or retrospective)");
    }
    print_suite(lines);
    std::size_t failed = 0;
    for (const auto& l : lines) failed += !l.pass;
    std::cout << lines.size() - failed << "/" << lines.size() << " items passed\n";
    return failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mechanistic-interaction analysis toolkit"};
    app.require_subcommand(1);

    // check
    auto* check = app.add_subcommand("check", "decide identifiability of an interaction query");
    std::string diagram_path, request_path, check_json;
    bool check_quiet = false;
    check->add_option("diagram", diagram_path, "influence diagram DSL file")->required();
    check->add_option("request", request_path, "roles/query/flags JSON file")->required();
    check->add_option("--json", check_json, "write the report as JSON to this path ('-' = stdout)");
    check->add_flag("--quiet", check_quiet, "suppress the text report");

    // test
    auto* test = app.add_subcommand("test", "run the interaction test on stratified CSV data");
    std::string data_path, test_json, stat_name = "superadditivity", mode_name = "prospective";
    std::string context_spec;
    TestConfig config;
    double baseline_rate = -1.0;
    bool test_quiet = false;
    test->add_option("data", data_path, "CSV data file (header required)")->required();
    test->add_option("--stat", stat_name, "superadditivity | excess-risk")
        ->check(CLI::IsMember({"superadditivity", "excess-risk"}));
    test->add_option("--mode", mode_name, "prospective | retrospective")
        ->check(CLI::IsMember({"prospective", "retrospective"}));
    test->add_option("--tau-a", config.cutoffs.tau_a, "cutoff for A (alpha = 1 iff A > tau)");
    test->add_option("--tau-b", config.cutoffs.tau_b, "cutoff for B");
    test->add_option("--context", context_spec, "comma-separated context column names");
    test->add_option("--alpha", config.alpha, "one-sided significance level");
    test->add_flag("--correction", config.correction, "0.5 continuity correction");
    test->add_option("--a-col", config.a_column, "column holding A");
    test->add_option("--b-col", config.b_column, "column holding B");
    test->add_option("--y-col", config.y_column, "column holding the binary outcome");
    test->add_option("--baseline-rate", baseline_rate,
                     "population P(Y=1) used to rescale retrospective odds");
    test->add_option("--json", test_json, "write the report as JSON to this path ('-' = stdout)");
    test->add_flag("--quiet", test_quiet, "suppress the text report");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "draw records from a generative spec");
    std::string spec_path, regime = "obs", out_path;
    std::size_t sim_n = 1000, sim_cases = 100, sim_controls = 100;
    std::uint64_t sim_seed = 1;
    double set_a = 0.0, set_b = 0.0;
    std::vector<std::string> settings;
    simulate->add_option("spec", spec_path, "generative spec JSON file")->required();
    simulate->add_option("--regime", regime, "obs | set | case-control")
        ->check(CLI::IsMember({"obs", "set", "case-control"}));
    simulate->add_option("-n,--samples", sim_n, "number of records");
    simulate->add_option("--seed", sim_seed, "RNG seed");
    simulate->add_option("--out", out_path, "output CSV path")->required();
    simulate->add_option("--a", set_a, "value forced on A (regime set)");
    simulate->add_option("--b", set_b, "value forced on B (regime set)");
    simulate->add_option("--set", settings, "context override NAME=VALUE (regime set)");
    simulate->add_option("--cases", sim_cases, "case quota (regime case-control)");
    simulate->add_option("--controls", sim_controls, "control quota (regime case-control)");

    // replicate
    auto* replicate = app.add_subcommand("replicate", "run a built-in validation suite");
    std::string suite;
    std::size_t rep_replicates = 0, rep_samples = 0;
    std::uint64_t rep_seed = 1;
    replicate->add_option("suite", suite, "examples | type1 | power | retrospective")->required();
    replicate->add_option("--replicates", rep_replicates, "override the replicate count");
    replicate->add_option("--samples", rep_samples, "override the per-replicate sample size");
    replicate->add_option("--seed", rep_seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(check)) return cmd_check(diagram_path, request_path, check_json,
                                                        check_quiet);
        if (app.got_subcommand(test)) {
            config.stat =
                stat_name == "superadditivity" ? StatKind::Superadditivity : StatKind::ExcessRisk;
            config.mode =
                mode_name == "prospective" ? SamplingMode::Prospective : SamplingMode::Retrospective;
            if (baseline_rate >= 0.0) config.baseline_rate = baseline_rate;
            if (!context_spec.empty()) {
                std::istringstream in(context_spec);
                std::string col;
                while (std::getline(in, col, ','))
                    if (!col.empty()) config.context_columns.push_back(col);
            }
            return cmd_test(data_path, config, test_json, test_quiet);
        }
        if (app.got_subcommand(simulate))
            return cmd_simulate(spec_path, regime, sim_n, sim_seed, out_path, set_a, set_b,
                                settings, sim_cases, sim_controls);
        if (app.got_subcommand(replicate))
            return cmd_replicate(suite, rep_replicates, rep_samples, rep_seed);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
