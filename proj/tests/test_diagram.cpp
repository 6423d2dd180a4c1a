#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mechint/diagram.hpp"
#include "support/random_graphs.hpp"

using namespace mechint;

namespace {

const char* kMediationDsl = R"(# five observed variables, three regimes
node A
node B
node M
node G
node Y
regime sAB -> A, B
regime sM -> M
regime sG -> G
edge A -> M
edge A -> Y
edge B -> M
edge B -> Y
edge B -> G
edge G -> M
edge G -> Y
edge M -> Y
)";

// Same graph plus a regime arrow into the covariate G.
const char* kRegimeGDsl = R"(node A
node B
node M
node G
node Y
regime sAB -> A, B, G
regime sM -> M
regime sG -> G
edge A -> M
edge A -> Y
edge B -> M
edge B -> Y
edge B -> G
edge G -> M
edge G -> Y
edge M -> Y
)";

}  // namespace

TEST_CASE("parse_diagram: minimal input") {
    auto d = parse_diagram("node A\nnode Y\nedge A -> Y");
    CHECK(d.node_count() == 2);
    CHECK(d.edges().size() == 1);
    CHECK(d.kind("A") == NodeKind::Stochastic);
    CHECK(d.edges()[0] == Edge{"A", "Y"});
}

TEST_CASE("parse_diagram: full study diagram") {
    auto d = parse_diagram(kMediationDsl);
    CHECK(d.node_count() == 8);
    int stochastic = 0, regime = 0;
    for (const auto& n : d.node_names())
        (d.kind(n) == NodeKind::Stochastic ? stochastic : regime)++;
    CHECK(stochastic == 5);
    CHECK(regime == 3);
    CHECK(d.edges().size() == 12);
    CHECK(d.kind("sAB") == NodeKind::Regime);
}

TEST_CASE("parse_diagram: line order does not matter") {
    auto a = parse_diagram("edge A -> Y\nnode A\nnode Y");
    auto b = parse_diagram("node Y\nnode A\nedge A -> Y");
    CHECK(a.node_names() == b.node_names());
    CHECK(a.edges() == b.edges());
}

TEST_CASE("parse_diagram: errors") {
    CHECK_THROWS_AS(parse_diagram("node A\nedge A -> A"), ParseError);  // self-loop
    CHECK_THROWS_AS(parse_diagram("node A\nnode B\nedge A -> B\nedge B -> A"), ParseError);
    CHECK_THROWS_AS(parse_diagram("node A\nnode A"), ParseError);
    CHECK_THROWS_AS(parse_diagram("node A\nedge A -> Z"), ParseError);
    CHECK_THROWS_AS(parse_diagram("node A\nregime s -> A\nedge A -> s"), ParseError);
    CHECK_THROWS_AS(parse_diagram("nod A"), ParseError);
    CHECK_THROWS_AS(parse_diagram("node A\nregime s ->"), ParseError);

    try {
        parse_diagram("node A\nnode B\nbogus line");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("parse_diagram: comments and blank lines") {
    auto d = parse_diagram("# heading\n\nnode A  # trailing\nnode Y\nedge A -> Y\n");
    CHECK(d.node_count() == 2);
}

TEST_CASE("moralize: chain has no marriages") {
    auto d = parse_diagram("node A\nnode M\nnode Y\nedge A -> M\nedge M -> Y");
    auto g = moralize(d, {"A", "M", "Y"});
    CHECK(g.edges().size() == 2);
    CHECK(g.has_edge("A", "M"));
    CHECK(g.has_edge("M", "Y"));
    CHECK_FALSE(g.has_edge("A", "Y"));
}

TEST_CASE("moralize: co-parents married") {
    auto d = parse_diagram("node A\nnode B\nnode Y\nedge A -> Y\nedge B -> Y");
    auto g = moralize(d, {"A", "B", "Y"});
    CHECK(g.edges().size() == 3);
    CHECK(g.has_edge("A", "B"));
}

TEST_CASE("moralize: restricted to the ancestral closure") {
    auto d = parse_diagram("node A\nnode B\nnode Y\nedge A -> Y\nedge B -> Y");
    auto g = moralize(d, {"A", "B"});
    CHECK(g.nodes() == std::vector<std::string>{"A", "B"});
    CHECK(g.edges().empty());
}

TEST_CASE("d_separated: bundled diagrams") {
    auto fig1 = parse_diagram(kMediationDsl);
    CHECK(d_separated(fig1, {{"Y"}, {"sAB"}, {"A", "B"}}));
    CHECK(d_separated(fig1, {{"A"}, {"B"}, {"sAB"}}));

    auto fig3 = parse_diagram(kRegimeGDsl);
    CHECK_FALSE(d_separated(fig3, {{"Y"}, {"sAB"}, {"A", "B"}}));

    auto iso = parse_diagram("node A\nnode B");
    CHECK(d_separated(iso, {{"A"}, {"B"}, {}}));
}

TEST_CASE("d_separated: vacuous and invalid queries") {
    auto d = parse_diagram("node A\nnode Y\nedge A -> Y");
    CHECK(d_separated(d, {{}, {"Y"}, {}}));
    CHECK(d_separated(d, {{"A"}, {}, {}}));
    CHECK_THROWS_AS(d_separated(d, {{"A"}, {"A"}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(d_separated(d, {{"A"}, {"Y"}, {"Q"}}), std::invalid_argument);
}

TEST_CASE("d_separated_oracle: collider behaviour") {
    auto d = parse_diagram("node A\nnode B\nnode Y\nedge A -> Y\nedge B -> Y");
    CHECK(d_separated_oracle(d, {{"A"}, {"B"}, {}}));
    CHECK_FALSE(d_separated_oracle(d, {{"A"}, {"B"}, {"Y"}}));

    // conditioning on a descendant of the collider also opens it
    auto d2 = parse_diagram("node A\nnode B\nnode Y\nnode D\nedge A -> Y\nedge B -> Y\nedge Y -> D");
    CHECK_FALSE(d_separated_oracle(d2, {{"A"}, {"B"}, {"D"}}));

    auto fig1 = parse_diagram(kMediationDsl);
    CHECK(d_separated_oracle(fig1, {{"A"}, {"B"}, {"sAB"}}));
}

TEST_CASE("d_separated_oracle: size limit") {
    std::string dsl;
    for (int i = 0; i < 13; ++i) dsl += "node n" + std::to_string(i) + "\n";
    auto d = parse_diagram(dsl);
    CHECK_THROWS_AS(d_separated_oracle(d, {{"n0"}, {"n1"}, {}}), std::invalid_argument);
}

namespace {

// Every valid (x, y, Z) query with singleton endpoints.
template <typename Fn>
void for_all_singleton_queries(const InfluenceDiagram& d, Fn&& fn) {
    const auto& names = d.node_names();
    std::size_t n = names.size();
    for (std::size_t xi = 0; xi < n; ++xi) {
        for (std::size_t yi = xi + 1; yi < n; ++yi) {
            std::vector<std::string> rest;
            for (std::size_t k = 0; k < n; ++k)
                if (k != xi && k != yi) rest.push_back(names[k]);
            for (std::size_t mask = 0; mask < (std::size_t{1} << rest.size()); ++mask) {
                NodeSet given;
                for (std::size_t b = 0; b < rest.size(); ++b)
                    if (mask & (std::size_t{1} << b)) given.insert(rest[b]);
                fn(CiQuery{{names[xi]}, {names[yi]}, given});
            }
        }
    }
}

}  // namespace

TEST_CASE("property: moral and path-based criteria agree exhaustively") {
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 60; ++trial) {
        auto d = testsupport::random_diagram(rng, 2 + trial % 5);
        for_all_singleton_queries(d, [&](const CiQuery& q) {
            bool moral = d_separated(d, q);
            bool paths = d_separated_oracle(d, q);
            CAPTURE(trial);
            REQUIRE(moral == paths);
        });
    }
}

TEST_CASE("property: query symmetry") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        auto d = testsupport::random_diagram(rng, 2 + trial % 6);
        for_all_singleton_queries(d, [&](const CiQuery& q) {
            CHECK(d_separated(d, q) == d_separated(d, {q.right, q.left, q.given}));
        });
    }
}

TEST_CASE("property: decomposition") {
    // X _||_ {Y, W} | Z implies X _||_ Y | Z.
    std::mt19937_64 rng(99);
    int applicable = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto d = testsupport::random_diagram(rng, 4 + trial % 4);
        const auto& names = d.node_names();
        std::vector<std::string> shuffled(names);
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        if (shuffled.size() < 3) continue;
        NodeSet left{shuffled[0]};
        NodeSet right{shuffled[1], shuffled[2]};
        NodeSet given;
        for (std::size_t k = 3; k < shuffled.size(); ++k)
            if (testsupport::chance(rng, 0.3)) given.insert(shuffled[k]);
        if (d_separated(d, {left, right, given})) {
            ++applicable;
            CHECK(d_separated(d, {left, {shuffled[1]}, given}));
            CHECK(d_separated(d, {left, {shuffled[2]}, given}));
        }
    }
    CHECK(applicable > 10);
}

TEST_CASE("property: moralize is insertion-order independent") {
    std::vector<NodeDecl> nodes{{"Y", NodeKind::Stochastic},
                                {"A", NodeKind::Stochastic},
                                {"B", NodeKind::Stochastic},
                                {"s", NodeKind::Regime}};
    std::vector<Edge> edges{{"A", "Y"}, {"B", "Y"}, {"s", "A"}};
    InfluenceDiagram d1(nodes, edges);
    std::reverse(nodes.begin(), nodes.end());
    std::reverse(edges.begin(), edges.end());
    InfluenceDiagram d2(nodes, edges);
    auto g1 = moralize(d1, {"A", "B", "Y", "s"});
    auto g2 = moralize(d2, {"A", "B", "Y", "s"});
    CHECK(g1.nodes() == g2.nodes());
    CHECK(g1.edges() == g2.edges());
}

TEST_CASE("property: deleting an uninvolved regime node preserves separations") {
    std::mt19937_64 rng(4242);
    int applicable = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto d = testsupport::random_diagram(rng, 4 + trial % 4);
        std::vector<std::string> regimes;
        for (const auto& n : d.node_names())
            if (d.kind(n) == NodeKind::Regime) regimes.push_back(n);
        if (regimes.empty()) continue;
        const std::string& victim = regimes[testsupport::pick(rng, regimes.size())];

        std::vector<NodeDecl> nodes;
        std::vector<Edge> edges;
        for (const auto& n : d.node_names())
            if (n != victim) nodes.push_back({n, d.kind(n)});
        for (const auto& e : d.edges())
            if (e.parent != victim && e.child != victim) edges.push_back(e);
        InfluenceDiagram reduced(nodes, edges);

        for_all_singleton_queries(reduced, [&](const CiQuery& q) {
            if (q.left.count(victim) || q.right.count(victim) || q.given.count(victim)) return;
            if (d_separated_oracle(d, q)) {
                ++applicable;
                CHECK(d_separated_oracle(reduced, q));
                CHECK(d_separated(reduced, q));
            }
        });
    }
    CHECK(applicable > 50);
}
