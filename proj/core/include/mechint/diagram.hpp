#pragma once

// Influence diagrams: DAGs whose nodes are either stochastic variables or
// parentless regime (decision) indicators.  Conditional-independence queries
// are answered on the moral ancestral graph; an independent path-enumeration
// oracle is provided for cross-checking.

#include <cstddef>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mechint {

/// Malformed textual input (diagram DSL, CSV, JSON).  `line()` is 1-based;
/// 0 when no specific line can be blamed.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& reason);
    int line() const noexcept { return line_; }

private:
    int line_;
};

enum class NodeKind { Stochastic, Regime };

using NodeSet = std::set<std::string>;

struct NodeDecl {
    std::string name;
    NodeKind kind = NodeKind::Stochastic;
};

struct Edge {
    std::string parent;
    std::string child;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable after construction; all queries are const and safe to run
/// concurrently on a shared diagram.
class InfluenceDiagram {
public:
    InfluenceDiagram(std::vector<NodeDecl> nodes, std::vector<Edge> edges);

    std::size_t node_count() const { return names_.size(); }
    bool has_node(const std::string& name) const;
    NodeKind kind(const std::string& name) const;

    /// Node names in sorted order; index into this vector is the node id
    /// used by the adjacency accessors below.
    const std::vector<std::string>& node_names() const { return names_; }
    /// Deduplicated edge set, sorted by (parent, child).
    const std::vector<Edge>& edges() const { return edges_; }

    int index(const std::string& name) const;  // throws on unknown name
    NodeKind kind(int node) const { return kinds_[static_cast<std::size_t>(node)]; }
    const std::string& name(int node) const { return names_[static_cast<std::size_t>(node)]; }
    const std::vector<int>& parents(int node) const { return parents_[static_cast<std::size_t>(node)]; }
    const std::vector<int>& children(int node) const { return children_[static_cast<std::size_t>(node)]; }

    /// Set union of `seeds` with all their ancestors.
    NodeSet ancestral_closure(const NodeSet& seeds) const;
    /// All nodes reachable from `name` along directed edges, excluding the
    /// node itself.
    NodeSet descendants(const std::string& name) const;

private:
    std::vector<std::string> names_;  // sorted
    std::vector<NodeKind> kinds_;
    std::vector<Edge> edges_;  // sorted, deduplicated
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
};

/// X independent of Y given Z.  The three sets must be pairwise disjoint and
/// refer to existing nodes.
struct CiQuery {
    NodeSet left;
    NodeSet right;
    NodeSet given;
};

/// Undirected graph in canonical form: sorted node list, sorted (a < b)
/// edge pairs.  Construction via moralize() guarantees the representation
/// is independent of node insertion order.
class UndirectedGraph {
public:
    UndirectedGraph(std::vector<std::string> nodes,
                    std::set<std::pair<std::string, std::string>> edges);

    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::vector<std::pair<std::string, std::string>>& edges() const { return edges_; }
    bool has_edge(const std::string& a, const std::string& b) const;

    /// True when every path from `from` to `to` passes through `blockers`.
    /// Nodes absent from the graph are ignored.
    bool separates(const NodeSet& blockers, const NodeSet& from, const NodeSet& to) const;

private:
    std::vector<std::string> nodes_;
    std::vector<std::pair<std::string, std::string>> edges_;
    std::vector<std::vector<int>> adjacency_;
    int index_of(const std::string& name) const;  // -1 when absent
};

/// Parse the line-oriented diagram DSL:
///
///   node <name>
///   regime <name> -> <child>[, <child>...]
///   edge <parent> -> <child>
///   # comment
///
/// Statements may appear in any order; a `regime` line declares the node and
/// its outgoing edges in one go.  Throws ParseError with a 1-based line
/// number on malformed input, duplicate or unknown nodes, cycles, and edges
/// into regime nodes.
InfluenceDiagram parse_diagram(std::string_view text);

/// Moral graph of the subgraph induced by the ancestral closure of
/// `targets`: co-parents married, directions dropped.
UndirectedGraph moralize(const InfluenceDiagram& d, const NodeSet& targets);

/// Conditional-independence decision on the moral ancestral graph of
/// left ∪ right ∪ given.  Regime nodes are ordinary parentless nodes.
/// Queries with empty left or right are vacuously true.
bool d_separated(const InfluenceDiagram& d, const CiQuery& q);

/// Same contract as d_separated, decided by exhaustive enumeration of
/// connecting paths in the DAG.  Restricted to diagrams with at most 12
/// nodes; intended as an independent cross-check.
bool d_separated_oracle(const InfluenceDiagram& d, const CiQuery& q);

}  // namespace mechint
