#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace osim {

using NodeId = std::uint32_t;

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable directed graph of Green nodes. Node state lives with the
/// simulation, not here, so a network can be shared read-only across runs.
/// Edges are stored sorted by (src, dst); out-neighbor queries return
/// targets in ascending order.
class OpinionNetwork {
public:
    OpinionNetwork(NodeId n, std::vector<Edge> edges);

    NodeId node_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    /// Ascending, duplicate-free out-neighbors of i. Caller guarantees i < n.
    std::span<const NodeId> out_neighbors(NodeId i) const;

    /// Weakly connected components (edge direction ignored).
    int component_count() const;

private:
    NodeId n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;  // CSR row offsets, size n+1
    std::vector<NodeId> targets_;       // dst of each sorted edge
};

enum class GraphKind { Complete, ErdosRenyi, BarabasiAlbert, WattsStrogatz };

std::string_view to_string(GraphKind kind);
std::optional<GraphKind> graph_kind_from_string(std::string_view name);

struct GraphParams {
    double edge_prob = 0.1;    // erdos_renyi: p
    int attach_count = 2;      // barabasi_albert: m
    int ring_degree = 4;       // watts_strogatz: k (even)
    double rewire_prob = 0.1;  // watts_strogatz: beta
};

/// Random-graph generators. Each undirected draw is emitted as a reciprocal
/// directed pair, so generated networks always contain (u,v) and (v,u)
/// together. Deterministic for fixed (kind, params, n, seed).
OpinionNetwork generate_graph(GraphKind kind, const GraphParams& params, NodeId n,
                              std::uint64_t seed);

struct LoadResult {
    OpinionNetwork network;
    int duplicates_collapsed = 0;
};

/// Parses "source,target" lines. '#'-prefixed comment lines and blank lines
/// are ignored; LF and CRLF both accepted. Duplicate edges collapse with a
/// count. Loaded edges are taken as-is (truly directed, no reciprocal pair
/// is added). When node_count is absent, n = max id + 1.
LoadResult load_edge_list(std::string_view text,
                          std::optional<NodeId> node_count = std::nullopt);

/// Edge-list text in the same format load_edge_list reads. Comment lines,
/// when given, are emitted first with a leading "# ".
std::string to_edge_list(const OpinionNetwork& net,
                         const std::vector<std::string>& comments = {});

}  // namespace osim
