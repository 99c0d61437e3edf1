#include "osim/net.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>
#include <utility>

#include "osim/errors.hpp"
#include "osim/format.hpp"
#include "osim/rng.hpp"

namespace osim {

OpinionNetwork::OpinionNetwork(NodeId n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)) {
    if (n_ == 0) throw InvalidParams("n", "node count must be positive");
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.src == e.dst) {
            throw InvalidParams("edges", strprintf("self-loop at node %u", e.src));
        }
        if (e.src >= n_ || e.dst >= n_) {
            throw InvalidParams("edges", strprintf("edge (%u,%u) endpoint out of range for n=%u",
                                                   e.src, e.dst, n_));
        }
        if (i > 0 && edges_[i - 1] == e) {
            throw InvalidParams("edges", strprintf("duplicate edge (%u,%u)", e.src, e.dst));
        }
    }
    offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
    targets_.resize(edges_.size());
    for (const Edge& e : edges_) offsets_[static_cast<std::size_t>(e.src) + 1]++;
    for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
    for (std::size_t i = 0; i < edges_.size(); ++i) targets_[i] = edges_[i].dst;
}

std::span<const NodeId> OpinionNetwork::out_neighbors(NodeId i) const {
    // Sorted edge storage makes each row of targets_ ascending already.
    const std::size_t begin = offsets_[i];
    const std::size_t end = offsets_[static_cast<std::size_t>(i) + 1];
    return {targets_.data() + begin, end - begin};
}

namespace {

// Disjoint-set over node ids.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

int OpinionNetwork::component_count() const {
    UnionFind uf(n_);
    for (const Edge& e : edges_) uf.unite(e.src, e.dst);
    std::set<std::size_t> roots;
    for (NodeId i = 0; i < n_; ++i) roots.insert(uf.find(i));
    return static_cast<int>(roots.size());
}

std::string_view to_string(GraphKind kind) {
    switch (kind) {
        case GraphKind::Complete: return "complete";
        case GraphKind::ErdosRenyi: return "erdos_renyi";
        case GraphKind::BarabasiAlbert: return "barabasi_albert";
        default: return "watts_strogatz";
    }
}

std::optional<GraphKind> graph_kind_from_string(std::string_view name) {
    if (name == "complete") return GraphKind::Complete;
    if (name == "erdos_renyi") return GraphKind::ErdosRenyi;
    if (name == "barabasi_albert") return GraphKind::BarabasiAlbert;
    if (name == "watts_strogatz") return GraphKind::WattsStrogatz;
    return std::nullopt;
}

namespace {

void push_pair(std::vector<Edge>& edges, NodeId u, NodeId v) {
    edges.push_back({u, v});
    edges.push_back({v, u});
}

std::vector<Edge> gen_complete(NodeId n) {
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * (n - 1));
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = 0; j < n; ++j) {
            if (i != j) edges.push_back({i, j});
        }
    }
    return edges;
}

std::vector<Edge> gen_erdos_renyi(NodeId n, double p, rng::Rng& rng) {
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            if (rng.bernoulli(p)) push_pair(edges, i, j);
        }
    }
    return edges;
}

// Preferential attachment via the repeated-nodes list: sampling uniformly
// from a list holding every edge endpoint is sampling proportional to degree.
std::vector<Edge> gen_barabasi_albert(NodeId n, int m, rng::Rng& rng) {
    std::vector<Edge> edges;
    std::vector<NodeId> repeated;
    std::vector<NodeId> targets(static_cast<std::size_t>(m));
    std::iota(targets.begin(), targets.end(), 0);
    for (NodeId v = static_cast<NodeId>(m); v < n; ++v) {
        for (NodeId u : targets) push_pair(edges, v, u);
        repeated.insert(repeated.end(), targets.begin(), targets.end());
        repeated.insert(repeated.end(), static_cast<std::size_t>(m), v);
        if (v + 1 < n) {
            std::set<NodeId> chosen;
            while (chosen.size() < static_cast<std::size_t>(m)) {
                chosen.insert(repeated[rng.below(repeated.size())]);
            }
            targets.assign(chosen.begin(), chosen.end());
        }
    }
    return edges;
}

std::vector<Edge> gen_watts_strogatz(NodeId n, int k, double beta, rng::Rng& rng) {
    // Ring lattice: node i linked to its k/2 clockwise neighbors; each
    // undirected ring edge appears exactly once as (i, (i+j) mod n).
    std::vector<std::set<NodeId>> adj(n);
    auto connect = [&](NodeId a, NodeId b) {
        adj[a].insert(b);
        adj[b].insert(a);
    };
    for (NodeId i = 0; i < n; ++i) {
        for (int j = 1; j <= k / 2; ++j) {
            connect(i, (i + static_cast<NodeId>(j)) % n);
        }
    }
    // Rewire pass in the same deterministic order the lattice was built.
    for (NodeId i = 0; i < n; ++i) {
        for (int j = 1; j <= k / 2; ++j) {
            NodeId old = (i + static_cast<NodeId>(j)) % n;
            if (!rng.bernoulli(beta)) continue;
            if (adj[i].size() >= static_cast<std::size_t>(n) - 1) continue;  // saturated
            if (!adj[i].contains(old)) continue;  // already rewired away earlier
            NodeId w;
            do {
                w = static_cast<NodeId>(rng.below(n));
            } while (w == i || adj[i].contains(w));
            adj[i].erase(old);
            adj[old].erase(i);
            connect(i, w);
        }
    }
    std::vector<Edge> edges;
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j : adj[i]) {
            if (i < j) push_pair(edges, i, j);
        }
    }
    return edges;
}

}  // namespace

OpinionNetwork generate_graph(GraphKind kind, const GraphParams& params, NodeId n,
                              std::uint64_t seed) {
    if (n < 2) throw InvalidParams("n", "node count must be at least 2");
    rng::Rng rng(rng::substream_seed(seed, std::string("graph.") + std::string(to_string(kind))));
    std::vector<Edge> edges;
    switch (kind) {
        case GraphKind::Complete:
            edges = gen_complete(n);
            break;
        case GraphKind::ErdosRenyi:
            if (params.edge_prob < 0.0 || params.edge_prob > 1.0) {
                throw InvalidParams("p", "edge probability must be in [0, 1]");
            }
            edges = gen_erdos_renyi(n, params.edge_prob, rng);
            break;
        case GraphKind::BarabasiAlbert:
            if (params.attach_count < 1 || static_cast<NodeId>(params.attach_count) > n - 1) {
                throw InvalidParams("m", "attachment count must be in [1, n-1]");
            }
            edges = gen_barabasi_albert(n, params.attach_count, rng);
            break;
        case GraphKind::WattsStrogatz:
            if (params.ring_degree < 0 || params.ring_degree % 2 != 0 ||
                static_cast<NodeId>(params.ring_degree) >= n) {
                throw InvalidParams("k", "ring degree must be even and less than n");
            }
            if (params.rewire_prob < 0.0 || params.rewire_prob > 1.0) {
                throw InvalidParams("beta", "rewire probability must be in [0, 1]");
            }
            edges = gen_watts_strogatz(n, params.ring_degree, params.rewire_prob, rng);
            break;
    }
    return OpinionNetwork(n, std::move(edges));
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

unsigned long long parse_id(std::string_view token, std::size_t line) {
    token = trim(token);
    unsigned long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
        throw ParseError(line, "expected a non-negative integer, got '" + std::string(token) + "'");
    }
    return value;
}

}  // namespace

LoadResult load_edge_list(std::string_view text, std::optional<NodeId> node_count) {
    std::vector<Edge> edges;
    unsigned long long max_id = 0;
    bool saw_edge = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                              : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        std::size_t comma = body.find(',');
        if (comma == std::string_view::npos) {
            throw ParseError(line_no, "expected 'source,target'");
        }
        unsigned long long src = parse_id(body.substr(0, comma), line_no);
        unsigned long long dst = parse_id(body.substr(comma + 1), line_no);
        if (src == dst) throw SelfLoopError(line_no);
        if (node_count) {
            if (src >= *node_count) throw IdOutOfRangeError(line_no, src, *node_count);
            if (dst >= *node_count) throw IdOutOfRangeError(line_no, dst, *node_count);
        }
        edges.push_back({static_cast<NodeId>(src), static_cast<NodeId>(dst)});
        max_id = std::max({max_id, src, dst});
        saw_edge = true;
    }
    NodeId n;
    if (node_count) {
        n = *node_count;
    } else if (saw_edge) {
        n = static_cast<NodeId>(max_id) + 1;
    } else {
        throw InvalidParams("text", "empty edge list and no node count given");
    }
    std::sort(edges.begin(), edges.end());
    auto unique_end = std::unique(edges.begin(), edges.end());
    int duplicates = static_cast<int>(std::distance(unique_end, edges.end()));
    edges.erase(unique_end, edges.end());
    return {OpinionNetwork(n, std::move(edges)), duplicates};
}

std::string to_edge_list(const OpinionNetwork& net, const std::vector<std::string>& comments) {
    std::string out;
    for (const std::string& c : comments) {
        out += "# " + c + "\n";
    }
    for (const Edge& e : net.edges()) {
        out += std::to_string(e.src) + "," + std::to_string(e.dst) + "\n";
    }
    return out;
}

}  // namespace osim
