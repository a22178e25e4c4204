#include "stripes/surface_graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <sstream>

#include "stripes/error.hpp"

namespace stripes {

std::size_t SurfaceGraph::add_vertex(std::string label) {
    if (vertex_lookup_.count(label) != 0) throw IdCollision("duplicate vertex '" + label + "'");
    vertex_lookup_.emplace(label, vertices_.size());
    vertices_.push_back(std::move(label));
    return vertices_.size() - 1;
}

std::size_t SurfaceGraph::add_edge(std::string id, std::size_t from, std::size_t to) {
    if (from >= vertices_.size() || to >= vertices_.size()) {
        throw BadParameter("edge '" + id + "' has an endpoint that is not a vertex");
    }
    if (edge_lookup_.count(id) != 0) throw IdCollision("duplicate edge '" + id + "'");
    edge_lookup_.emplace(id, edges_.size());
    edges_.push_back({std::move(id), from, to});
    return edges_.size() - 1;
}

std::optional<std::size_t> SurfaceGraph::vertex_index(const std::string& label) const {
    const auto it = vertex_lookup_.find(label);
    if (it == vertex_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> SurfaceGraph::edge_index(const std::string& id) const {
    const auto it = edge_lookup_.find(id);
    if (it == edge_lookup_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::vector<std::size_t>> SurfaceGraph::incidence() const {
    std::vector<std::vector<std::size_t>> inc(vertices_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        inc[edges_[e].from].push_back(e);
        if (!edges_[e].is_loop()) inc[edges_[e].to].push_back(e);
    }
    return inc;
}

SurfaceGraph build_graph(const ExpandedAtlas& expanded) {
    require_valid(expanded);
    SurfaceGraph g;
    for (const ExpandedStrip& s : expanded.strips) g.add_vertex(s.id);
    for (const ExpandedGluing& gl : expanded.gluings) g.add_edge(gl.id, gl.x.strip, gl.y.strip);
    return g;
}

// ---------------------------------------------------------------------------
// Components

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t v) {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<std::size_t> component_labels(const SurfaceGraph& g) {
    DisjointSets sets(g.vertex_count());
    for (const GraphEdge& e : g.edges()) sets.unite(e.from, e.to);
    std::map<std::size_t, std::size_t> label_of_root;
    std::vector<std::size_t> labels(g.vertex_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        const std::size_t root = sets.find(v);
        const auto [it, inserted] = label_of_root.emplace(root, label_of_root.size());
        labels[v] = it->second;
    }
    return labels;
}

GraphInvariants graph_invariants(const SurfaceGraph& g) {
    const auto labels = component_labels(g);
    const std::size_t count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    GraphInvariants inv;
    inv.components.resize(count);
    for (std::size_t v = 0; v < labels.size(); ++v) inv.components[labels[v]].vertices.push_back(v);
    for (const GraphEdge& e : g.edges()) ++inv.components[labels[e.from]].edge_count;
    for (ComponentInfo& c : inv.components) {
        const auto v = static_cast<std::int64_t>(c.vertices.size());
        const auto e = static_cast<std::int64_t>(c.edge_count);
        c.euler = v - e;
        c.rank = e - v + 1;
        inv.total_rank += c.rank;
    }
    inv.euler = static_cast<std::int64_t>(g.vertex_count()) - static_cast<std::int64_t>(g.edge_count());
    return inv;
}

// ---------------------------------------------------------------------------
// Subdivision

Subdivision subdivide_with_map(const SurfaceGraph& g, const EdgeMarks& marks) {
    for (const auto& [id, params] : marks) {
        if (!g.edge_index(id)) throw BadParameter("marks given for unknown edge '" + id + "'");
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (params[i] <= -1 || params[i] >= 1) {
                throw BadParameter("mark " + to_string(params[i]) + " on edge '" + id + "' is not in (-1, 1)");
            }
            if (i > 0 && params[i] <= params[i - 1]) {
                throw BadParameter("marks on edge '" + id + "' are not strictly increasing");
            }
        }
    }

    Subdivision out;
    for (const std::string& v : g.vertices()) out.graph.add_vertex(v);
    out.new_vertices.resize(g.edge_count());
    out.arcs.resize(g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const GraphEdge& edge = g.edges()[e];
        const auto it = marks.find(edge.id);
        if (it == marks.end() || it->second.empty()) {
            out.arcs[e].push_back(out.graph.add_edge(edge.id, edge.from, edge.to));
            continue;
        }
        std::size_t prev = edge.from;
        std::size_t k = 0;
        for (const Rational& t : it->second) {
            const std::size_t v = out.graph.add_vertex(edge.id + "@" + to_string(t));
            out.new_vertices[e].push_back(v);
            out.arcs[e].push_back(out.graph.add_edge(edge.id + "#" + std::to_string(k++), prev, v));
            prev = v;
        }
        out.arcs[e].push_back(out.graph.add_edge(edge.id + "#" + std::to_string(k), prev, edge.to));
    }
    return out;
}

SurfaceGraph subdivide(const SurfaceGraph& g, const EdgeMarks& marks) {
    return subdivide_with_map(g, marks).graph;
}

// ---------------------------------------------------------------------------
// Orientability

int seam_sign(const ExpandedGluing& gluing) {
    const bool opposite = gluing.x.side != gluing.y.side;
    return opposite != gluing.reversed ? 1 : -1;
}

bool orientable(const ExpandedAtlas& expanded) {
    require_valid(expanded);
    const std::size_t n = expanded.strips.size();
    std::vector<std::vector<std::pair<std::size_t, int>>> adj(n);
    for (const ExpandedGluing& g : expanded.gluings) {
        const int s = seam_sign(g);
        if (g.x.strip == g.y.strip) {
            if (s < 0) return false;
            continue;
        }
        adj[g.x.strip].emplace_back(g.y.strip, s);
        adj[g.y.strip].emplace_back(g.x.strip, s);
    }
    std::vector<int> orient(n, 0);
    for (std::size_t root = 0; root < n; ++root) {
        if (orient[root] != 0) continue;
        orient[root] = 1;
        std::queue<std::size_t> queue;
        queue.push(root);
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop();
            for (const auto& [v, s] : adj[u]) {
                const int want = orient[u] * s;
                if (orient[v] == 0) {
                    orient[v] = want;
                    queue.push(v);
                } else if (orient[v] != want) {
                    return false;
                }
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Isomorphism

namespace {

constexpr std::size_t kMaxIsoVertices = 10;
constexpr std::size_t kMaxIsoEdges = 14;

using Multiplicity = std::vector<std::vector<std::size_t>>;

Multiplicity multiplicities(const SurfaceGraph& g) {
    Multiplicity m(g.vertex_count(), std::vector<std::size_t>(g.vertex_count(), 0));
    for (const GraphEdge& e : g.edges()) {
        ++m[e.from][e.to];
        if (!e.is_loop()) ++m[e.to][e.from];
    }
    return m;
}

void guard(const SurfaceGraph& g) {
    if (g.vertex_count() > kMaxIsoVertices || g.edge_count() > kMaxIsoEdges) {
        throw TooLarge("brute-force isomorphism is limited to " + std::to_string(kMaxIsoVertices) +
                       " vertices and " + std::to_string(kMaxIsoEdges) + " edges");
    }
}

// Enumerates vertex bijections preserving multiplicities; `visit` returns
// false to stop.
template <class Visit>
void search(const Multiplicity& m1, const Multiplicity& m2, Visit&& visit) {
    const std::size_t n = m1.size();
    std::vector<std::size_t> map(n);
    std::vector<bool> used(n, false);
    bool stop = false;
    auto rec = [&](auto&& self, std::size_t u) -> void {
        if (stop) return;
        if (u == n) {
            stop = !visit(map);
            return;
        }
        for (std::size_t v = 0; v < n && !stop; ++v) {
            if (used[v]) continue;
            bool ok = m1[u][u] == m2[v][v];
            for (std::size_t w = 0; w < u && ok; ++w) ok = m1[u][w] == m2[v][map[w]];
            if (!ok) continue;
            used[v] = true;
            map[u] = v;
            self(self, u + 1);
            used[v] = false;
        }
    };
    rec(rec, 0);
}

std::uint64_t factorial(std::size_t k) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= k; ++i) f *= i;
    return f;
}

}  // namespace

bool is_isomorphism(const SurfaceGraph& g1, const SurfaceGraph& g2,
                    const std::vector<std::size_t>& vertex_map) {
    if (g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count()) return false;
    if (vertex_map.size() != g1.vertex_count()) return false;
    std::vector<bool> hit(g2.vertex_count(), false);
    for (std::size_t v : vertex_map) {
        if (v >= g2.vertex_count() || hit[v]) return false;
        hit[v] = true;
    }
    auto key = [](std::size_t a, std::size_t b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    std::map<std::pair<std::size_t, std::size_t>, std::int64_t> count;
    for (const GraphEdge& e : g1.edges()) ++count[key(vertex_map[e.from], vertex_map[e.to])];
    for (const GraphEdge& e : g2.edges()) --count[key(e.from, e.to)];
    return std::all_of(count.begin(), count.end(), [](const auto& kv) { return kv.second == 0; });
}

std::optional<GraphIsomorphism> isomorphic(const SurfaceGraph& g1, const SurfaceGraph& g2) {
    guard(g1);
    guard(g2);
    if (g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count()) return std::nullopt;
    std::optional<GraphIsomorphism> found;
    search(multiplicities(g1), multiplicities(g2), [&](const std::vector<std::size_t>& map) {
        GraphIsomorphism iso;
        iso.vertex_map = map;
        std::vector<bool> taken(g2.edge_count(), false);
        for (const GraphEdge& e : g1.edges()) {
            const std::size_t a = map[e.from];
            const std::size_t b = map[e.to];
            for (std::size_t f = 0; f < g2.edge_count(); ++f) {
                const GraphEdge& cand = g2.edges()[f];
                if (taken[f]) continue;
                if ((cand.from == a && cand.to == b) || (cand.from == b && cand.to == a)) {
                    taken[f] = true;
                    iso.edge_map.push_back(f);
                    break;
                }
            }
        }
        found = std::move(iso);
        return false;
    });
    return found;
}

std::uint64_t automorphism_count(const SurfaceGraph& g) {
    guard(g);
    const Multiplicity m = multiplicities(g);
    // Edge bijections over a fixed vertex bijection permute each parallel class.
    std::uint64_t edge_perms = 1;
    for (std::size_t u = 0; u < m.size(); ++u) {
        for (std::size_t v = u; v < m.size(); ++v) edge_perms *= factorial(m[u][v]);
    }
    std::uint64_t vertex_perms = 0;
    search(m, m, [&](const std::vector<std::size_t>&) {
        ++vertex_perms;
        return true;
    });
    return vertex_perms * edge_perms;
}

// ---------------------------------------------------------------------------
// DOT

namespace {

std::string dot_id(const std::string& s) {
    static const char* const keywords[] = {"graph", "digraph", "node", "edge", "strict", "subgraph"};
    bool plain = !s.empty() && (std::isalpha(static_cast<unsigned char>(s[0])) != 0 || s[0] == '_');
    for (char c : s) plain = plain && (std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_');
    for (const char* kw : keywords) {
        std::string lower(s);
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
        plain = plain && lower != kw;
    }
    if (plain) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string to_dot(const SurfaceGraph& g) {
    std::ostringstream os;
    os << "graph G {\n";
    for (const std::string& v : g.vertices()) os << "  " << dot_id(v) << ";\n";
    for (const GraphEdge& e : g.edges()) {
        os << "  " << dot_id(g.vertices()[e.from]) << " -- " << dot_id(g.vertices()[e.to])
           << " [label=" << dot_id(e.id) << "];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace stripes
