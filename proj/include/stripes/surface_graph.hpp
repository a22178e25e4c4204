#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stripes/atlas.hpp"

namespace stripes {

/// Edge of a multigraph; `from` is the endpoint at parameter -1 and `to` the
/// endpoint at +1. Loops (from == to) and parallel edges are allowed.
struct GraphEdge {
    std::string id;
    std::size_t from = 0;
    std::size_t to = 0;

    bool is_loop() const { return from == to; }
    friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

class SurfaceGraph {
public:
    std::size_t add_vertex(std::string label);
    std::size_t add_edge(std::string id, std::size_t from, std::size_t to);

    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    std::optional<std::size_t> vertex_index(const std::string& label) const;
    std::optional<std::size_t> edge_index(const std::string& id) const;

    /// Edge indices incident to each vertex, ascending; a loop is listed once.
    std::vector<std::vector<std::size_t>> incidence() const;

    friend bool operator==(const SurfaceGraph& a, const SurfaceGraph& b) {
        return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
    }

private:
    std::vector<std::string> vertices_;
    std::vector<GraphEdge> edges_;
    std::map<std::string, std::size_t> vertex_lookup_;
    std::map<std::string, std::size_t> edge_lookup_;
};

/// One vertex per strip, one edge per seam (X strip -> Y strip).
SurfaceGraph build_graph(const ExpandedAtlas& expanded);

struct ComponentInfo {
    std::vector<std::size_t> vertices;  // ascending
    std::size_t edge_count = 0;
    std::int64_t euler = 0;             // V - E
    std::int64_t rank = 0;              // E - V + 1, rank of the free fundamental group
};

struct GraphInvariants {
    std::vector<ComponentInfo> components;  // ordered by least vertex
    std::int64_t euler = 0;
    std::int64_t total_rank = 0;
};

/// Component label (0-based, ordered by least vertex) of every vertex.
std::vector<std::size_t> component_labels(const SurfaceGraph& g);

GraphInvariants graph_invariants(const SurfaceGraph& g);

/// Interior parameters in (-1, 1) per edge id, strictly increasing.
using EdgeMarks = std::map<std::string, std::vector<Rational>>;

struct Subdivision {
    SurfaceGraph graph;
    /// For every original edge: the new vertices (in parameter order) and the
    /// arcs replacing it, from the -1 end to the +1 end.
    std::vector<std::vector<std::size_t>> new_vertices;
    std::vector<std::vector<std::size_t>> arcs;
};

/// New vertices are labelled "edge@param", arcs "edge#k". Original vertices
/// keep their indices. Throws BadParameter.
Subdivision subdivide_with_map(const SurfaceGraph& g, const EdgeMarks& marks);
SurfaceGraph subdivide(const SurfaceGraph& g, const EdgeMarks& marks);

/// +1 when the gluing preserves a local orientation (opposite sides glued by an
/// increasing map, or equal sides by a decreasing one), -1 otherwise.
int seam_sign(const ExpandedGluing& gluing);

/// True iff every cycle of the graph has seam-sign product +1.
bool orientable(const ExpandedAtlas& expanded);

struct GraphIsomorphism {
    std::vector<std::size_t> vertex_map;  // g1 vertex -> g2 vertex
    std::vector<std::size_t> edge_map;    // g1 edge -> g2 edge
};

/// Brute-force search; both graphs must have at most 10 vertices and 14
/// edges, otherwise TooLarge is thrown.
std::optional<GraphIsomorphism> isomorphic(const SurfaceGraph& g1, const SurfaceGraph& g2);

/// Number of (vertex bijection, edge bijection) pairs mapping g onto itself.
std::uint64_t automorphism_count(const SurfaceGraph& g);

/// Whether the given vertex bijection carries the edge multiset of g1 onto
/// that of g2. No size guard.
bool is_isomorphism(const SurfaceGraph& g1, const SurfaceGraph& g2,
                    const std::vector<std::size_t>& vertex_map);

/// Undirected DOT source; loops appear as "A -- A".
std::string to_dot(const SurfaceGraph& g);

}  // namespace stripes
