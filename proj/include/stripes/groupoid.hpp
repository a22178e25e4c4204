#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stripes/surface_graph.hpp"

namespace stripes {

using GraphPtr = std::shared_ptr<const SurfaceGraph>;

/// One edge traversal. Forward goes from the edge's `from` end to its `to` end.
struct DirectedEdge {
    std::size_t edge = 0;
    bool forward = true;

    DirectedEdge inverse() const { return {edge, !forward}; }
    friend auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

/// A path in a graph: a start vertex and a sequence of traversals with
/// matching endpoints. The empty word is the identity at its start vertex.
class EdgeWord {
public:
    /// Throws MalformedWord when consecutive traversals do not connect.
    EdgeWord(GraphPtr graph, std::size_t start, std::vector<DirectedEdge> steps = {});

    const GraphPtr& graph() const { return graph_; }
    std::size_t start() const { return start_; }
    std::size_t end() const { return end_; }
    const std::vector<DirectedEdge>& steps() const { return steps_; }
    std::size_t length() const { return steps_.size(); }
    bool empty() const { return steps_.empty(); }
    bool is_reduced() const;

    /// "e1 e2^-1 ..." or "id(v)".
    std::string to_string() const;

    friend bool operator==(const EdgeWord& a, const EdgeWord& b) {
        return a.graph_ == b.graph_ && a.start_ == b.start_ && a.steps_ == b.steps_;
    }

private:
    GraphPtr graph_;
    std::size_t start_ = 0;
    std::size_t end_ = 0;
    std::vector<DirectedEdge> steps_;
};

struct EdgeWordHash {
    std::size_t operator()(const EdgeWord& w) const;
};

std::size_t tail(const SurfaceGraph& g, DirectedEdge d);
std::size_t head(const SurfaceGraph& g, DirectedEdge d);

/// Free reduction: cancels adjacent d, d^-1 pairs until none remain.
EdgeWord reduce(const EdgeWord& w);

/// reduce(f . g); f is traversed first. Throws EndpointMismatch.
EdgeWord compose(const EdgeWord& f, const EdgeWord& g);
EdgeWord inverse(const EdgeWord& f);
EdgeWord identity(const GraphPtr& graph, std::size_t vertex);

/// (start, end) of a morphism.
std::pair<std::size_t, std::size_t> ends(const EdgeWord& m);

// ---------------------------------------------------------------------------

/// Fundamental groupoid of a graph over a set of basepoints, with morphisms
/// represented by reduced words.
class BasedGroupoid {
public:
    /// Throws BasepointsMissComponent when some component has no basepoint.
    BasedGroupoid(GraphPtr graph, std::vector<std::size_t> basepoints);

    const GraphPtr& graph() const { return graph_; }
    const std::vector<std::size_t>& basepoints() const { return basepoints_; }
    bool is_basepoint(std::size_t v) const;

    /// Whether `w` is a morphism: reduced, on this graph, between basepoints.
    bool contains(const EdgeWord& w) const;

    /// All reduced words p -> q of length at most max_length.
    std::vector<EdgeWord> hom(std::size_t p, std::size_t q, std::size_t max_length) const;

    /// All morphisms of length at most max_length, by source basepoint.
    std::vector<EdgeWord> morphisms(std::size_t max_length) const;

private:
    GraphPtr graph_;
    std::vector<std::size_t> basepoints_;  // sorted, unique
    std::vector<bool> is_base_;
};

/// Calls visit(word) for every reduced word from `start` of length at most
/// max_length (including the empty word).
void for_each_reduced_word(const GraphPtr& graph, std::size_t start, std::size_t max_length,
                           const std::function<void(const EdgeWord&)>& visit);

struct ComponentPresentation {
    std::vector<std::size_t> vertices;
    std::vector<std::size_t> basepoints;
    std::vector<std::size_t> forest_edges;   // spanning tree edges
    std::vector<std::size_t> generators;     // non-tree edges
    std::int64_t rank = 0;
};

/// Normal-form summary: a deterministic spanning forest (BFS from the least
/// vertex of each component, edges in index order) and the free rank of
/// every component.
struct Presentation {
    std::vector<ComponentPresentation> components;
    std::string forest_id;  // hex digest of the forest edge ids
};

Presentation presentation(const BasedGroupoid& g);

// ---------------------------------------------------------------------------

struct Coproduct {
    BasedGroupoid groupoid;
    std::vector<std::size_t> vertex_offset;      // per summand
    std::vector<std::size_t> edge_offset;        // per summand
    std::vector<std::size_t> summand_of_vertex;  // per vertex of the union
};

/// Disjoint union. Throws IdCollision when vertex labels or edge ids repeat
/// across summands.
Coproduct coproduct(const std::vector<BasedGroupoid>& summands);

// ---------------------------------------------------------------------------

/// The groupoid with exactly one morphism between each ordered pair of objects.
class PairGroupoid {
public:
    struct Morphism {
        std::size_t source = 0;
        std::size_t target = 0;
        friend auto operator<=>(const Morphism&, const Morphism&) = default;
    };

    explicit PairGroupoid(std::vector<std::size_t> objects);

    const std::vector<std::size_t>& objects() const { return objects_; }
    bool has_object(std::size_t o) const;
    /// Throws BadParameter for unknown objects.
    Morphism morphism(std::size_t source, std::size_t target) const;
    Morphism identity(std::size_t o) const { return morphism(o, o); }
    /// f then g; throws EndpointMismatch.
    Morphism compose(const Morphism& f, const Morphism& g) const;
    Morphism inverse(const Morphism& f) const { return {f.target, f.source}; }

private:
    std::vector<std::size_t> objects_;  // sorted
};

/// The endpoint projection as a map into the pair groupoid on basepoints.
PairGroupoid::Morphism project_ends(const PairGroupoid& pairs, const EdgeWord& m);

// ---------------------------------------------------------------------------

/// Graph morphism: vertices to vertices, each edge (traversed forward) to a
/// word in the target graph.
struct GraphMap {
    GraphPtr source;
    GraphPtr target;
    std::vector<std::size_t> vertex_map;
    std::vector<EdgeWord> edge_images;
};

/// Throws IllFormedMap when the map is not a graph morphism or does not send
/// basepoints to basepoints.
void check_well_formed(const GraphMap& map, const BasedGroupoid& source, const BasedGroupoid& target);

/// Image of a word, reduced.
EdgeWord apply(const GraphMap& map, const EdgeWord& w);

struct FunctorReport {
    std::size_t identities_checked = 0;
    std::size_t pairs_checked = 0;
    std::vector<std::string> violations;  // with witness words

    bool ok() const { return violations.empty(); }
};

/// Checks F(id) = id on every source basepoint and F(f.g) = F(f).F(g) on every
/// sampled composable pair.
FunctorReport induced_functor_check(const GraphMap& map, const BasedGroupoid& source,
                                    const BasedGroupoid& target,
                                    const std::vector<std::pair<EdgeWord, EdgeWord>>& samples);

/// Two distinct words with the same image, if any.
std::optional<std::pair<EdgeWord, EdgeWord>> injectivity_witness(const GraphMap& map,
                                                                 const std::vector<EdgeWord>& words);

}  // namespace stripes
