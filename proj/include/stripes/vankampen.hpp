#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stripes/atlas.hpp"
#include "stripes/groupoid.hpp"
#include "stripes/surface_graph.hpp"

namespace stripes {

/// Level above which (in absolute value) a standard neighborhood of a
/// boundary interval starts.
inline const Rational kNeighborhoodLevel{4, 5};
/// Level of the points d and d' flanking a seam.
inline const Rational kCutLevel{9, 10};

/// A point of a model strip: abscissa and level in [-1, 1].
struct StripPoint {
    std::size_t strip = 0;
    Rational x{0};
    Rational level{0};

    friend bool operator==(const StripPoint&, const StripPoint&) = default;
};

/// The seam point z chosen over X: x over X, y = gamma^-1(x) over Y.
struct SeamChoice {
    Rational x_beta{0};
    Rational y_beta{0};
    int eps = 1;        // side of X
    int eps_prime = 1;  // side of Y
};

/// A validated expanded atlas together with its graph, seams and the fixed
/// choice of seam points used by the canonical injection.
class Surface {
public:
    /// Throws InvalidAtlas.
    explicit Surface(ExpandedAtlas expanded);

    const ExpandedAtlas& atlas() const { return atlas_; }
    const std::vector<SeamDescriptor>& seams() const { return seams_; }
    const SurfaceGraph& graph() const { return graph_; }
    const SeamChoice& choice(std::size_t seam) const { return choices_.at(seam); }
    std::size_t strip_count() const { return atlas_.strips.size(); }
    std::size_t seam_count() const { return seams_.size(); }
    bool isolated(std::size_t strip) const { return degree_.at(strip) == 0; }

private:
    ExpandedAtlas atlas_;
    std::vector<SeamDescriptor> seams_;
    SurfaceGraph graph_;
    std::vector<SeamChoice> choices_;
    std::vector<std::size_t> degree_;
};

/// Midpoint of a finite interval, finite endpoint +-1 for a half-line, 0 for R.
Rational seam_abscissa(const Interval& x);

/// The origin of a strip (image of a graph vertex).
StripPoint phi_vertex(const Surface& s, std::size_t strip);

/// The path through seam `seam` at parameter t in [-1, 1]:
///   t in [-1,-1/2]: (2(1+t)x, (1+t)eps) in the X strip
///   t in [-1/2, 0]: (x, (1+t)eps)
///   t in [0, 1/2]:  (y, (1-t)eps') in the Y strip
///   t in [1/2, 1]:  (2(1-t)y, (1-t)eps')
/// The seam point at t = 0 is reported in its X-side coordinates.
/// Throws BadParameter outside [-1, 1].
StripPoint phi_eval(const Surface& s, std::size_t seam, const Rational& t);

// ---------------------------------------------------------------------------
// Covers

/// interval x (4/5, 1] on the top side, interval x [-1, -4/5) on the bottom.
struct Rect {
    std::size_t strip = 0;
    Side side = Side::Top;
    Interval interval;
};

struct CoverElement {
    enum class Kind : std::uint8_t { StripInterior, SeamNbhd };
    Kind kind = Kind::StripInterior;
    std::size_t index = 0;      // strip or seam position
    std::vector<Rect> rects;    // SeamNbhd: the X rectangle, then the Y rectangle
    std::string label;
};

/// Sub-interval of the parameter segment [-1, 1] of one graph edge.
struct EdgePiece {
    std::size_t edge = 0;
    Rational lo{-1};
    Rational hi{1};
    bool lo_closed = false;
    bool hi_closed = false;
};

/// Preimage of a cover element in the graph: a star around a vertex, or an
/// open arc inside one edge.
struct GraphCoverElement {
    CoverElement::Kind kind = CoverElement::Kind::StripInterior;
    std::size_t index = 0;
    std::optional<std::size_t> vertex;
    std::vector<EdgePiece> pieces;
    std::string label;
};

/// Both covers indexed by the same list: strips first, then seams.
struct CoverPair {
    std::vector<CoverElement> surface;
    std::vector<GraphCoverElement> graph;
};

CoverPair build_cover(const Surface& s);

// ---------------------------------------------------------------------------
// Cut set

struct CutPoint {
    enum class Role : std::uint8_t { D, DPrime, Origin };
    Role role = Role::D;
    std::size_t seam = 0;   // D and DPrime
    std::size_t strip = 0;  // strip containing the point
    StripPoint point;
    std::string label;      // "d[s]", "d'[s]", "o[A]"
};

/// A point of the graph: a vertex, or an interior parameter of an edge.
struct GraphPoint {
    std::optional<std::size_t> vertex;
    std::size_t edge = 0;
    Rational t{0};

    friend bool operator==(const GraphPoint&, const GraphPoint&) = default;
};

/// d and d' per seam in seam order, then the origins of isolated strips.
struct CutSet {
    std::vector<CutPoint> points;
};

CutSet choose_cut_set(const Surface& s);

/// phi^-1 of a cut point: parameter -1/10 or 1/10 on its seam's edge, or the
/// isolated vertex.
GraphPoint cut_preimage(const CutPoint& p);

/// phi on an arbitrary graph point.
StripPoint phi_eval(const Surface& s, const GraphPoint& p);

// ---------------------------------------------------------------------------
// Intersections and conditions

struct IntersectionComponent {
    std::size_t first = 0;   // cover index
    std::size_t second = 0;
    std::string description;
    std::vector<std::size_t> cut_points;  // indices into CutSet::points
};

struct IntersectionReport {
    std::vector<IntersectionComponent> surface_pairs;
    std::vector<IntersectionComponent> graph_pairs;
    std::size_t surface_nonempty_triples = 0;
    std::size_t graph_nonempty_triples = 0;
    std::vector<std::string> triple_witnesses;
};

IntersectionReport intersections(const Surface& s, const CoverPair& cover, const CutSet& cut);

bool contains(const Surface& s, const CoverElement& e, const StripPoint& p);
bool contains(const Surface& s, const GraphCoverElement& e, const GraphPoint& p);

struct ConditionReport {
    bool simply_connected = true;      // structural certificate of every element
    bool bijection = true;             // phi : P_G n U -> P n V per element
    bool exactly_one_cut_point = true; // every pairwise component, both covers
    bool triples_empty = true;
    bool meets_components = true;      // P meets every component of Z, P_G of G
    bool pullback_consistent = true;   // U = phi^-1(V) on a parameter grid
    std::vector<std::string> certificates;
    std::vector<std::string> failures;

    bool ok() const {
        return simply_connected && bijection && exactly_one_cut_point && triples_empty &&
               meets_components && pullback_consistent;
    }
};

ConditionReport check_conditions(const Surface& s, const CoverPair& cover, const CutSet& cut,
                                 const IntersectionReport& inter);

// ---------------------------------------------------------------------------
// Cover graph

/// Vertices are the cut points (same order); one edge d -> d' per seam, and
/// per non-isolated strip a star from its least cut point to the others.
struct CoverGraph {
    SurfaceGraph graph;
    std::vector<std::size_t> seam_edge;                // per seam
    std::vector<std::optional<std::size_t>> root;      // per strip, cut point index
    std::vector<std::optional<std::size_t>> star_edge; // per cut point, edge from root
};

/// Throws UnsupportedConfiguration when some intersection component does not
/// carry exactly one cut point.
CoverGraph cover_graph(const Surface& s, const CutSet& cut, const IntersectionReport& inter);

// ---------------------------------------------------------------------------
// Verification

struct VerificationReport {
    bool confirmed = false;
    std::size_t max_word_length = 0;

    std::size_t graph_objects = 0;
    std::size_t surface_objects = 0;
    std::vector<std::int64_t> graph_ranks;    // per component of the subdivided graph
    std::vector<std::int64_t> surface_ranks;  // per corresponding component of H
    std::vector<std::int64_t> atlas_graph_ranks;  // graph_invariants of the atlas graph
    std::int64_t graph_euler = 0;
    std::int64_t cover_graph_euler = 0;

    std::map<std::string, bool> checks;
    std::size_t words_checked = 0;
    std::size_t pairs_checked = 0;
    ConditionReport conditions;
    std::vector<std::string> witnesses;

    nlohmann::json to_json() const;
    /// Throws ReportMismatch with the first witness unless confirmed.
    void require() const;
};

/// Throws InvalidAtlas on an invalid atlas.
VerificationReport verify_phi_iso(const ExpandedAtlas& expanded, std::size_t max_word_length = 8);

struct NerveResult {
    SurfaceGraph nerve;
    bool matches_subdivision = false;
};

/// One vertex per cover element, one edge per component of each pairwise
/// intersection, compared against the graph subdivided once per edge.
NerveResult nerve_oracle(const Surface& s, const CoverPair& cover, const IntersectionReport& inter);

}  // namespace stripes
