#include "stripes/vankampen.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_map>

#include "stripes/error.hpp"

namespace stripes {

namespace {

using boost::multiprecision::abs;

const Rational kHalf{1, 2};
// Parameter of the cut preimages on each edge: phi(-1/10) = d, phi(1/10) = d'.
const Rational kCutParameter = 1 - kCutLevel;

std::string point_text(const Surface& s, const StripPoint& p) {
    return "(" + s.atlas().strips[p.strip].id + ", " + to_string(p.x) + ", " + to_string(p.level) + ")";
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t v) {
        while (parent_[v] != v) v = parent_[v] = parent_[parent_[v]];
        return v;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }
    /// Groups of indices, ordered by least member.
    std::vector<std::vector<std::size_t>> groups() {
        std::map<std::size_t, std::vector<std::size_t>> by_root;
        for (std::size_t i = 0; i < parent_.size(); ++i) by_root[find(i)].push_back(i);
        std::vector<std::vector<std::size_t>> out;
        for (auto& [root, members] : by_root) out.push_back(std::move(members));
        return out;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Surface and the canonical injection

Rational seam_abscissa(const Interval& x) {
    const bool lo = x.lo.is_finite();
    const bool hi = x.hi.is_finite();
    if (lo && hi) return (x.lo.value() + x.hi.value()) / 2;
    if (lo) return x.lo.value() + 1;
    if (hi) return x.hi.value() - 1;
    return Rational{0};
}

Surface::Surface(ExpandedAtlas expanded)
    : atlas_(std::move(expanded)),
      seams_(stripes::seams(atlas_)),
      graph_(build_graph(atlas_)),
      degree_(atlas_.strips.size(), 0) {
    for (const SeamDescriptor& sd : seams_) {
        SeamChoice c;
        c.x_beta = seam_abscissa(sd.x.interval);
        c.y_beta = gamma_inverse(sd, c.x_beta);
        c.eps = sign(sd.x.ref.side);
        c.eps_prime = sign(sd.y.ref.side);
        choices_.push_back(std::move(c));
        ++degree_[sd.alpha()];
        ++degree_[sd.alpha_prime()];
    }
}

StripPoint phi_vertex(const Surface& s, std::size_t strip) {
    if (strip >= s.strip_count()) throw BadParameter("no strip at position " + std::to_string(strip));
    return {strip, Rational{0}, Rational{0}};
}

StripPoint phi_eval(const Surface& s, std::size_t seam, const Rational& t) {
    if (seam >= s.seam_count()) throw BadParameter("no seam at position " + std::to_string(seam));
    if (t < -1 || t > 1) throw BadParameter("parameter " + to_string(t) + " is not in [-1, 1]");
    const SeamDescriptor& sd = s.seams()[seam];
    const SeamChoice& c = s.choice(seam);
    if (t <= -kHalf) return {sd.alpha(), 2 * (1 + t) * c.x_beta, (1 + t) * c.eps};
    if (t <= 0) return {sd.alpha(), c.x_beta, (1 + t) * c.eps};
    if (t <= kHalf) return {sd.alpha_prime(), c.y_beta, (1 - t) * c.eps_prime};
    return {sd.alpha_prime(), 2 * (1 - t) * c.y_beta, (1 - t) * c.eps_prime};
}

StripPoint phi_eval(const Surface& s, const GraphPoint& p) {
    if (p.vertex) return phi_vertex(s, *p.vertex);
    return phi_eval(s, p.edge, p.t);
}

// ---------------------------------------------------------------------------
// Covers

CoverPair build_cover(const Surface& s) {
    CoverPair cover;
    const SurfaceGraph& g = s.graph();
    for (std::size_t a = 0; a < s.strip_count(); ++a) {
        const std::string& id = s.atlas().strips[a].id;
        cover.surface.push_back({CoverElement::Kind::StripInterior, a, {}, "N[" + id + "]"});

        GraphCoverElement star;
        star.kind = CoverElement::Kind::StripInterior;
        star.index = a;
        star.vertex = a;
        star.label = "U[" + id + "]";
        // phi maps [-1, 0) of an edge into its X strip and (0, 1] into its Y
        // strip; the seam point at 0 lies in no strip interior.
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            if (g.edges()[e].from == a) star.pieces.push_back({e, Rational{-1}, Rational{0}, true, false});
            if (g.edges()[e].to == a) star.pieces.push_back({e, Rational{0}, Rational{1}, false, true});
        }
        cover.graph.push_back(std::move(star));
    }
    // On [-1/2, 0] phi has |level| = 1 + t, which exceeds the neighborhood
    // level iff t > level - 1; on [-1, -1/2] the level stays below 1/2.
    const Rational arc = 1 - kNeighborhoodLevel;
    for (std::size_t b = 0; b < s.seam_count(); ++b) {
        const SeamDescriptor& sd = s.seams()[b];
        CoverElement nb{CoverElement::Kind::SeamNbhd, b, {}, "N[" + sd.id + "]"};
        nb.rects.push_back({sd.alpha(), sd.x.ref.side, sd.x.interval});
        nb.rects.push_back({sd.alpha_prime(), sd.y.ref.side, sd.y.interval});
        cover.surface.push_back(std::move(nb));

        GraphCoverElement ge;
        ge.kind = CoverElement::Kind::SeamNbhd;
        ge.index = b;
        ge.label = "U[" + sd.id + "]";
        ge.pieces.push_back({b, Rational(-arc), arc, false, false});
        cover.graph.push_back(std::move(ge));
    }
    return cover;
}

// ---------------------------------------------------------------------------
// Cut set

CutSet choose_cut_set(const Surface& s) {
    CutSet cut;
    for (std::size_t b = 0; b < s.seam_count(); ++b) {
        const SeamDescriptor& sd = s.seams()[b];
        const SeamChoice& c = s.choice(b);
        cut.points.push_back({CutPoint::Role::D, b, sd.alpha(),
                              {sd.alpha(), c.x_beta, kCutLevel * c.eps}, "d[" + sd.id + "]"});
        cut.points.push_back({CutPoint::Role::DPrime, b, sd.alpha_prime(),
                              {sd.alpha_prime(), c.y_beta, kCutLevel * c.eps_prime}, "d'[" + sd.id + "]"});
    }
    for (std::size_t a = 0; a < s.strip_count(); ++a) {
        if (!s.isolated(a)) continue;
        cut.points.push_back({CutPoint::Role::Origin, 0, a, phi_vertex(s, a),
                              "o[" + s.atlas().strips[a].id + "]"});
    }
    return cut;
}

GraphPoint cut_preimage(const CutPoint& p) {
    switch (p.role) {
        case CutPoint::Role::D: return {std::nullopt, p.seam, Rational(-kCutParameter)};
        case CutPoint::Role::DPrime: return {std::nullopt, p.seam, kCutParameter};
        case CutPoint::Role::Origin: break;
    }
    return {p.strip, 0, Rational{0}};
}

// ---------------------------------------------------------------------------
// Point membership and intersections

namespace {

bool rect_contains(const Rect& r, const StripPoint& p, bool with_boundary) {
    if (r.strip != p.strip || !r.interval.contains(p.x)) return false;
    if (r.side == Side::Top) return p.level > kNeighborhoodLevel && (p.level < 1 || (with_boundary && p.level == 1));
    return p.level < -kNeighborhoodLevel && (p.level > -1 || (with_boundary && p.level == -1));
}

// A subset of one strip: the open band (no side), or a rectangle over an
// interval of one side, with or without its boundary points. Unglued
// boundary intervals of a strip interior are not represented: they meet no
// other cover element.
struct Region {
    std::size_t strip = 0;
    std::optional<Side> side;
    Interval interval;
    bool with_boundary = false;
};

std::vector<Region> regions_of(const CoverElement& e) {
    if (e.kind == CoverElement::Kind::StripInterior) {
        return {Region{e.index, std::nullopt, {ExtendedRational::neg_inf(), ExtendedRational::pos_inf()}, false}};
    }
    std::vector<Region> out;
    for (const Rect& r : e.rects) out.push_back({r.strip, r.side, r.interval, true});
    return out;
}

std::optional<Region> meet(const Region& a, const Region& b) {
    if (a.strip != b.strip) return std::nullopt;
    if (!a.side && !b.side) return a;
    if (!a.side || !b.side) {
        Region r = a.side ? a : b;
        r.with_boundary = false;
        return r;
    }
    if (*a.side != *b.side || !a.interval.overlaps(b.interval)) return std::nullopt;
    return Region{a.strip, a.side, {std::max(a.interval.lo, b.interval.lo), std::min(a.interval.hi, b.interval.hi)},
                  a.with_boundary && b.with_boundary};
}

std::vector<Region> meet(const std::vector<Region>& a, const std::vector<Region>& b) {
    std::vector<Region> out;
    for (const Region& x : a) {
        for (const Region& y : b) {
            if (auto m = meet(x, y)) out.push_back(*m);
        }
    }
    return out;
}

bool region_contains(const Region& r, const StripPoint& p) {
    if (r.strip != p.strip) return false;
    if (!r.side) return abs(p.level) < 1;
    return rect_contains({r.strip, *r.side, r.interval}, p, r.with_boundary);
}

std::string region_text(const Surface& s, const Region& r) {
    const std::string& id = s.atlas().strips[r.strip].id;
    if (!r.side) return id + ":band";
    const std::string levels = *r.side == Side::Top ? (r.with_boundary ? "(4/5, 1]" : "(4/5, 1)")
                                                    : (r.with_boundary ? "[-1, -4/5)" : "(-1, -4/5)");
    return id + ":(" + to_string(r.interval.lo) + ", " + to_string(r.interval.hi) + ")x" + levels;
}

/// Connected components of a union of regions.
std::vector<std::vector<std::size_t>> region_components(const std::vector<Region>& rs) {
    UnionFind uf(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        for (std::size_t j = i + 1; j < rs.size(); ++j) {
            if (meet(rs[i], rs[j])) uf.unite(i, j);
        }
    }
    return uf.groups();
}

// -- graph side --------------------------------------------------------------

bool piece_contains(const EdgePiece& p, const Rational& t) {
    return (t > p.lo || (t == p.lo && p.lo_closed)) && (t < p.hi || (t == p.hi && p.hi_closed));
}

std::optional<EdgePiece> meet(const EdgePiece& a, const EdgePiece& b) {
    if (a.edge != b.edge) return std::nullopt;
    EdgePiece r;
    r.edge = a.edge;
    if (a.lo == b.lo) {
        r.lo = a.lo;
        r.lo_closed = a.lo_closed && b.lo_closed;
    } else {
        const EdgePiece& m = a.lo > b.lo ? a : b;
        r.lo = m.lo;
        r.lo_closed = m.lo_closed;
    }
    if (a.hi == b.hi) {
        r.hi = a.hi;
        r.hi_closed = a.hi_closed && b.hi_closed;
    } else {
        const EdgePiece& m = a.hi < b.hi ? a : b;
        r.hi = m.hi;
        r.hi_closed = m.hi_closed;
    }
    if (r.lo < r.hi || (r.lo == r.hi && r.lo_closed && r.hi_closed)) return r;
    return std::nullopt;
}

bool pieces_connected(const EdgePiece& a, const EdgePiece& b) {
    if (a.edge != b.edge) return false;
    if (meet(a, b)) return true;
    return (a.hi == b.lo && (a.hi_closed || b.lo_closed)) || (b.hi == a.lo && (b.hi_closed || a.lo_closed));
}

// Vertex at which a piece is closed, if any.
std::vector<std::size_t> attached_vertices(const SurfaceGraph& g, const EdgePiece& p) {
    std::vector<std::size_t> out;
    if (p.lo == -1 && p.lo_closed) out.push_back(g.edges()[p.edge].from);
    if (p.hi == 1 && p.hi_closed) out.push_back(g.edges()[p.edge].to);
    return out;
}

struct GraphSet {
    std::vector<std::size_t> vertices;  // sorted
    std::vector<EdgePiece> pieces;
    bool empty() const { return vertices.empty() && pieces.empty(); }
};

GraphSet set_of(const SurfaceGraph& g, const GraphCoverElement& e) {
    GraphSet s;
    if (e.vertex) s.vertices.push_back(*e.vertex);
    s.pieces = e.pieces;
    for (const EdgePiece& p : e.pieces) {
        for (std::size_t v : attached_vertices(g, p)) s.vertices.push_back(v);
    }
    std::sort(s.vertices.begin(), s.vertices.end());
    s.vertices.erase(std::unique(s.vertices.begin(), s.vertices.end()), s.vertices.end());
    return s;
}

GraphSet meet(const GraphSet& a, const GraphSet& b) {
    GraphSet r;
    std::set_intersection(a.vertices.begin(), a.vertices.end(), b.vertices.begin(), b.vertices.end(),
                          std::back_inserter(r.vertices));
    for (const EdgePiece& x : a.pieces) {
        for (const EdgePiece& y : b.pieces) {
            if (auto m = meet(x, y)) r.pieces.push_back(*m);
        }
    }
    return r;
}

bool set_contains(const GraphSet& s, const GraphPoint& p) {
    if (p.vertex) return std::binary_search(s.vertices.begin(), s.vertices.end(), *p.vertex);
    return std::any_of(s.pieces.begin(), s.pieces.end(),
                       [&](const EdgePiece& q) { return q.edge == p.edge && piece_contains(q, p.t); });
}

struct GraphComponent {
    std::vector<std::size_t> vertices;
    std::vector<EdgePiece> pieces;
};

std::vector<GraphComponent> graph_components(const SurfaceGraph& g, const GraphSet& s) {
    // Nodes: pieces first, then vertices.
    const std::size_t np = s.pieces.size();
    UnionFind uf(np + s.vertices.size());
    for (std::size_t i = 0; i < np; ++i) {
        for (std::size_t j = i + 1; j < np; ++j) {
            if (pieces_connected(s.pieces[i], s.pieces[j])) uf.unite(i, j);
        }
        for (std::size_t v : attached_vertices(g, s.pieces[i])) {
            const auto it = std::lower_bound(s.vertices.begin(), s.vertices.end(), v);
            if (it != s.vertices.end() && *it == v) {
                uf.unite(i, np + static_cast<std::size_t>(it - s.vertices.begin()));
            }
        }
    }
    std::vector<GraphComponent> out;
    for (const auto& group : uf.groups()) {
        GraphComponent c;
        for (std::size_t node : group) {
            if (node < np) {
                c.pieces.push_back(s.pieces[node]);
            } else {
                c.vertices.push_back(s.vertices[node - np]);
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::string piece_text(const SurfaceGraph& g, const EdgePiece& p) {
    return g.edges()[p.edge].id + (p.lo_closed ? "[" : "(") + to_string(p.lo) + ", " + to_string(p.hi) +
           (p.hi_closed ? "]" : ")");
}

}  // namespace

bool contains(const Surface&, const CoverElement& e, const StripPoint& p) {
    if (e.kind == CoverElement::Kind::StripInterior) return e.index == p.strip && abs(p.level) < 1;
    return std::any_of(e.rects.begin(), e.rects.end(), [&](const Rect& r) { return rect_contains(r, p, true); });
}

bool contains(const Surface& s, const GraphCoverElement& e, const GraphPoint& p) {
    if (!p.vertex) {
        return std::any_of(e.pieces.begin(), e.pieces.end(),
                           [&](const EdgePiece& q) { return q.edge == p.edge && piece_contains(q, p.t); });
    }
    if (e.vertex == p.vertex) return true;
    const auto& edges = s.graph().edges();
    return std::any_of(e.pieces.begin(), e.pieces.end(), [&](const EdgePiece& q) {
        return (q.lo == -1 && q.lo_closed && edges[q.edge].from == *p.vertex) ||
               (q.hi == 1 && q.hi_closed && edges[q.edge].to == *p.vertex);
    });
}

IntersectionReport intersections(const Surface& s, const CoverPair& cover, const CutSet& cut) {
    IntersectionReport report;
    const std::size_t n = cover.surface.size();
    const SurfaceGraph& g = s.graph();

    std::vector<std::vector<Region>> regions;
    std::vector<GraphSet> sets;
    for (std::size_t i = 0; i < n; ++i) {
        regions.push_back(regions_of(cover.surface[i]));
        sets.push_back(set_of(g, cover.graph[i]));
    }
    std::vector<GraphPoint> pre;
    for (const CutPoint& p : cut.points) pre.push_back(cut_preimage(p));

    std::vector<std::vector<bool>> z_met(n, std::vector<bool>(n, false));
    std::vector<std::vector<bool>> g_met(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::vector<Region> zr = meet(regions[i], regions[j]);
            z_met[i][j] = !zr.empty();
            for (const auto& group : region_components(zr)) {
                IntersectionComponent c{i, j, cover.surface[i].label + " & " + cover.surface[j].label + ":", {}};
                for (std::size_t r : group) c.description += " " + region_text(s, zr[r]);
                for (std::size_t k = 0; k < cut.points.size(); ++k) {
                    const bool inside = std::any_of(group.begin(), group.end(), [&](std::size_t r) {
                        return region_contains(zr[r], cut.points[k].point);
                    });
                    if (inside) c.cut_points.push_back(k);
                }
                report.surface_pairs.push_back(std::move(c));
            }

            const GraphSet gs = meet(sets[i], sets[j]);
            g_met[i][j] = !gs.empty();
            if (gs.empty()) continue;
            for (const GraphComponent& comp : graph_components(g, gs)) {
                IntersectionComponent c{i, j, cover.graph[i].label + " & " + cover.graph[j].label + ":", {}};
                for (std::size_t v : comp.vertices) c.description += " " + g.vertices()[v];
                for (const EdgePiece& p : comp.pieces) c.description += " " + piece_text(g, p);
                GraphSet cs{comp.vertices, comp.pieces};
                std::sort(cs.vertices.begin(), cs.vertices.end());
                for (std::size_t k = 0; k < pre.size(); ++k) {
                    if (set_contains(cs, pre[k])) c.cut_points.push_back(k);
                }
                report.graph_pairs.push_back(std::move(c));
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                if (z_met[i][j] && z_met[i][k] && z_met[j][k] &&
                    !meet(meet(regions[i], regions[j]), regions[k]).empty()) {
                    ++report.surface_nonempty_triples;
                    report.triple_witnesses.push_back(cover.surface[i].label + " & " + cover.surface[j].label +
                                                      " & " + cover.surface[k].label);
                }
                if (g_met[i][j] && g_met[i][k] && g_met[j][k] && !meet(meet(sets[i], sets[j]), sets[k]).empty()) {
                    ++report.graph_nonempty_triples;
                    report.triple_witnesses.push_back(cover.graph[i].label + " & " + cover.graph[j].label + " & " +
                                                      cover.graph[k].label);
                }
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Conditions

namespace {

void certify_elements(const Surface& s, const CoverPair& cover, ConditionReport& r) {
    const SurfaceGraph& g = s.graph();
    auto fail = [&](const std::string& msg) {
        r.simply_connected = false;
        r.failures.push_back("shape: " + msg);
    };
    if (cover.surface.size() != s.strip_count() + s.seam_count() || cover.graph.size() != cover.surface.size()) {
        fail("cover sizes do not match the atlas");
        return;
    }
    for (std::size_t i = 0; i < cover.surface.size(); ++i) {
        const CoverElement& e = cover.surface[i];
        if (e.kind == CoverElement::Kind::StripInterior) {
            if (e.index != i || !e.rects.empty()) {
                fail(e.label + " is not a strip interior");
                continue;
            }
            r.certificates.push_back(e.label + ": open band of a strip with its unglued boundary intervals");
            continue;
        }
        const std::size_t b = i - s.strip_count();
        const SeamDescriptor& sd = s.seams()[b];
        const bool ok = e.index == b && e.rects.size() == 2 && e.rects[0].strip == sd.alpha() &&
                        e.rects[0].side == sd.x.ref.side && e.rects[0].interval == sd.x.interval &&
                        e.rects[1].strip == sd.alpha_prime() && e.rects[1].side == sd.y.ref.side &&
                        e.rects[1].interval == sd.y.interval;
        if (!ok) {
            fail(e.label + " is not the pair of standard rectangles of its seam");
            continue;
        }
        r.certificates.push_back(e.label + ": two half-open rectangles glued along seam " + sd.id);
    }
    for (std::size_t i = 0; i < cover.graph.size(); ++i) {
        const GraphCoverElement& e = cover.graph[i];
        if (e.kind == CoverElement::Kind::StripInterior) {
            bool ok = e.vertex == i;
            std::set<std::pair<std::size_t, bool>> prongs;
            for (const EdgePiece& p : e.pieces) {
                const GraphEdge& edge = g.edges()[p.edge];
                const bool from_end = p.lo == -1 && p.lo_closed && p.hi <= 0 && !p.hi_closed && edge.from == i;
                const bool to_end = p.hi == 1 && p.hi_closed && p.lo >= 0 && !p.lo_closed && edge.to == i;
                ok = ok && (from_end != to_end) && prongs.emplace(p.edge, from_end).second;
            }
            if (!ok) {
                fail(e.label + " is not a star of its vertex");
                continue;
            }
            r.certificates.push_back(e.label + ": star of " + g.vertices()[i] + " with " +
                                     std::to_string(e.pieces.size()) + " prongs");
            continue;
        }
        const std::size_t b = i - s.strip_count();
        const bool ok = !e.vertex && e.pieces.size() == 1 && e.pieces[0].edge == b && !e.pieces[0].lo_closed &&
                        !e.pieces[0].hi_closed && e.pieces[0].lo > -1 && e.pieces[0].hi < 1 &&
                        e.pieces[0].lo < 0 && e.pieces[0].hi > 0;
        if (!ok) {
            fail(e.label + " is not an open arc around the seam point");
            continue;
        }
        r.certificates.push_back(e.label + ": open arc " + piece_text(g, e.pieces[0]));
    }
}

}  // namespace

ConditionReport check_conditions(const Surface& s, const CoverPair& cover, const CutSet& cut,
                                 const IntersectionReport& inter) {
    ConditionReport r;
    certify_elements(s, cover, r);

    // phi(P_G) = P point by point, and per element a bijection.
    std::vector<GraphPoint> pre;
    std::vector<StripPoint> image;
    for (const CutPoint& p : cut.points) {
        pre.push_back(cut_preimage(p));
        image.push_back(phi_eval(s, pre.back()));
        if (!(image.back() == p.point)) {
            r.bijection = false;
            r.failures.push_back("bijection: phi(preimage of " + p.label + ") = " + point_text(s, image.back()) +
                                 " but the point is " + point_text(s, p.point));
        }
    }
    if (!cover.surface.empty() && cover.graph.size() == cover.surface.size()) {
        for (std::size_t i = 0; i < cover.surface.size(); ++i) {
            std::vector<std::size_t> in_z;
            std::vector<std::size_t> in_g;
            for (std::size_t k = 0; k < cut.points.size(); ++k) {
                if (contains(s, cover.surface[i], cut.points[k].point)) in_z.push_back(k);
                if (contains(s, cover.graph[i], pre[k])) in_g.push_back(k);
            }
            // The image of every preimage in U must be some cut point in V,
            // distinct preimages must have distinct images, and all of V's
            // cut points must be hit.
            std::vector<std::size_t> hit;
            for (std::size_t k : in_g) {
                for (std::size_t j : in_z) {
                    if (image[k] == cut.points[j].point) hit.push_back(j);
                }
            }
            std::sort(hit.begin(), hit.end());
            const bool distinct = std::adjacent_find(hit.begin(), hit.end()) == hit.end();
            if (hit.size() != in_g.size() || !distinct || hit != in_z) {
                r.bijection = false;
                r.failures.push_back("bijection: phi does not restrict to a bijection on " + cover.graph[i].label +
                                     " -> " + cover.surface[i].label);
            }
        }
    }

    for (const auto* pairs : {&inter.surface_pairs, &inter.graph_pairs}) {
        for (const IntersectionComponent& c : *pairs) {
            if (c.cut_points.size() != 1) {
                r.exactly_one_cut_point = false;
                r.failures.push_back("intersection: " + c.description + " holds " +
                                     std::to_string(c.cut_points.size()) + " cut points");
            }
        }
    }
    if (inter.surface_nonempty_triples != 0 || inter.graph_nonempty_triples != 0) {
        r.triples_empty = false;
        for (const std::string& w : inter.triple_witnesses) r.failures.push_back("triple: " + w + " is nonempty");
    }

    // Path components of Z are unions of strips joined by seams.
    {
        UnionFind uf(s.strip_count());
        for (const ExpandedGluing& gl : s.atlas().gluings) uf.unite(gl.x.strip, gl.y.strip);
        std::set<std::size_t> met;
        for (const CutPoint& p : cut.points) met.insert(uf.find(p.point.strip));
        for (std::size_t a = 0; a < s.strip_count(); ++a) {
            if (met.count(uf.find(a)) == 0) {
                r.meets_components = false;
                r.failures.push_back("components: no cut point in the component of " + s.atlas().strips[a].id);
            }
        }
        const auto labels = component_labels(s.graph());
        std::set<std::size_t> met_g;
        for (const GraphPoint& p : pre) met_g.insert(labels[p.vertex ? *p.vertex : s.graph().edges()[p.edge].from]);
        for (std::size_t v = 0; v < labels.size(); ++v) {
            if (met_g.count(labels[v]) == 0) {
                r.meets_components = false;
                r.failures.push_back("components: no cut preimage in the component of vertex " +
                                     s.graph().vertices()[v]);
            }
        }
    }

    // U = phi^-1(V), sampled on a grid of every edge.
    if (cover.graph.size() == cover.surface.size()) {
        std::vector<Rational> grid;
        for (int k = -20; k <= 20; ++k) grid.emplace_back(k, 20);
        const Rational edge_of_arc = 1 - kNeighborhoodLevel;
        for (const Rational& d : {Rational{1, 100}, Rational{0}}) {
            grid.push_back(edge_of_arc + d);
            grid.push_back(edge_of_arc - d);
            grid.push_back(-edge_of_arc + d);
            grid.push_back(-edge_of_arc - d);
        }
        for (std::size_t e = 0; e < s.seam_count(); ++e) {
            for (const Rational& t : grid) {
                GraphPoint gp{std::nullopt, e, t};
                if (t == -1) gp = {s.graph().edges()[e].from, 0, Rational{0}};
                if (t == 1) gp = {s.graph().edges()[e].to, 0, Rational{0}};
                const StripPoint zp = phi_eval(s, e, t);
                for (std::size_t i = 0; i < cover.surface.size(); ++i) {
                    if (contains(s, cover.surface[i], zp) != contains(s, cover.graph[i], gp)) {
                        r.pullback_consistent = false;
                        r.failures.push_back("pullback: " + s.graph().edges()[e].id + " at t = " + to_string(t) +
                                             " disagrees on " + cover.graph[i].label);
                    }
                }
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Cover graph

CoverGraph cover_graph(const Surface& s, const CutSet& cut, const IntersectionReport& inter) {
    for (const auto* pairs : {&inter.surface_pairs, &inter.graph_pairs}) {
        for (const IntersectionComponent& c : *pairs) {
            if (c.cut_points.size() != 1) {
                throw UnsupportedConfiguration(c.description + " holds " + std::to_string(c.cut_points.size()) +
                                               " cut points; the closed-form coequalizer needs exactly one");
            }
        }
    }
    CoverGraph h;
    for (const CutPoint& p : cut.points) h.graph.add_vertex(p.label);
    h.seam_edge.assign(s.seam_count(), 0);
    h.root.assign(s.strip_count(), std::nullopt);
    h.star_edge.assign(cut.points.size(), std::nullopt);

    std::vector<std::optional<std::size_t>> d(s.seam_count());
    std::vector<std::optional<std::size_t>> d_prime(s.seam_count());
    for (std::size_t k = 0; k < cut.points.size(); ++k) {
        const CutPoint& p = cut.points[k];
        if (p.role == CutPoint::Role::D) d[p.seam] = k;
        if (p.role == CutPoint::Role::DPrime) d_prime[p.seam] = k;
    }
    for (std::size_t b = 0; b < s.seam_count(); ++b) {
        if (!d[b] || !d_prime[b]) throw UnsupportedConfiguration("seam " + s.seams()[b].id + " lacks d or d'");
        h.seam_edge[b] = h.graph.add_edge(s.seams()[b].id, *d[b], *d_prime[b]);
    }

    const CoverElement band_probe{};
    for (std::size_t a = 0; a < s.strip_count(); ++a) {
        CoverElement band = band_probe;
        band.index = a;
        std::size_t k_star = 0;
        for (std::size_t k = 0; k < cut.points.size(); ++k) {
            if (!contains(s, band, cut.points[k].point)) continue;
            if (!h.root[a]) {
                h.root[a] = k;
                continue;
            }
            h.star_edge[k] = h.graph.add_edge("star[" + s.atlas().strips[a].id + "]#" + std::to_string(k_star++),
                                              *h.root[a], k);
        }
        if (!h.root[a]) {
            throw UnsupportedConfiguration("strip " + s.atlas().strips[a].id + " holds no cut point");
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// Verification

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json j;
    j["confirmed"] = confirmed;
    j["max_word_length"] = max_word_length;
    j["objects"] = {{"graph", graph_objects}, {"surface", surface_objects}};
    j["components"] = graph_ranks.size();
    j["ranks"] = {{"graph", graph_ranks}, {"surface", surface_ranks}, {"atlas_graph", atlas_graph_ranks}};
    j["euler"] = {{"graph", graph_euler}, {"cover_graph", cover_graph_euler}};
    j["checks"] = checks;
    j["words_checked"] = words_checked;
    j["pairs_checked"] = pairs_checked;
    j["conditions"] = {{"simply_connected", conditions.simply_connected},
                       {"bijection", conditions.bijection},
                       {"exactly_one_cut_point", conditions.exactly_one_cut_point},
                       {"triples_empty", conditions.triples_empty},
                       {"meets_components", conditions.meets_components},
                       {"pullback_consistent", conditions.pullback_consistent},
                       {"failures", conditions.failures}};
    j["witnesses"] = witnesses;
    return j;
}

void VerificationReport::require() const {
    if (confirmed) return;
    throw ReportMismatch(witnesses.empty() ? std::string("verification failed") : witnesses.front());
}

VerificationReport verify_phi_iso(const ExpandedAtlas& expanded, std::size_t max_word_length) {
    VerificationReport rep;
    rep.max_word_length = max_word_length;
    const Surface s(expanded);
    const CoverPair cover = build_cover(s);
    const CutSet cut = choose_cut_set(s);
    const IntersectionReport inter = intersections(s, cover, cut);
    rep.conditions = check_conditions(s, cover, cut, inter);
    rep.checks["conditions"] = rep.conditions.ok();
    for (const std::string& f : rep.conditions.failures) rep.witnesses.push_back(f);

    const GraphInvariants atlas_inv = graph_invariants(s.graph());
    for (const ComponentInfo& c : atlas_inv.components) rep.atlas_graph_ranks.push_back(c.rank);
    rep.graph_euler = atlas_inv.euler;

    std::optional<CoverGraph> hg;
    try {
        hg = cover_graph(s, cut, inter);
    } catch (const UnsupportedConfiguration& e) {
        rep.witnesses.emplace_back(e.what());
    }
    rep.checks["cover_graph_built"] = hg.has_value();
    if (!hg || !rep.conditions.ok()) {
        rep.confirmed = false;
        return rep;
    }
    auto h = std::make_shared<const SurfaceGraph>(hg->graph);
    rep.cover_graph_euler = graph_invariants(*h).euler;
    rep.checks["euler_characteristic"] = rep.cover_graph_euler == rep.graph_euler;

    // Pi_1(G, P_G) on the graph subdivided at the cut preimages.
    EdgeMarks marks;
    for (const GraphEdge& e : s.graph().edges()) marks[e.id] = {Rational(-kCutParameter), kCutParameter};
    const Subdivision sub = subdivide_with_map(s.graph(), marks);
    auto gsub = std::make_shared<const SurfaceGraph>(sub.graph);

    std::vector<std::size_t> graph_base;
    std::vector<GraphPoint> base_point;
    for (std::size_t e = 0; e < s.seam_count(); ++e) {
        graph_base.push_back(sub.new_vertices[e][0]);
        base_point.push_back({std::nullopt, e, Rational(-kCutParameter)});
        graph_base.push_back(sub.new_vertices[e][1]);
        base_point.push_back({std::nullopt, e, kCutParameter});
    }
    for (std::size_t a = 0; a < s.strip_count(); ++a) {
        if (!s.isolated(a)) continue;
        graph_base.push_back(a);
        base_point.push_back({a, 0, Rational{0}});
    }
    rep.graph_objects = graph_base.size();
    rep.surface_objects = h->vertex_count();

    // (a) objects: phi maps P_G bijectively onto P.
    std::vector<std::size_t> object_map(gsub->vertex_count(), SIZE_MAX);
    bool bijective = graph_base.size() == cut.points.size();
    std::vector<bool> hit(cut.points.size(), false);
    for (std::size_t i = 0; i < graph_base.size(); ++i) {
        const StripPoint z = phi_eval(s, base_point[i]);
        std::optional<std::size_t> match;
        for (std::size_t k = 0; k < cut.points.size(); ++k) {
            if (cut.points[k].point == z) match = k;
        }
        if (!match || hit[*match]) {
            bijective = false;
            rep.witnesses.push_back("objects: basepoint " + gsub->vertices()[graph_base[i]] +
                                    " has no unique image in P");
            continue;
        }
        hit[*match] = true;
        object_map[graph_base[i]] = *match;
    }
    rep.checks["object_bijection"] = bijective;

    // (b) components correspond under the object bijection.
    const auto g_labels = component_labels(*gsub);
    const auto h_labels = component_labels(*h);
    std::map<std::size_t, std::size_t> comp_map;
    std::map<std::size_t, std::size_t> comp_back;
    bool components_ok = bijective;
    for (std::size_t v : graph_base) {
        if (object_map[v] == SIZE_MAX) continue;
        const std::size_t cg = g_labels[v];
        const std::size_t ch = h_labels[object_map[v]];
        const auto [it, fresh] = comp_map.emplace(cg, ch);
        const auto [jt, fresh_back] = comp_back.emplace(ch, cg);
        if (it->second != ch || jt->second != cg) components_ok = false;
    }
    const std::size_t g_count = g_labels.empty() ? 0 : *std::max_element(g_labels.begin(), g_labels.end()) + 1;
    const std::size_t h_count = h_labels.empty() ? 0 : *std::max_element(h_labels.begin(), h_labels.end()) + 1;
    components_ok = components_ok && comp_map.size() == g_count && comp_back.size() == h_count;
    if (!components_ok) rep.witnesses.emplace_back("components: no bijection between components of G and Z");
    rep.checks["component_correspondence"] = components_ok;

    // (c) ranks per component.
    const BasedGroupoid pi_g(gsub, graph_base);
    std::vector<std::size_t> all_h(h->vertex_count());
    std::iota(all_h.begin(), all_h.end(), 0);
    const BasedGroupoid pi_z(h, all_h);
    const Presentation pres_g = presentation(pi_g);
    const Presentation pres_z = presentation(pi_z);
    bool ranks_ok = components_ok && pres_g.components.size() == pres_z.components.size();
    for (std::size_t c = 0; c < pres_g.components.size(); ++c) {
        rep.graph_ranks.push_back(pres_g.components[c].rank);
        if (!components_ok) continue;
        const std::int64_t rz = pres_z.components[comp_map.at(c)].rank;
        rep.surface_ranks.push_back(rz);
        if (rz != pres_g.components[c].rank) {
            ranks_ok = false;
            rep.witnesses.push_back("ranks: component " + std::to_string(c) + " has rank " +
                                    std::to_string(pres_g.components[c].rank) + " in G but " + std::to_string(rz) +
                                    " in Z");
        }
    }
    rep.checks["rank_equality"] = ranks_ok;
    // Subdivision keeps the component order of the atlas graph.
    rep.checks["rank_matches_atlas_graph"] = rep.graph_ranks == rep.atlas_graph_ranks;

    // (d) the generator-level map G_sub -> H.
    GraphMap map;
    map.source = gsub;
    map.target = h;
    map.vertex_map.assign(gsub->vertex_count(), 0);
    for (std::size_t a = 0; a < s.strip_count(); ++a) map.vertex_map[a] = *hg->root[a];
    for (std::size_t v : graph_base) {
        if (object_map[v] != SIZE_MAX) map.vertex_map[v] = object_map[v];
    }
    // Word in H from the root of a strip to cut point k in it.
    auto from_root = [&](std::size_t strip, std::size_t k) {
        const std::size_t root = *hg->root[strip];
        if (k == root || !hg->star_edge[k]) return EdgeWord(h, root);
        return EdgeWord(h, root, {{*hg->star_edge[k], true}});
    };
    map.edge_images.resize(gsub->edge_count(), EdgeWord(h, 0));
    for (std::size_t e = 0; e < s.seam_count(); ++e) {
        const SeamDescriptor& sd = s.seams()[e];
        const std::size_t kd = 2 * e;
        const std::size_t kdp = 2 * e + 1;
        map.edge_images[sub.arcs[e][0]] = from_root(sd.alpha(), kd);
        map.edge_images[sub.arcs[e][1]] = EdgeWord(h, kd, {{hg->seam_edge[e], true}});
        map.edge_images[sub.arcs[e][2]] = inverse(from_root(sd.alpha_prime(), kdp));
    }

    bool functor_ok = bijective;
    bool injective_ok = bijective;
    bool generators_ok = bijective;
    if (bijective) {
        try {
            check_well_formed(map, pi_g, pi_z);
            const std::vector<EdgeWord> words = pi_g.morphisms(max_word_length);
            rep.words_checked = words.size();

            if (auto w = injectivity_witness(map, words)) {
                injective_ok = false;
                rep.witnesses.push_back("injectivity: " + w->first.to_string() + " and " + w->second.to_string() +
                                        " have the same image");
            }

            // Every word splits at each interior basepoint into f . g.
            for (const EdgeWord& w : words) {
                const EdgeWord image = apply(map, w);
                std::size_t v = w.start();
                for (std::size_t k = 0; k + 1 < w.length(); ++k) {
                    v = head(*gsub, w.steps()[k]);
                    if (!pi_g.is_basepoint(v)) continue;
                    const EdgeWord f(gsub, w.start(), {w.steps().begin(), w.steps().begin() + static_cast<long>(k) + 1});
                    const EdgeWord g(gsub, v, {w.steps().begin() + static_cast<long>(k) + 1, w.steps().end()});
                    ++rep.pairs_checked;
                    if (!(compose(apply(map, f), apply(map, g)) == image)) {
                        functor_ok = false;
                        rep.witnesses.push_back("functor: F(" + w.to_string() + ") != F(" + f.to_string() + ").F(" +
                                                g.to_string() + ")");
                    }
                }
            }

            // Random composable pairs, where cancellation happens.
            std::map<std::size_t, std::vector<std::size_t>> by_start;
            for (std::size_t i = 0; i < words.size(); ++i) by_start[words[i].start()].push_back(i);
            std::mt19937 rng(20240917);
            std::vector<std::pair<EdgeWord, EdgeWord>> samples;
            for (int k = 0; k < 256 && !words.empty(); ++k) {
                const EdgeWord& f = words[rng() % words.size()];
                const auto& cands = by_start[f.end()];
                samples.emplace_back(f, words[cands[rng() % cands.size()]]);
            }
            const FunctorReport fr = induced_functor_check(map, pi_g, pi_z, samples);
            rep.pairs_checked += fr.pairs_checked;
            if (!fr.ok()) {
                functor_ok = false;
                for (const std::string& v2 : fr.violations) rep.witnesses.push_back("functor: " + v2);
            }

            // Every generator of H is the image of a word between basepoints.
            auto spoke = [&](std::size_t k) -> DirectedEdge {
                const std::size_t e = cut.points[k].seam;
                return cut.points[k].role == CutPoint::Role::D ? DirectedEdge{sub.arcs[e][0], true}
                                                               : DirectedEdge{sub.arcs[e][2], false};
            };
            auto preimage_vertex = [&](std::size_t k) {
                for (std::size_t v : graph_base) {
                    if (object_map[v] == k) return v;
                }
                return std::size_t{0};
            };
            for (std::size_t e = 0; e < s.seam_count(); ++e) {
                const EdgeWord pre(gsub, preimage_vertex(2 * e), {{sub.arcs[e][1], true}});
                if (!(apply(map, pre) == EdgeWord(h, 2 * e, {{hg->seam_edge[e], true}}))) {
                    generators_ok = false;
                    rep.witnesses.push_back("generators: seam edge " + s.seams()[e].id + " is not hit");
                }
            }
            for (std::size_t k = 0; k < cut.points.size(); ++k) {
                if (!hg->star_edge[k]) continue;
                const std::size_t root = *hg->root[cut.points[k].strip];
                const EdgeWord pre(gsub, preimage_vertex(root), {spoke(root).inverse(), spoke(k)});
                if (!(apply(map, pre) == EdgeWord(h, root, {{*hg->star_edge[k], true}}))) {
                    generators_ok = false;
                    rep.witnesses.push_back("generators: star edge to " + cut.points[k].label + " is not hit");
                }
            }
        } catch (const Error& e) {
            functor_ok = false;
            rep.witnesses.emplace_back(e.what());
        }
    }
    rep.checks["functor"] = functor_ok;
    rep.checks["injective"] = injective_ok;
    rep.checks["generators_hit"] = generators_ok;

    rep.confirmed = std::all_of(rep.checks.begin(), rep.checks.end(), [](const auto& kv) { return kv.second; });
    return rep;
}

NerveResult nerve_oracle(const Surface& s, const CoverPair& cover, const IntersectionReport& inter) {
    NerveResult out;
    for (const CoverElement& e : cover.surface) out.nerve.add_vertex(e.label);
    std::size_t k = 0;
    for (const IntersectionComponent& c : inter.surface_pairs) {
        out.nerve.add_edge("c" + std::to_string(k++), c.first, c.second);
    }

    EdgeMarks marks;
    for (const GraphEdge& e : s.graph().edges()) marks[e.id] = {Rational{0}};
    const Subdivision sub = subdivide_with_map(s.graph(), marks);
    std::vector<std::size_t> vertex_map(cover.surface.size());
    for (std::size_t i = 0; i < cover.surface.size(); ++i) {
        const CoverElement& e = cover.surface[i];
        vertex_map[i] = e.kind == CoverElement::Kind::StripInterior ? e.index : sub.new_vertices[e.index][0];
    }
    out.matches_subdivision = is_isomorphism(out.nerve, sub.graph, vertex_map);
    return out;
}

}  // namespace stripes
