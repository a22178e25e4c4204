// Shared fixtures and independent oracles for the test binaries.
#pragma once

#include <algorithm>
#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stripes/atlas.hpp"
#include "stripes/dsl.hpp"
#include "stripes/groupoid.hpp"
#include "stripes/surface_graph.hpp"

namespace test {

using namespace stripes;

inline std::string data_path(const std::string& name) { return std::string(STRIPES_DATA_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline StripedAtlas parse_or_throw(const std::string& text) {
    ParseResult r = parse(text);
    if (!r.ok()) throw std::runtime_error(format_error(r.errors.front(), "<text>"));
    return *r.atlas;
}

inline StripedAtlas load(const std::string& name) { return parse_or_throw(read_file(data_path(name))); }

inline ExpandedAtlas load_expanded(const std::string& name, std::int64_t window = 0) {
    return expand(load(name), window);
}

inline GraphPtr make_graph(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    auto g = std::make_shared<SurfaceGraph>();
    for (std::size_t v = 0; v < vertices; ++v) g->add_vertex("v" + std::to_string(v));
    for (std::size_t e = 0; e < edges.size(); ++e) g->add_edge("e" + std::to_string(e), edges[e].first, edges[e].second);
    return g;
}

inline GraphPtr cycle_graph(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return make_graph(n, edges);
}

inline GraphPtr random_graph(std::mt19937& rng, std::size_t max_vertices, std::size_t max_edges) {
    const std::size_t v = 1 + rng() % max_vertices;
    const std::size_t e = rng() % (max_edges + 1);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < e; ++i) edges.emplace_back(rng() % v, rng() % v);
    return make_graph(v, edges);
}

// ---------------------------------------------------------------------------
// Oracles

/// Dimension of the GF(2) cycle space of the edges among `vertices`:
/// E minus the GF(2) rank of the vertex-edge incidence matrix.
inline std::int64_t gf2_cycle_rank(const SurfaceGraph& g, const std::vector<std::size_t>& vertices) {
    std::vector<std::size_t> edges;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        if (std::find(vertices.begin(), vertices.end(), g.edges()[e].from) != vertices.end()) edges.push_back(e);
    }
    std::vector<std::vector<int>> rows;
    for (std::size_t v : vertices) {
        std::vector<int> row;
        for (std::size_t e : edges) {
            const GraphEdge& ed = g.edges()[e];
            row.push_back(((ed.from == v) + (ed.to == v)) % 2);
        }
        rows.push_back(row);
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < edges.size() && rank < rows.size(); ++col) {
        std::size_t pivot = rank;
        while (pivot < rows.size() && rows[pivot][col] == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[pivot], rows[rank]);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && rows[r][col] == 1) {
                for (std::size_t c = 0; c < edges.size(); ++c) rows[r][c] ^= rows[rank][c];
            }
        }
        ++rank;
    }
    return static_cast<std::int64_t>(edges.size()) - static_cast<std::int64_t>(rank);
}

/// Number of reduced words of length exactly k from v, by powers of the
/// non-backtracking edge matrix.
inline std::uint64_t nonbacktracking_count(const SurfaceGraph& g, std::size_t v, std::size_t k) {
    if (k == 0) return 1;
    const std::size_t n = 2 * g.edge_count();
    auto tail_of = [&](std::size_t d) { return d % 2 == 0 ? g.edges()[d / 2].from : g.edges()[d / 2].to; };
    auto head_of = [&](std::size_t d) { return d % 2 == 0 ? g.edges()[d / 2].to : g.edges()[d / 2].from; };
    std::vector<std::uint64_t> count(n, 0);
    for (std::size_t d = 0; d < n; ++d) count[d] = tail_of(d) == v ? 1 : 0;
    for (std::size_t step = 1; step < k; ++step) {
        std::vector<std::uint64_t> next(n, 0);
        for (std::size_t d1 = 0; d1 < n; ++d1) {
            if (count[d1] == 0) continue;
            for (std::size_t d2 = 0; d2 < n; ++d2) {
                if (head_of(d1) == tail_of(d2) && d2 != (d1 ^ 1U)) next[d2] += count[d1];
            }
        }
        count = next;
    }
    std::uint64_t total = 0;
    for (std::uint64_t c : count) total += c;
    return total;
}

/// Orientable iff some assignment of +-1 to strips makes every seam sign the
/// product of its two end signs. Exhaustive over all assignments.
inline bool orientable_brute_force(const ExpandedAtlas& a) {
    const std::size_t n = a.strips.size();
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        auto s = [&](std::size_t i) { return (mask >> i) & 1U ? -1 : 1; };
        bool ok = true;
        for (const ExpandedGluing& g : a.gluings) {
            ok = ok && s(g.x.strip) * s(g.y.strip) == seam_sign(g);
        }
        if (ok) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Random atlases

struct RandomAtlasOptions {
    std::size_t max_strips = 8;
    std::size_t max_seams = 12;
    bool families = false;  // interval families and gluing families (not necessarily valid)
};

inline Rational random_rational(std::mt19937& rng, int range = 30) {
    const int q = 1 + static_cast<int>(rng() % 6);
    const int p = static_cast<int>(rng() % (2 * range * q + 1)) - range * q;
    return Rational(p, q);
}

inline std::string random_suffix(std::mt19937& rng) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
    std::string s;
    for (std::size_t i = rng() % 4; i > 0; --i) s += alphabet[rng() % alphabet.size()];
    return s;
}

/// Disjoint intervals in random order; unbounded ends appear at random.
inline std::vector<Interval> random_side(std::mt19937& rng, std::size_t count) {
    std::set<Rational> points;
    while (points.size() < 2 * count) points.insert(random_rational(rng));
    std::vector<Rational> p(points.begin(), points.end());
    std::vector<Interval> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back({p[2 * i], p[2 * i + 1]});
    if (count > 0 && rng() % 3 == 0) out.front().lo = ExtendedRational::neg_inf();
    if (count > 0 && rng() % 3 == 0) out.back().hi = ExtendedRational::pos_inf();
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

inline IntervalFamily random_family(std::mt19937& rng) {
    IntervalFamily f;
    if (rng() % 2 == 0) {
        f.kind = IntervalFamily::Kind::Affine;
        const Rational width(1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 3));
        const Rational step = width * (1 + static_cast<int>(rng() % 3)) * (rng() % 2 ? 1 : -1);
        f.lo_base = random_rational(rng);
        f.hi_base = f.lo_base + width;
        f.lo_coeff = f.hi_coeff = step;
    } else {
        // (p + k/2 r^n, p + k r^n) with 0 < r < 1 and k > 0.
        f.kind = IntervalFamily::Kind::Geometric;
        f.ratio = Rational(1, 2 + static_cast<int>(rng() % 3));
        const Rational k(1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 2));
        f.lo_base = f.hi_base = random_rational(rng);
        f.lo_coeff = k / 2;
        f.hi_coeff = k;
    }
    return f;
}

inline StripedAtlas random_atlas(std::mt19937& rng, const RandomAtlasOptions& opt = {}) {
    const std::size_t n = 1 + rng() % opt.max_strips;
    std::vector<std::string> ids;
    std::set<std::string> used;
    while (ids.size() < n) {
        std::string id = "S" + std::to_string(ids.size()) + random_suffix(rng);
        if (used.insert(id).second) ids.push_back(id);
    }
    // Slots per (strip, side); each seam takes two fresh slots.
    std::vector<std::size_t> slots(2 * n, 0);
    auto slot = [&](std::size_t strip, Side s) -> std::size_t& { return slots[2 * strip + (s == Side::Top ? 0 : 1)]; };
    auto random_side_of = [&] { return rng() % 2 ? Side::Top : Side::Bottom; };

    StripedAtlas a;
    const std::size_t m = rng() % (opt.max_seams + 1);
    for (std::size_t i = 0; i < m; ++i) {
        Gluing g;
        g.id = "g" + std::to_string(i) + random_suffix(rng);
        const std::size_t sx = rng() % n;
        const std::size_t sy = rng() % n;
        const Side x = random_side_of();
        const Side y = random_side_of();
        g.x = {ids[sx], x, ExplicitIndex{slot(sx, x)++}};
        g.y = {ids[sy], y, ExplicitIndex{slot(sy, y)++}};
        g.reversed = rng() % 2 == 0;
        a.gluings[g.id] = g;
    }
    for (std::size_t i = 0; i < n; ++i) {
        ModelStrip s;
        s.id = ids[i];
        for (Side side : {Side::Top, Side::Bottom}) {
            const std::size_t count = slot(i, side) + (rng() % 4 == 0 ? 1 : 0);
            s.side(side).intervals = random_side(rng, count);
            if (opt.families && rng() % 3 == 0) s.side(side).families.push_back(random_family(rng));
        }
        a.strips[s.id] = s;
    }
    if (opt.families) {
        const std::vector<std::string> vars = {"n", "m", "k"};
        for (std::size_t i = 0, count = rng() % 3; i < count; ++i) {
            std::vector<std::pair<std::string, Side>> fam_sides;
            for (const auto& [id, s] : a.strips) {
                for (Side side : {Side::Top, Side::Bottom}) {
                    if (!s.side(side).families.empty()) fam_sides.emplace_back(id, side);
                }
            }
            if (fam_sides.empty()) break;
            Gluing g;
            g.id = "f" + std::to_string(i) + random_suffix(rng);
            g.family_variable = vars[rng() % vars.size()];
            const auto& [xs, xside] = fam_sides[rng() % fam_sides.size()];
            const auto& [ys, yside] = fam_sides[rng() % fam_sides.size()];
            g.x = {xs, xside, FamilyMember{0, IndexExpr{true, static_cast<std::int64_t>(rng() % 5) - 2}}};
            g.y = {ys, yside, FamilyMember{0, IndexExpr{rng() % 4 != 0, static_cast<std::int64_t>(rng() % 5) - 2}}};
            g.reversed = rng() % 2 == 0;
            a.gluings[g.id] = g;
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// Malformed inputs with the position and message fragment of the first error

struct MalformedCase {
    const char* text;
    std::size_t line;
    std::size_t column;
    const char* fragment;
};

inline const std::vector<MalformedCase>& malformed_corpus() {
    static const std::vector<MalformedCase> cases = {
        {"strip A { top: (1,0); }", 1, 16, "lower endpoint must be less"},
        {"strip { }", 1, 7, "expected identifier"},
        {"strip A { left: none; }", 1, 11, "expected 'top'"},
        {"strip A { top: (0 1); }", 1, 19, "expected ','"},
        {"strip A { top: none; top: none; }", 1, 22, "declared twice"},
        {"glue s: A.top[0] ~ B.top[0];", 1, 1, "missing strip 'A'"},
        {"strip A { top: (0, 1); }\nglue s A.top[0] ~ A.top[0];", 2, 8, "expected ':'"},
        {"strip A { top: (0, 1/0); }", 1, 22, "zero denominator"},
        {"strip A { top: (0, 1); } strip A { }", 1, 32, "duplicate strip id"},
        {"family n in Z { strip B { } }", 1, 17, "may not be declared inside a family"},
        {"family n in Q { }", 1, 13, "expected 'Z'"},
        {"strip A { top: (n, n+1); }\nglue s: A.top[n] ~ A.top[0];", 2, 15, "used outside a family"},
        {"strip A { top: (0, 1); }\nfamily n in Z { glue s: A.top[m] ~ A.top[0]; }", 2, 31, "unknown variable 'm'"},
        {"strip A { top: (n, 2*(1/2)^n); }", 1, 16, "may not be mixed"},
        {"strip A { top: ((1/2)^n, (1/3)^n); }", 1, 16, "same ratio"},
        {"strip A { top: (0, 1); } @", 1, 26, "invalid character"},
        {"strip A { top: (0, 1); ", 1, 23, "found end of input"},
        {"strip A { top: (+inf, 0); }", 1, 16, "lower endpoint must be less"},
        {"strip A { top: (0, 1); }\nglue s: A.top[0] ~ A.top[0] flipped;", 2, 29, "expected 'reversed' or ';'"},
        {"strip A { top: (n, n + 2); }", 1, 16, "members overlap"},
        {"strip A { top: (0, 1); }\nglue s: A.top[99999999999999] ~ A.top[0];", 2, 15, "out of range"},
        {"strip A { top: (0, (2)^n); }", 1, 20, "0 < |r| < 1"},
    };
    return cases;
}

}  // namespace test
