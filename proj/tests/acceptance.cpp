// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "stripes/error.hpp"
#include "stripes/foliation.hpp"
#include "stripes/vankampen.hpp"
#include "support.hpp"

using namespace stripes;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    std::vector<std::string> failures;
    std::string detail;

    void expect(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

std::string fmt_seconds(double s) {
    std::ostringstream o;
    o.precision(3);
    o << s << " s";
    return o.str();
}

std::string ranks_text(const std::vector<std::int64_t>& r) {
    std::string s = "[";
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? ", " : "") + std::to_string(r[i]);
    return s + "]";
}

// Pipeline pieces shared by criteria 1 to 4.
struct Pipeline {
    Surface s;
    CoverPair cover;
    CutSet cut;
    IntersectionReport inter;

    explicit Pipeline(const ExpandedAtlas& e)
        : s(e), cover(build_cover(s)), cut(choose_cut_set(s)), inter(intersections(s, cover, cut)) {}
};

// Counts cut points lying in both members of each intersecting pair by direct
// membership tests and compares with the number of reported components: with
// one cut point per component the two counts agree.
void expect_one_cut_point_per_component(Outcome& out, const Pipeline& p, const std::string& name) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> z_components, g_components;
    for (const auto& c : p.inter.surface_pairs) {
        ++z_components[{c.first, c.second}];
        out.expect(c.cut_points.size() == 1, name + ": component " + c.description + " holds " +
                                                 std::to_string(c.cut_points.size()) + " cut points");
    }
    for (const auto& c : p.inter.graph_pairs) {
        ++g_components[{c.first, c.second}];
        out.expect(c.cut_points.size() == 1, name + ": graph component " + c.description + " holds " +
                                                 std::to_string(c.cut_points.size()) + " cut points");
    }
    for (const auto& [pair, count] : z_components) {
        std::size_t inside = 0;
        for (const CutPoint& q : p.cut.points) {
            inside += contains(p.s, p.cover.surface[pair.first], q.point) &&
                      contains(p.s, p.cover.surface[pair.second], q.point);
        }
        out.expect(inside == count, name + ": " + p.cover.surface[pair.first].label + " meets " +
                                        p.cover.surface[pair.second].label + " in " + std::to_string(count) +
                                        " components but holds " + std::to_string(inside) + " cut points");
    }
    for (const auto& [pair, count] : g_components) {
        std::size_t inside = 0;
        for (const CutPoint& q : p.cut.points) {
            const GraphPoint x = cut_preimage(q);
            inside += contains(p.s, p.cover.graph[pair.first], x) && contains(p.s, p.cover.graph[pair.second], x);
        }
        out.expect(inside == count, name + ": graph pair " + p.cover.graph[pair.first].label + ", " +
                                        p.cover.graph[pair.second].label + " count mismatch");
    }
}

void expect_verified(Outcome& out, const VerificationReport& v, const std::string& name) {
    out.expect(v.confirmed, name + ": verification failed" +
                                (v.witnesses.empty() ? std::string() : " (" + v.witnesses.front() + ")"));
}

void expect_certificate(Outcome& out, const ExpandedAtlas& e, const std::string& name) {
    const SingularReport r = singular_report(e);
    out.expect(r.certificate.locally_finite, name + ": local finiteness certificate failed");
}

// ---------------------------------------------------------------------------

Outcome saddle() {
    Outcome out;
    const auto t0 = Clock::now();
    const ExpandedAtlas e = test::load_expanded("atlas-xy.stripe");
    const SurfaceGraph g = build_graph(e);
    out.expect(isomorphic(g, *test::cycle_graph(4)).has_value(), "graph is not a 4-cycle");
    const GraphInvariants inv = graph_invariants(g);
    out.expect(inv.total_rank == 1, "rank " + std::to_string(inv.total_rank));
    const VerificationReport v = verify_phi_iso(e);
    expect_verified(out, v, "xy");
    out.expect(v.graph_objects == 8 && v.surface_objects == 8,
               "objects " + std::to_string(v.graph_objects) + "/" + std::to_string(v.surface_objects));
    out.expect(v.graph_ranks == std::vector<std::int64_t>{1} && v.surface_ranks == std::vector<std::int64_t>{1},
               "ranks " + ranks_text(v.graph_ranks) + " vs " + ranks_text(v.surface_ranks));
    const double t = seconds_since(t0);
    out.expect(t < 1.0, "took " + fmt_seconds(t));
    out.detail = "4-cycle, rank 1, 8 objects, ranks [1]/[1], " + fmt_seconds(t);
    return out;
}

Outcome ladder() {
    Outcome out;
    double slowest = 0;
    for (std::int64_t w = 1; w <= 5; ++w) {
        const auto t0 = Clock::now();
        const ExpandedAtlas e = test::load_expanded("atlas-ladder.stripe", w);
        const std::string name = "W=" + std::to_string(w);
        const SurfaceGraph g = build_graph(e);
        // Two strips joined by one edge per family member.
        out.expect(g.vertex_count() == 2, name + ": vertices " + std::to_string(g.vertex_count()));
        out.expect(g.edge_count() == static_cast<std::size_t>(2 * w), name + ": edges " + std::to_string(g.edge_count()));
        const std::int64_t expected_rank =
            static_cast<std::int64_t>(g.edge_count()) - static_cast<std::int64_t>(g.vertex_count()) + 1;
        out.expect(expected_rank == 2 * w - 1, name + ": E-V+1 = " + std::to_string(expected_rank));
        out.expect(graph_invariants(g).total_rank == expected_rank, name + ": rank mismatch");
        out.expect(test::gf2_cycle_rank(g, {0, 1}) == expected_rank, name + ": cycle space dimension mismatch");
        const VerificationReport v = verify_phi_iso(e);
        expect_verified(out, v, name);
        out.expect(v.surface_ranks == std::vector<std::int64_t>{expected_rank}, name + ": surface ranks " +
                                                                                    ranks_text(v.surface_ranks));
        const double t = seconds_since(t0);
        slowest = std::max(slowest, t);
        out.expect(t < 1.0, name + ": took " + fmt_seconds(t));
    }
    out.detail = "W=1..5: edges 2W, rank 2W-1, verified; slowest " + fmt_seconds(slowest);
    return out;
}

Outcome small_cases() {
    Outcome out;
    {
        const ExpandedAtlas e = test::load_expanded("atlas-plane.stripe");
        out.expect(graph_invariants(build_graph(e)).total_rank == 0, "plane: rank");
        const Pipeline p(e);
        const CoverGraph h = cover_graph(p.s, p.cut, p.inter);
        out.expect(h.graph.vertices() == std::vector<std::string>{"o[A]"}, "plane: objects are not {o[A]}");
        const BasedGroupoid pi(std::make_shared<SurfaceGraph>(h.graph), {0});
        out.expect(pi.morphisms(8).size() == 1, "plane: groupoid is not trivial");
        expect_verified(out, verify_phi_iso(e), "plane");
    }
    for (const auto& [file, orient] : {std::pair{"atlas-annulus.stripe", true}, {"atlas-mobius.stripe", false}}) {
        const ExpandedAtlas e = test::load_expanded(file);
        out.expect(graph_invariants(build_graph(e)).total_rank == 1, std::string(file) + ": rank");
        out.expect(orientable(e) == orient, std::string(file) + ": orientability");
        out.expect(test::orientable_brute_force(e) == orient, std::string(file) + ": sign assignment search disagrees");
        expect_verified(out, verify_phi_iso(e), file);
    }
    out.detail = "plane rank 0 over {o[A]}, annulus rank 1 orientable, mobius rank 1 non-orientable";
    return out;
}

struct RandomStats {
    std::size_t loops = 0;
    std::size_t parallel = 0;
    std::size_t reversed = 0;
};

RandomStats shape_of(const ExpandedAtlas& e) {
    RandomStats s;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    bool has_loop = false, has_parallel = false, has_reversed = false;
    for (const ExpandedGluing& g : e.gluings) {
        const auto a = g.x.strip, b = g.y.strip;
        has_loop = has_loop || a == b;
        has_parallel = has_parallel || !seen.insert({std::min(a, b), std::max(a, b)}).second;
        has_reversed = has_reversed || g.reversed;
    }
    s.loops = has_loop;
    s.parallel = has_parallel;
    s.reversed = has_reversed;
    return s;
}

std::vector<ExpandedAtlas> random_corpus() {
    std::mt19937 rng(500);
    std::vector<ExpandedAtlas> atlases;
    for (int i = 0; i < 500; ++i) atlases.push_back(expand(test::random_atlas(rng, {8, 12, false}), 0));
    return atlases;
}

Outcome random_van_kampen(const std::vector<ExpandedAtlas>& atlases) {
    Outcome out;
    const auto t0 = Clock::now();
    RandomStats seen;
    std::size_t seams = 0;
    for (std::size_t i = 0; i < atlases.size(); ++i) {
        const ExpandedAtlas& e = atlases[i];
        const std::string name = "atlas " + std::to_string(i);
        const RandomStats s = shape_of(e);
        seen.loops += s.loops;
        seen.parallel += s.parallel;
        seen.reversed += s.reversed;
        seams += e.gluings.size();
        try {
            const Pipeline p(e);
            const ConditionReport c = check_conditions(p.s, p.cover, p.cut, p.inter);
            out.expect(c.ok(), name + ": conditions" + (c.failures.empty() ? "" : " (" + c.failures.front() + ")"));
            expect_one_cut_point_per_component(out, p, name);
            const CoverGraph h = cover_graph(p.s, p.cut, p.inter);
            out.expect(graph_invariants(h.graph).euler == graph_invariants(p.s.graph()).euler, name + ": euler");
            out.expect(nerve_oracle(p.s, p.cover, p.inter).matches_subdivision, name + ": nerve");
            const VerificationReport v = verify_phi_iso(e, 8);
            expect_verified(out, v, name);
            out.expect(v.checks.count("functor") && v.checks.at("functor"), name + ": functor check");
        } catch (const std::exception& ex) {
            out.failures.push_back(name + ": " + ex.what());
        }
    }
    const double t = seconds_since(t0);
    out.expect(t < 60.0, "took " + fmt_seconds(t));
    out.detail = std::to_string(atlases.size()) + " atlases, " + std::to_string(seams) + " seams (" +
                 std::to_string(seen.loops) + " with loops, " + std::to_string(seen.parallel) + " with parallel seams, " +
                 std::to_string(seen.reversed) + " with reversals), " + fmt_seconds(t);
    return out;
}

// ---------------------------------------------------------------------------

// Free reduction by a stack, independent of the library.
std::vector<DirectedEdge> stack_reduce(const std::vector<DirectedEdge>& steps) {
    std::vector<DirectedEdge> out;
    for (const DirectedEdge& d : steps) {
        if (!out.empty() && out.back() == d.inverse()) {
            out.pop_back();
        } else {
            out.push_back(d);
        }
    }
    return out;
}

std::vector<DirectedEdge> leaving(const SurfaceGraph& g, std::size_t v) {
    std::vector<DirectedEdge> out;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        if (g.edges()[e].from == v) out.push_back({e, true});
        if (g.edges()[e].to == v) out.push_back({e, false});
    }
    return out;
}

// Every walk of length <= max_length from every vertex: the normal form agrees
// with the stack oracle, and cancelling any single adjacent pair first leads
// to the same normal form. Since every reduction step shortens the word, this
// covers every reduction order of every such word.
std::size_t exhaustive_confluence(Outcome& out, const GraphPtr& g, std::size_t max_length, const std::string& name) {
    std::size_t words = 0;
    std::vector<DirectedEdge> steps;
    std::vector<std::vector<DirectedEdge>> out_edges;
    for (std::size_t v = 0; v < g->vertex_count(); ++v) out_edges.push_back(leaving(*g, v));
    std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t start, std::size_t at) {
        ++words;
        const EdgeWord w(g, start, steps);
        const EdgeWord r = reduce(w);
        if (r.steps() != stack_reduce(steps) || !r.is_reduced()) {
            out.failures.push_back(name + ": normal form of " + w.to_string());
        }
        for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
            if (steps[i + 1] != steps[i].inverse()) continue;
            std::vector<DirectedEdge> shorter = steps;
            shorter.erase(shorter.begin() + static_cast<long>(i), shorter.begin() + static_cast<long>(i) + 2);
            if (!(reduce(EdgeWord(g, start, shorter)) == r)) {
                out.failures.push_back(name + ": order dependence at " + w.to_string());
            }
        }
        if (steps.size() == max_length || out.failures.size() > 20) return;
        for (const DirectedEdge& d : out_edges[at]) {
            steps.push_back(d);
            walk(start, head(*g, d));
            steps.pop_back();
        }
    };
    for (std::size_t v = 0; v < g->vertex_count(); ++v) walk(v, v);
    return words;
}

EdgeWord random_walk(const GraphPtr& g, std::size_t start, std::size_t length, std::mt19937& rng) {
    std::vector<DirectedEdge> steps;
    std::size_t v = start;
    for (std::size_t i = 0; i < length; ++i) {
        const std::vector<DirectedEdge> options = leaving(*g, v);
        if (options.empty()) break;
        steps.push_back(options[rng() % options.size()]);
        v = head(*g, steps.back());
    }
    return EdgeWord(g, start, steps);
}

GraphPtr random_tree(std::mt19937& rng, std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t v = 1; v < n; ++v) {
        const std::size_t parent = rng() % v;
        edges.push_back(rng() % 2 ? std::pair{parent, v} : std::pair{v, parent});
    }
    return test::make_graph(n, edges);
}

Outcome groupoid_laws() {
    Outcome out;
    // Walk counts grow with the branching of each graph; this battery keeps
    // the exhaustive pass to a few million words.
    const std::vector<std::pair<std::string, GraphPtr>> battery = {
        {"single loop", test::make_graph(1, {{0, 0}})},
        {"two loops", test::make_graph(1, {{0, 0}, {0, 0}})},
        {"segment", test::make_graph(2, {{0, 1}})},
        {"theta", test::make_graph(2, {{0, 1}, {0, 1}, {1, 0}})},
        {"loops and parallels", test::make_graph(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}})},
        {"hexagon", test::cycle_graph(6)},
        {"K4", test::make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})},
        {"tree", test::make_graph(6, {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {3, 5}})},
        {"triangle with tails", test::make_graph(6, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 4}, {2, 5}})},
    };
    std::size_t words = 0;
    for (const auto& [name, g] : battery) words += exhaustive_confluence(out, g, 10, name);

    std::mt19937 rng(5);
    for (int i = 0; i < 10000; ++i) {
        const GraphPtr g = test::random_graph(rng, 5, 6);
        const EdgeWord f = reduce(random_walk(g, rng() % g->vertex_count(), rng() % 9, rng));
        const EdgeWord h = reduce(random_walk(g, f.end(), rng() % 9, rng));
        const EdgeWord k = reduce(random_walk(g, h.end(), rng() % 9, rng));
        const std::string at = "triple " + std::to_string(i) + " (" + f.to_string() + " | " + h.to_string() + " | " +
                               k.to_string() + ")";
        out.expect(compose(compose(f, h), k) == compose(f, compose(h, k)), at + ": associativity");
        out.expect(compose(identity(g, f.start()), f) == f && compose(f, identity(g, f.end())) == f, at + ": units");
        out.expect(compose(f, inverse(f)) == identity(g, f.start()) && compose(inverse(f), f) == identity(g, f.end()),
                   at + ": inverses");
    }

    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 1 + rng() % 7;
        const GraphPtr tree = random_tree(rng, n);
        std::vector<std::size_t> all(n);
        for (std::size_t v = 0; v < n; ++v) all[v] = v;
        const BasedGroupoid pi(tree, all);
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = 0; q < n; ++q) {
                out.expect(pi.hom(p, q, 2 * n).size() == 1, "tree " + std::to_string(i) + ": hom set size");
            }
        }
    }

    // On a cycle of two edges the generating loop has length 2, so words of
    // length <= 2k are exactly the powers -k..k.
    const BasedGroupoid digon(test::make_graph(2, {{0, 1}, {1, 0}}), {0});
    for (std::size_t k = 0; k <= 5; ++k) {
        out.expect(digon.hom(0, 0, 2 * k).size() == 2 * k + 1, "loop powers at k = " + std::to_string(k));
    }
    out.detail = std::to_string(words) + " words exhaustively, 10000 triples, 200 trees, loop powers k <= 5";
    return out;
}

// ---------------------------------------------------------------------------

Outcome certificates(const std::vector<ExpandedAtlas>& random_atlases) {
    Outcome out;
    std::size_t certified = 0;
    for (const char* f : {"atlas-xy.stripe", "atlas-plane.stripe", "atlas-annulus.stripe", "atlas-mobius.stripe"}) {
        expect_certificate(out, test::load_expanded(f), f);
        ++certified;
    }
    for (std::int64_t w = 1; w <= 5; ++w) {
        expect_certificate(out, test::load_expanded("atlas-ladder.stripe", w), "ladder W=" + std::to_string(w));
        ++certified;
    }
    for (std::size_t i = 0; i < random_atlases.size(); ++i) {
        expect_certificate(out, random_atlases[i], "random atlas " + std::to_string(i));
        ++certified;
    }

    const SingularReport geo = singular_report(test::load_expanded("geometric-accumulation.stripe", 2));
    out.expect(!geo.certificate.locally_finite, "geometric accumulation: certificate succeeded");
    const bool at_zero = geo.certificate.points.size() == 1 && geo.certificate.points[0].point == 0 &&
                         geo.certificate.points[0].inside.has_value();
    out.expect(at_zero, "geometric accumulation: point 0 not reported");
    out.detail = std::to_string(certified) + " atlases certified; counterexample rejected" +
                 (at_zero ? " at " + to_string(geo.certificate.points[0].point) : std::string());
    return out;
}

// ---------------------------------------------------------------------------

Outcome parser() {
    Outcome out;
    const std::vector<std::string> corpus = {"atlas-xy.stripe",     "atlas-plane.stripe",  "atlas-annulus.stripe",
                                             "atlas-mobius.stripe", "atlas-ladder.stripe", "broken.stripe",
                                             "geometric-accumulation.stripe"};
    auto round_trip = [&](const StripedAtlas& a, const std::string& name) {
        const std::string text = serialize(a);
        const ParseResult back = parse(text);
        out.expect(back.ok() && *back.atlas == a && serialize(*back.atlas) == text, name + ": round trip");
    };
    for (const std::string& f : corpus) round_trip(test::load(f), f);
    std::mt19937 rng(7);
    for (int i = 0; i < 1000; ++i) round_trip(test::random_atlas(rng, {8, 12, true}), "random " + std::to_string(i));

    std::size_t positioned = 0;
    for (const test::MalformedCase& c : test::malformed_corpus()) {
        const ParseResult r = parse(c.text);
        const bool ok = !r.ok() && r.errors[0].span.line == c.line && r.errors[0].span.column == c.column &&
                        r.errors[0].message.find(c.fragment) != std::string::npos;
        out.expect(ok, std::string("malformed: ") + c.text);
        positioned += ok;
    }
    out.expect(test::malformed_corpus().size() >= 20, "malformed corpus too small");

    const std::string seed = serialize(test::load("atlas-ladder.stripe"));
    for (int i = 0; i < 10000; ++i) {
        std::string text;
        if (i % 2 == 0) {
            for (std::size_t k = rng() % 120; k > 0; --k) text += static_cast<char>(rng() % 256);
        } else {
            text = seed;
            for (int k = 0; k < 1 + static_cast<int>(rng() % 6); ++k) text[rng() % text.size()] = static_cast<char>(rng() % 256);
        }
        try {
            const ParseResult r = parse(text);
            bool spans = r.ok() == r.errors.empty();
            for (const ParseError& e : r.errors) spans = spans && e.span.line >= 1 && e.span.column >= 1;
            out.expect(spans, "fuzz case " + std::to_string(i) + ": bad error spans");
        } catch (const std::exception& ex) {
            out.failures.push_back("fuzz case " + std::to_string(i) + ": threw " + ex.what());
        }
    }
    out.detail = std::to_string(corpus.size()) + " corpus files and 1000 random atlases round trip, " +
                 std::to_string(positioned) + " malformed inputs positioned, 10000 fuzz inputs";
    return out;
}

}  // namespace

int main() {
    int failed = 0;
    auto report = [&](int number, const std::string& title, const std::function<Outcome()>& run) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& ex) {
            o.failures.push_back(std::string("exception: ") + ex.what());
        }
        const bool pass = o.failures.empty();
        failed += !pass;
        std::cout << "criterion " << number << ": " << (pass ? "PASS" : "FAIL") << "  " << title;
        if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
        std::cout << "\n";
        for (std::size_t i = 0; i < o.failures.size() && i < 10; ++i) std::cout << "    " << o.failures[i] << "\n";
        if (o.failures.size() > 10) std::cout << "    ... " << o.failures.size() - 10 << " more\n";
        std::cout.flush();
    };

    const std::vector<ExpandedAtlas> atlases = random_corpus();
    report(1, "saddle atlas", saddle);
    report(2, "ladder atlas windows", ladder);
    report(3, "plane, annulus and mobius band", small_cases);
    report(4, "randomized van Kampen suite", [&] { return random_van_kampen(atlases); });
    report(5, "groupoid laws", groupoid_laws);
    report(6, "local finiteness certificate", [&] { return certificates(atlases); });
    report(7, "parser round trip, errors and fuzz", parser);
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
    return failed == 0 ? 0 : 1;
}
