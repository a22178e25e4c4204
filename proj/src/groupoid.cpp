#include "stripes/groupoid.hpp"

#include <algorithm>
#include <iomanip>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>

#include "stripes/error.hpp"

namespace stripes {

std::size_t tail(const SurfaceGraph& g, DirectedEdge d) {
    const GraphEdge& e = g.edges()[d.edge];
    return d.forward ? e.from : e.to;
}

std::size_t head(const SurfaceGraph& g, DirectedEdge d) {
    const GraphEdge& e = g.edges()[d.edge];
    return d.forward ? e.to : e.from;
}

EdgeWord::EdgeWord(GraphPtr graph, std::size_t start, std::vector<DirectedEdge> steps)
    : graph_(std::move(graph)), start_(start), end_(start), steps_(std::move(steps)) {
    if (!graph_) throw MalformedWord("word has no ambient graph");
    if (start_ >= graph_->vertex_count()) throw MalformedWord("start vertex out of range");
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        const DirectedEdge d = steps_[i];
        if (d.edge >= graph_->edge_count()) throw MalformedWord("step " + std::to_string(i) + " names no edge");
        if (tail(*graph_, d) != end_) {
            throw MalformedWord("step " + std::to_string(i) + " (" + graph_->edges()[d.edge].id +
                                ") does not start where the previous step ends");
        }
        end_ = head(*graph_, d);
    }
}

bool EdgeWord::is_reduced() const {
    for (std::size_t i = 1; i < steps_.size(); ++i) {
        if (steps_[i] == steps_[i - 1].inverse()) return false;
    }
    return true;
}

std::string EdgeWord::to_string() const {
    if (steps_.empty()) return "id(" + graph_->vertices()[start_] + ")";
    std::string s;
    for (const DirectedEdge& d : steps_) {
        if (!s.empty()) s += ' ';
        s += graph_->edges()[d.edge].id;
        if (!d.forward) s += "^-1";
    }
    return s;
}

std::size_t EdgeWordHash::operator()(const EdgeWord& w) const {
    std::size_t h = std::hash<std::size_t>{}(w.start()) ^ std::hash<const void*>{}(w.graph().get());
    for (const DirectedEdge& d : w.steps()) {
        h ^= (d.edge * 2 + (d.forward ? 1 : 0)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

namespace {

// Appends d to a reduced word, cancelling it against the last step.
void push_reduced(std::vector<DirectedEdge>& out, DirectedEdge d) {
    if (!out.empty() && out.back() == d.inverse()) {
        out.pop_back();
    } else {
        out.push_back(d);
    }
}

}  // namespace

EdgeWord reduce(const EdgeWord& w) {
    std::vector<DirectedEdge> out;
    out.reserve(w.length());
    for (const DirectedEdge& d : w.steps()) push_reduced(out, d);
    return EdgeWord(w.graph(), w.start(), std::move(out));
}

EdgeWord compose(const EdgeWord& f, const EdgeWord& g) {
    if (f.graph() != g.graph()) throw EndpointMismatch("words live in different graphs");
    if (f.end() != g.start()) {
        throw EndpointMismatch(f.to_string() + " ends at " + f.graph()->vertices()[f.end()] + " but " +
                               g.to_string() + " starts at " + g.graph()->vertices()[g.start()]);
    }
    std::vector<DirectedEdge> steps;
    steps.reserve(f.length() + g.length());
    for (const DirectedEdge& d : f.steps()) push_reduced(steps, d);
    for (const DirectedEdge& d : g.steps()) push_reduced(steps, d);
    return EdgeWord(f.graph(), f.start(), std::move(steps));
}

EdgeWord inverse(const EdgeWord& f) {
    std::vector<DirectedEdge> steps;
    steps.reserve(f.length());
    for (auto it = f.steps().rbegin(); it != f.steps().rend(); ++it) steps.push_back(it->inverse());
    return EdgeWord(f.graph(), f.end(), std::move(steps));
}

EdgeWord identity(const GraphPtr& graph, std::size_t vertex) { return EdgeWord(graph, vertex); }

std::pair<std::size_t, std::size_t> ends(const EdgeWord& m) { return {m.start(), m.end()}; }

// ---------------------------------------------------------------------------

BasedGroupoid::BasedGroupoid(GraphPtr graph, std::vector<std::size_t> basepoints)
    : graph_(std::move(graph)), basepoints_(std::move(basepoints)) {
    std::sort(basepoints_.begin(), basepoints_.end());
    basepoints_.erase(std::unique(basepoints_.begin(), basepoints_.end()), basepoints_.end());
    is_base_.assign(graph_->vertex_count(), false);
    for (std::size_t p : basepoints_) {
        if (p >= graph_->vertex_count()) throw BadParameter("basepoint out of range");
        is_base_[p] = true;
    }
    const auto labels = component_labels(*graph_);
    std::vector<bool> met(labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1, false);
    for (std::size_t p : basepoints_) met[labels[p]] = true;
    for (std::size_t v = 0; v < labels.size(); ++v) {
        if (!met[labels[v]]) {
            throw BasepointsMissComponent("no basepoint in the component of vertex '" + graph_->vertices()[v] + "'");
        }
    }
}

bool BasedGroupoid::is_basepoint(std::size_t v) const { return v < is_base_.size() && is_base_[v]; }

bool BasedGroupoid::contains(const EdgeWord& w) const {
    return w.graph() == graph_ && w.is_reduced() && is_basepoint(w.start()) && is_basepoint(w.end());
}

void for_each_reduced_word(const GraphPtr& graph, std::size_t start, std::size_t max_length,
                           const std::function<void(const EdgeWord&)>& visit) {
    const auto inc = graph->incidence();
    // Outgoing traversals per vertex.
    std::vector<std::vector<DirectedEdge>> out(graph->vertex_count());
    for (std::size_t v = 0; v < graph->vertex_count(); ++v) {
        for (std::size_t e : inc[v]) {
            const GraphEdge& edge = graph->edges()[e];
            if (edge.from == v) out[v].push_back({e, true});
            if (edge.to == v) out[v].push_back({e, false});
        }
    }
    std::vector<DirectedEdge> steps;
    auto rec = [&](auto&& self, std::size_t v) -> void {
        visit(EdgeWord(graph, start, steps));
        if (steps.size() == max_length) return;
        for (const DirectedEdge& d : out[v]) {
            if (!steps.empty() && steps.back() == d.inverse()) continue;
            steps.push_back(d);
            self(self, head(*graph, d));
            steps.pop_back();
        }
    };
    rec(rec, start);
}

std::vector<EdgeWord> BasedGroupoid::hom(std::size_t p, std::size_t q, std::size_t max_length) const {
    if (!is_basepoint(p) || !is_basepoint(q)) throw BadParameter("hom endpoints must be basepoints");
    std::vector<EdgeWord> out;
    for_each_reduced_word(graph_, p, max_length, [&](const EdgeWord& w) {
        if (w.end() == q) out.push_back(w);
    });
    return out;
}

std::vector<EdgeWord> BasedGroupoid::morphisms(std::size_t max_length) const {
    std::vector<EdgeWord> out;
    for (std::size_t p : basepoints_) {
        for_each_reduced_word(graph_, p, max_length, [&](const EdgeWord& w) {
            if (is_base_[w.end()]) out.push_back(w);
        });
    }
    return out;
}

// ---------------------------------------------------------------------------

Presentation presentation(const BasedGroupoid& bg) {
    const SurfaceGraph& g = *bg.graph();
    const auto inc = g.incidence();
    const auto labels = component_labels(g);
    const std::size_t count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;

    Presentation pres;
    pres.components.resize(count);
    for (std::size_t v = 0; v < g.vertex_count(); ++v) pres.components[labels[v]].vertices.push_back(v);
    for (std::size_t p : bg.basepoints()) pres.components[labels[p]].basepoints.push_back(p);

    std::vector<bool> seen(g.vertex_count(), false);
    std::vector<bool> in_forest(g.edge_count(), false);
    for (ComponentPresentation& c : pres.components) {
        const std::size_t root = c.vertices.front();
        std::queue<std::size_t> queue;
        queue.push(root);
        seen[root] = true;
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop();
            for (std::size_t e : inc[u]) {
                const GraphEdge& edge = g.edges()[e];
                const std::size_t w = edge.from == u ? edge.to : edge.from;
                if (seen[w]) continue;
                seen[w] = true;
                in_forest[e] = true;
                queue.push(w);
            }
        }
    }
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        ComponentPresentation& c = pres.components[labels[g.edges()[e].from]];
        (in_forest[e] ? c.forest_edges : c.generators).push_back(e);
    }
    std::uint64_t digest = 0xcbf29ce484222325ULL;  // FNV-1a
    for (ComponentPresentation& c : pres.components) {
        c.rank = static_cast<std::int64_t>(c.generators.size());
        for (std::size_t e : c.forest_edges) {
            for (char ch : g.edges()[e].id + ";") {
                digest ^= static_cast<unsigned char>(ch);
                digest *= 0x100000001b3ULL;
            }
        }
        digest ^= '|';
        digest *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << "bfs-" << std::hex << std::setw(16) << std::setfill('0') << digest;
    pres.forest_id = os.str();
    return pres;
}

// ---------------------------------------------------------------------------

Coproduct coproduct(const std::vector<BasedGroupoid>& summands) {
    auto graph = std::make_shared<SurfaceGraph>();
    std::vector<std::size_t> vertex_offset;
    std::vector<std::size_t> edge_offset;
    std::vector<std::size_t> summand_of_vertex;
    std::vector<std::size_t> basepoints;
    for (std::size_t s = 0; s < summands.size(); ++s) {
        const SurfaceGraph& g = *summands[s].graph();
        vertex_offset.push_back(graph->vertex_count());
        edge_offset.push_back(graph->edge_count());
        for (const std::string& v : g.vertices()) {
            if (graph->vertex_index(v)) throw IdCollision("vertex '" + v + "' appears in two summands");
            graph->add_vertex(v);
            summand_of_vertex.push_back(s);
        }
        for (const GraphEdge& e : g.edges()) {
            if (graph->edge_index(e.id)) throw IdCollision("edge '" + e.id + "' appears in two summands");
            graph->add_edge(e.id, e.from + vertex_offset.back(), e.to + vertex_offset.back());
        }
        for (std::size_t p : summands[s].basepoints()) basepoints.push_back(p + vertex_offset.back());
    }
    return {BasedGroupoid(std::move(graph), std::move(basepoints)), std::move(vertex_offset),
            std::move(edge_offset), std::move(summand_of_vertex)};
}

// ---------------------------------------------------------------------------

PairGroupoid::PairGroupoid(std::vector<std::size_t> objects) : objects_(std::move(objects)) {
    std::sort(objects_.begin(), objects_.end());
    objects_.erase(std::unique(objects_.begin(), objects_.end()), objects_.end());
}

bool PairGroupoid::has_object(std::size_t o) const {
    return std::binary_search(objects_.begin(), objects_.end(), o);
}

PairGroupoid::Morphism PairGroupoid::morphism(std::size_t source, std::size_t target) const {
    if (!has_object(source) || !has_object(target)) throw BadParameter("not an object of the pair groupoid");
    return {source, target};
}

PairGroupoid::Morphism PairGroupoid::compose(const Morphism& f, const Morphism& g) const {
    if (f.target != g.source) throw EndpointMismatch("pair morphisms are not composable");
    return {f.source, g.target};
}

PairGroupoid::Morphism project_ends(const PairGroupoid& pairs, const EdgeWord& m) {
    const auto [s, t] = ends(m);
    return pairs.morphism(s, t);
}

// ---------------------------------------------------------------------------

void check_well_formed(const GraphMap& map, const BasedGroupoid& source, const BasedGroupoid& target) {
    if (map.source != source.graph() || map.target != target.graph()) {
        throw IllFormedMap("map graphs differ from the groupoids' graphs");
    }
    const SurfaceGraph& g = *map.source;
    if (map.vertex_map.size() != g.vertex_count() || map.edge_images.size() != g.edge_count()) {
        throw IllFormedMap("map does not cover every vertex and edge");
    }
    for (std::size_t v : map.vertex_map) {
        if (v >= map.target->vertex_count()) throw IllFormedMap("vertex image out of range");
    }
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const EdgeWord& img = map.edge_images[e];
        const GraphEdge& edge = g.edges()[e];
        if (img.graph() != map.target) throw IllFormedMap("image of edge '" + edge.id + "' is in another graph");
        if (img.start() != map.vertex_map[edge.from] || img.end() != map.vertex_map[edge.to]) {
            throw IllFormedMap("image of edge '" + edge.id + "' (" + img.to_string() +
                               ") has endpoints that do not match the vertex map");
        }
    }
    for (std::size_t p : source.basepoints()) {
        if (!target.is_basepoint(map.vertex_map[p])) {
            throw IllFormedMap("basepoint '" + g.vertices()[p] + "' is not sent to a basepoint");
        }
    }
}

EdgeWord apply(const GraphMap& map, const EdgeWord& w) {
    const SurfaceGraph& target = *map.target;
    std::vector<DirectedEdge> steps;
    steps.reserve(2 * w.length());
    std::size_t at = map.vertex_map[w.start()];
    auto step = [&](DirectedEdge x) {
        if (x.edge >= target.edge_count() || tail(target, x) != at) {
            throw MalformedWord("image of " + w.to_string() + " is not a path");
        }
        at = head(target, x);
        push_reduced(steps, x);
    };
    for (const DirectedEdge& d : w.steps()) {
        const EdgeWord& img = map.edge_images[d.edge];
        if (d.forward) {
            for (const DirectedEdge& x : img.steps()) step(x);
        } else {
            for (auto it = img.steps().rbegin(); it != img.steps().rend(); ++it) step(it->inverse());
        }
    }
    return EdgeWord(map.target, map.vertex_map[w.start()], std::move(steps));
}

FunctorReport induced_functor_check(const GraphMap& map, const BasedGroupoid& source,
                                    const BasedGroupoid& target,
                                    const std::vector<std::pair<EdgeWord, EdgeWord>>& samples) {
    check_well_formed(map, source, target);
    FunctorReport report;
    for (std::size_t p : source.basepoints()) {
        const EdgeWord img = apply(map, identity(source.graph(), p));
        ++report.identities_checked;
        if (!img.empty()) {
            report.violations.push_back("F(id(" + source.graph()->vertices()[p] + ")) = " + img.to_string());
        }
    }
    for (const auto& [f, g] : samples) {
        if (!source.contains(f) || !source.contains(g)) {
            report.violations.push_back("sample " + f.to_string() + " , " + g.to_string() +
                                        " is not a pair of morphisms");
            continue;
        }
        ++report.pairs_checked;
        const EdgeWord lhs = apply(map, compose(f, g));
        const EdgeWord rhs = compose(apply(map, f), apply(map, g));
        if (!(lhs == rhs)) {
            report.violations.push_back("F(" + f.to_string() + " . " + g.to_string() + ") = " + lhs.to_string() +
                                        " but F(f).F(g) = " + rhs.to_string());
        }
    }
    return report;
}

std::optional<std::pair<EdgeWord, EdgeWord>> injectivity_witness(const GraphMap& map,
                                                                 const std::vector<EdgeWord>& words) {
    std::unordered_map<EdgeWord, std::size_t, EdgeWordHash> seen;
    for (std::size_t i = 0; i < words.size(); ++i) {
        const EdgeWord w = reduce(words[i]);
        const auto [it, inserted] = seen.emplace(apply(map, w), i);
        if (!inserted && !(reduce(words[it->second]) == w)) return std::make_pair(words[it->second], words[i]);
    }
    return std::nullopt;
}

}  // namespace stripes
