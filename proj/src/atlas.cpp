#include "stripes/atlas.hpp"

#include <algorithm>
#include <sstream>

#include "stripes/error.hpp"

namespace stripes {

namespace {

using boost::multiprecision::abs;

std::string side_key(const std::string& strip, Side side) {
    return strip + ":" + side_name(side);
}

}  // namespace

// ---------------------------------------------------------------------------
// IntervalFamily

Interval IntervalFamily::member(std::int64_t n) const {
    if (kind == Kind::Affine) {
        return {Rational(lo_base + lo_coeff * n), Rational(hi_base + hi_coeff * n)};
    }
    const Rational s = pow(ratio, n);
    return {Rational(lo_base + lo_coeff * s), Rational(hi_base + hi_coeff * s)};
}

std::optional<std::string> IntervalFamily::check() const {
    const Rational d0 = hi_base - lo_base;
    const Rational d1 = hi_coeff - lo_coeff;
    if (kind == Kind::Affine) {
        if (d1 != 0) return "member width depends on n, so lo(n) < hi(n) fails for some n";
        if (d0 <= 0) return "lo(n) >= hi(n) for every n";
        if (abs(lo_coeff) < d0) return "members overlap: |step| is smaller than the width";
        return std::nullopt;
    }
    if (ratio == 0 || abs(ratio) >= 1) return "geometric ratio must satisfy 0 < |r| < 1";
    if (lo_coeff == 0 && hi_coeff == 0) return "members do not depend on n";
    // r^n takes values arbitrarily close to 0 and arbitrarily large in modulus;
    // for negative r it takes both signs.
    if (ratio < 0) {
        if (d1 != 0 || d0 <= 0) return "lo(n) < hi(n) fails for some n";
        return std::nullopt;
    }
    if (d1 < 0 || d0 < 0 || (d1 == 0 && d0 == 0)) return "lo(n) < hi(n) fails for some n";
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Structure

std::vector<StructureIssue> check_structure(const StripedAtlas& atlas) {
    std::vector<StructureIssue> issues;
    for (const auto& [id, strip] : atlas.strips) {
        if (id != strip.id) issues.push_back({"strip:" + id, "strip id does not match its key"});
        for (Side side : {Side::Top, Side::Bottom}) {
            const SideSpec& spec = strip.side(side);
            for (std::size_t i = 0; i < spec.intervals.size(); ++i) {
                if (!spec.intervals[i].well_formed()) {
                    issues.push_back({"interval:" + side_key(id, side) + ":" + std::to_string(i),
                                      "interval has lo >= hi"});
                }
            }
            for (std::size_t k = 0; k < spec.families.size(); ++k) {
                if (auto err = spec.families[k].check()) {
                    issues.push_back({"family:" + side_key(id, side) + ":" + std::to_string(k), *err});
                }
            }
        }
    }

    auto check_ref = [&](const Gluing& g, const BoundaryRef& ref, const char* role) {
        const std::string loc = "glue:" + g.id;
        const auto it = atlas.strips.find(ref.strip);
        if (it == atlas.strips.end()) {
            issues.push_back({loc, std::string(role) + " names missing strip '" + ref.strip + "'"});
            return;
        }
        const SideSpec& spec = it->second.side(ref.side);
        if (const auto* e = std::get_if<ExplicitIndex>(&ref.which)) {
            if (e->index >= spec.intervals.size()) {
                issues.push_back({loc, std::string(role) + " names missing interval " +
                                           side_key(ref.strip, ref.side) + "[" +
                                           std::to_string(e->index) + "]"});
            }
        } else {
            const auto& f = std::get<FamilyMember>(ref.which);
            if (f.family >= spec.families.size()) {
                issues.push_back({loc, std::string(role) + " names missing family " +
                                           side_key(ref.strip, ref.side) + "[" +
                                           std::to_string(f.family) + ":...]"});
            }
            if (f.member.uses_variable && !g.is_family()) {
                issues.push_back({loc, std::string(role) + " uses an index variable outside a family"});
            }
        }
    };
    for (const auto& [id, g] : atlas.gluings) {
        if (id != g.id) issues.push_back({"glue:" + id, "gluing id does not match its key"});
        check_ref(g, g.x, "first reference");
        check_ref(g, g.y, "second reference");
    }
    return issues;
}

// ---------------------------------------------------------------------------
// Expansion

std::optional<std::size_t> ExpandedAtlas::strip_index(const std::string& id) const {
    const auto it = std::lower_bound(strips.begin(), strips.end(), id,
                                     [](const ExpandedStrip& s, const std::string& v) { return s.id < v; });
    if (it == strips.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - strips.begin());
}

const ExpandedInterval& ExpandedAtlas::at(const IntervalRef& ref) const {
    return strips.at(ref.strip).side(ref.side).at(ref.index);
}

ExpandedAtlas expand(const StripedAtlas& atlas, std::int64_t window) {
    if (window < 0) throw BadParameter("window must be nonnegative");
    if (auto issues = check_structure(atlas); !issues.empty()) {
        throw ResolutionError(issues.front().location + ": " + issues.front().message);
    }

    ExpandedAtlas out;
    out.window = window;
    out.source = atlas;

    // (strip position, side, family, n) -> expanded interval position
    std::map<std::tuple<std::size_t, int, std::size_t, std::int64_t>, std::size_t> family_pos;

    for (const auto& [id, strip] : atlas.strips) {
        ExpandedStrip es;
        es.id = id;
        const std::size_t strip_pos = out.strips.size();
        for (Side side : {Side::Top, Side::Bottom}) {
            const SideSpec& spec = strip.side(side);
            auto& list = es.side(side);
            for (std::size_t i = 0; i < spec.intervals.size(); ++i) {
                list.push_back({spec.intervals[i], false, i, 0});
            }
            for (std::size_t k = 0; k < spec.families.size(); ++k) {
                for (std::int64_t n = -window; n < window; ++n) {
                    family_pos[{strip_pos, sign(side), k, n}] = list.size();
                    list.push_back({spec.families[k].member(n), true, k, n});
                }
            }
        }
        out.strips.push_back(std::move(es));
    }

    // Returns the resolved reference, or nullopt when the member index falls
    // outside the window.
    auto resolve = [&](const BoundaryRef& ref, std::int64_t n) -> std::optional<IntervalRef> {
        const std::size_t strip_pos = *out.strip_index(ref.strip);
        if (const auto* e = std::get_if<ExplicitIndex>(&ref.which)) {
            return IntervalRef{strip_pos, ref.side, e->index};
        }
        const auto& f = std::get<FamilyMember>(ref.which);
        const auto it = family_pos.find({strip_pos, sign(ref.side), f.family, f.member.eval(n)});
        if (it == family_pos.end()) return std::nullopt;
        return IntervalRef{strip_pos, ref.side, it->second};
    };

    auto member_index = [](const BoundaryRef& ref, std::int64_t n) -> std::int64_t {
        if (const auto* f = std::get_if<FamilyMember>(&ref.which)) return f->member.eval(n);
        return 0;
    };

    auto instantiate = [&](const Gluing& g, std::int64_t n) {
        const auto x = resolve(g.x, n);
        const auto y = resolve(g.y, n);
        if (x && y) {
            ExpandedGluing eg;
            eg.id = g.is_family() ? g.id + "[" + std::to_string(n) + "]" : g.id;
            eg.source_id = g.id;
            if (g.is_family()) eg.member = n;
            eg.x = *x;
            eg.y = *y;
            eg.reversed = g.reversed;
            out.gluings.push_back(std::move(eg));
            return;
        }
        std::ostringstream reason;
        reason << "index outside window [" << -window << ", " << window - 1 << "] on";
        if (!x) reason << " first reference (member " << member_index(g.x, n) << ")";
        if (!x && !y) reason << " and";
        if (!y) reason << " second reference (member " << member_index(g.y, n) << ")";
        out.dropped.push_back({g.id, n, reason.str()});
    };

    for (const auto& [id, g] : atlas.gluings) {
        if (!g.is_family()) {
            instantiate(g, 0);
            continue;
        }
        for (std::int64_t n = -window; n < window; ++n) instantiate(g, n);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation

const char* kind_name(Violation::Kind kind) {
    switch (kind) {
        case Violation::Kind::EmptyInterval: return "empty-interval";
        case Violation::Kind::Overlap: return "overlap";
        case Violation::Kind::SelfGluing: return "self-gluing";
        case Violation::Kind::RoleConflict: return "role-conflict";
        case Violation::Kind::DoubleUse: return "double-use";
    }
    return "unknown";
}

namespace {

std::string span_key(const ExpandedAtlas& ea, const IntervalRef& ref) {
    const ExpandedInterval& iv = ea.at(ref);
    return std::string(iv.from_family ? "family:" : "interval:") +
           side_key(ea.strips[ref.strip].id, ref.side) + ":" + std::to_string(iv.source_index);
}

std::string describe(const ExpandedAtlas& ea, const IntervalRef& ref) {
    const ExpandedInterval& iv = ea.at(ref);
    std::string s = side_key(ea.strips[ref.strip].id, ref.side) + "[" + std::to_string(ref.index) +
                    "] = (" + to_string(iv.interval.lo) + ", " + to_string(iv.interval.hi) + ")";
    return s;
}

}  // namespace

ValidationReport validate(const ExpandedAtlas& ea) {
    ValidationReport report;
    for (std::size_t s = 0; s < ea.strips.size(); ++s) {
        for (Side side : {Side::Top, Side::Bottom}) {
            const auto& list = ea.strips[s].side(side);
            for (std::size_t i = 0; i < list.size(); ++i) {
                const IntervalRef ri{s, side, i};
                if (!list[i].interval.well_formed()) {
                    report.violations.push_back({Violation::Kind::EmptyInterval,
                                                 describe(ea, ri) + " has lo >= hi",
                                                 ea.strips[s].id, side, {i}, {},
                                                 {span_key(ea, ri)}});
                }
            }
            for (std::size_t i = 0; i < list.size(); ++i) {
                for (std::size_t j = i + 1; j < list.size(); ++j) {
                    if (!list[i].interval.well_formed() || !list[j].interval.well_formed()) continue;
                    if (!list[i].interval.overlaps(list[j].interval)) continue;
                    const IntervalRef ri{s, side, i};
                    const IntervalRef rj{s, side, j};
                    report.violations.push_back({Violation::Kind::Overlap,
                                                 describe(ea, ri) + " and " + describe(ea, rj) +
                                                     " are not disjoint",
                                                 ea.strips[s].id, side, {i, j}, {},
                                                 {span_key(ea, ri), span_key(ea, rj)}});
                }
            }
        }
    }

    // interval -> (gluing position, role 0 = X / 1 = Y)
    std::map<IntervalRef, std::vector<std::pair<std::size_t, int>>> uses;
    for (std::size_t g = 0; g < ea.gluings.size(); ++g) {
        const ExpandedGluing& gl = ea.gluings[g];
        if (gl.x == gl.y) {
            report.violations.push_back({Violation::Kind::SelfGluing,
                                         "gluing " + gl.id + " glues " + describe(ea, gl.x) +
                                             " to itself",
                                         ea.strips[gl.x.strip].id, gl.x.side, {gl.x.index}, {gl.id},
                                         {"glue:" + gl.source_id}});
        }
        uses[gl.x].emplace_back(g, 0);
        uses[gl.y].emplace_back(g, 1);
    }
    for (const auto& [ref, list] : uses) {
        if (list.size() < 2) continue;
        std::vector<std::string> ids;
        std::vector<std::string> keys{span_key(ea, ref)};
        bool as_x = false;
        bool as_y = false;
        for (const auto& [g, role] : list) {
            ids.push_back(ea.gluings[g].id);
            keys.push_back("glue:" + ea.gluings[g].source_id);
            (role == 0 ? as_x : as_y) = true;
        }
        std::string who;
        for (const auto& id : ids) who += (who.empty() ? "" : ", ") + id;
        // Self-gluings are reported once above.
        const bool only_self = list.size() == 2 && list[0].first == list[1].first;
        if (only_self) continue;
        if (as_x && as_y) {
            report.violations.push_back({Violation::Kind::RoleConflict,
                                         describe(ea, ref) + " is used both as a first and a second "
                                                             "gluing reference (" + who + ")",
                                         ea.strips[ref.strip].id, ref.side, {ref.index}, ids, keys});
        }
        report.violations.push_back({Violation::Kind::DoubleUse,
                                     describe(ea, ref) + " is referenced by more than one gluing (" +
                                         who + ")",
                                     ea.strips[ref.strip].id, ref.side, {ref.index}, ids, keys});
    }
    return report;
}

void require_valid(const ExpandedAtlas& expanded) {
    const ValidationReport report = validate(expanded);
    if (!report.valid()) throw InvalidAtlas(report.violations.front().message);
}

// ---------------------------------------------------------------------------
// Seams and gamma

std::vector<SeamDescriptor> seams(const ExpandedAtlas& ea) {
    require_valid(ea);
    std::vector<SeamDescriptor> out;
    out.reserve(ea.gluings.size());
    for (const ExpandedGluing& g : ea.gluings) {
        SeamDescriptor d;
        d.id = g.id;
        d.x = {g.x, ea.strips[g.x.strip].id, ea.at(g.x).interval};
        d.y = {g.y, ea.strips[g.y.strip].id, ea.at(g.y).interval};
        d.reversed = g.reversed;
        out.push_back(std::move(d));
    }
    return out;
}

namespace {

using Kind = ExtendedRational::Kind;

// Increasing rational homeomorphism of an interval onto (0,1).
Rational to_unit(const Interval& iv, const Rational& t) {
    const bool lo_inf = !iv.lo.is_finite();
    const bool hi_inf = !iv.hi.is_finite();
    if (!lo_inf && !hi_inf) return (t - iv.lo.value()) / (iv.hi.value() - iv.lo.value());
    if (!lo_inf) {
        const Rational u = t - iv.lo.value();
        return u / (1 + u);
    }
    if (!hi_inf) {
        const Rational u = iv.hi.value() - t;
        return 1 / (1 + u);
    }
    const Rational s = t / (1 + abs(t));
    return (1 + s) / 2;
}

Rational from_unit(const Interval& iv, const Rational& v) {
    const bool lo_inf = !iv.lo.is_finite();
    const bool hi_inf = !iv.hi.is_finite();
    if (!lo_inf && !hi_inf) return iv.lo.value() + v * (iv.hi.value() - iv.lo.value());
    if (!lo_inf) return iv.lo.value() + v / (1 - v);
    if (!hi_inf) return iv.hi.value() - (1 / v - 1);
    const Rational s = 2 * v - 1;
    return s / (1 - abs(s));
}

}  // namespace

Rational transfer(const Interval& from, const Interval& to, bool reversed, const Rational& t) {
    if (!from.contains(t)) {
        throw OutOfInterval(to_string(t) + " is not inside (" + to_string(from.lo) + ", " +
                            to_string(from.hi) + ")");
    }
    const bool f_lo = from.lo.is_finite();
    const bool f_hi = from.hi.is_finite();
    const bool t_lo = to.lo.is_finite();
    const bool t_hi = to.hi.is_finite();

    if (f_lo && f_hi && t_lo && t_hi) {
        const Rational u = (t - from.lo.value()) / (from.hi.value() - from.lo.value());
        const Rational v = reversed ? Rational(1 - u) : u;
        return to.lo.value() + v * (to.hi.value() - to.lo.value());
    }
    if (!f_lo && !f_hi && !t_lo && !t_hi) return reversed ? Rational(-t) : t;
    if (!reversed) {
        if (f_lo && !f_hi && t_lo && !t_hi) return to.lo.value() + (t - from.lo.value());
        if (!f_lo && f_hi && !t_lo && t_hi) return to.hi.value() + (t - from.hi.value());
    } else {
        if (f_lo && !f_hi && !t_lo && t_hi) return to.hi.value() - (t - from.lo.value());
        if (!f_lo && f_hi && t_lo && !t_hi) return to.lo.value() + (from.hi.value() - t);
    }
    const Rational v = to_unit(from, t);
    return from_unit(to, reversed ? Rational(1 - v) : v);
}

Rational gamma(const SeamDescriptor& seam, const Rational& y) {
    return transfer(seam.y.interval, seam.x.interval, seam.reversed, y);
}

Rational gamma_inverse(const SeamDescriptor& seam, const Rational& x) {
    return transfer(seam.x.interval, seam.y.interval, seam.reversed, x);
}

}  // namespace stripes
