#include "stripes/foliation.hpp"

#include <algorithm>

#include "stripes/error.hpp"

namespace stripes {

namespace {

using boost::multiprecision::abs;
using boost::multiprecision::cpp_int;

std::string interval_text(const Interval& iv) {
    return "(" + to_string(iv.lo) + ", " + to_string(iv.hi) + ")";
}

cpp_int floor_of(const Rational& r) {
    const cpp_int num = numerator(r);
    const cpp_int den = denominator(r);
    cpp_int q = num / den;
    if (num % den != 0 && num < 0) --q;
    return q;
}

bool range_nonempty(const LevelRange& r) {
    return r.lo < r.hi || (r.lo == r.hi && r.lo_closed && r.hi_closed);
}

// Ranges a <= b (by lower end) whose union is connected.
bool joinable(const LevelRange& a, const LevelRange& b) {
    return b.lo < a.hi || (b.lo == a.hi && (a.hi_closed || b.lo_closed));
}

std::optional<std::size_t> seam_of(const ExpandedAtlas& atlas, const IntervalRef& ref) {
    for (std::size_t g = 0; g < atlas.gluings.size(); ++g) {
        if (atlas.gluings[g].x == ref || atlas.gluings[g].y == ref) return g;
    }
    return std::nullopt;
}

// Some integer n with lo_base + c n < p < hi_base + c n.
std::optional<cpp_int> affine_member(const IntervalFamily& f, const Rational& p) {
    const Rational& c = f.lo_coeff;
    if (c == 0) return std::nullopt;
    const Rational a = (p - f.hi_base) / c;
    const Rational b = (p - f.lo_base) / c;
    const cpp_int n = floor_of(std::min(a, b)) + 1;
    if (Rational(n) < std::max(a, b)) return n;
    return std::nullopt;
}

// Some integer n with lo(n) < p < hi(n), where both endpoints are affine in
// u = r^n. Writing each condition as a + b u > 0, all signs are fixed by
// the parity of n once |b u| < |a| (large n) or |b u| > |a| (small n), so
// only the range in between plus two steps on each side needs testing.
std::optional<std::int64_t> geometric_member(const IntervalFamily& f, const Rational& p) {
    struct Cond {
        Rational a;
        Rational b;
    };
    const Cond conds[2] = {{p - f.lo_base, Rational(-f.lo_coeff)}, {f.hi_base - p, f.hi_coeff}};
    const Rational r = abs(f.ratio);

    std::int64_t n0 = 0;
    for (Rational u{1};; u *= r, ++n0) {
        const bool settled = std::all_of(std::begin(conds), std::end(conds),
                                         [&](const Cond& c) { return c.a == 0 || abs(c.b) * u < abs(c.a); });
        if (settled) break;
    }
    std::int64_t n1 = 0;
    for (Rational v{1};; v /= r, ++n1) {
        const bool settled = std::all_of(std::begin(conds), std::end(conds),
                                         [&](const Cond& c) { return c.b == 0 || abs(c.b) * v > abs(c.a); });
        if (settled) break;
    }
    for (std::int64_t n = -n1 - 1; n <= n0 + 1; ++n) {
        const Rational u = pow(f.ratio, n);
        if (std::all_of(std::begin(conds), std::end(conds), [&](const Cond& c) { return c.a + c.b * u > 0; })) {
            return n;
        }
    }
    return std::nullopt;
}

std::optional<std::string> containing(const ModelStrip& strip, Side side, const Rational& p) {
    const SideSpec& spec = strip.side(side);
    const std::string where = strip.id + "." + side_name(side);
    for (const Interval& iv : spec.intervals) {
        if (iv.contains(p)) return where + " interval " + interval_text(iv);
    }
    for (std::size_t k = 0; k < spec.families.size(); ++k) {
        const IntervalFamily& f = spec.families[k];
        if (f.kind == IntervalFamily::Kind::Affine) {
            if (auto n = affine_member(f, p)) {
                const Rational rn{*n};
                return where + " family " + std::to_string(k) + " member n = " + n->str() + " " +
                       interval_text(Interval{Rational(f.lo_base + f.lo_coeff * rn), Rational(f.hi_base + f.hi_coeff * rn)});
            }
        } else if (auto n = geometric_member(f, p)) {
            return where + " family " + std::to_string(k) + " member n = " + std::to_string(*n) + " " +
                   interval_text(f.member(*n));
        }
    }
    return std::nullopt;
}

}  // namespace

std::string leaf_name(const ExpandedAtlas& atlas, const Leaf& leaf) {
    if (const auto* in = std::get_if<InteriorLeaf>(&leaf)) {
        return atlas.strips.at(in->strip).id + "@" + to_string(in->level);
    }
    const auto& b = std::get<BoundaryLeaf>(leaf);
    std::string name = atlas.strips.at(b.interval.strip).id + "." + side_name(b.interval.side) + "[" +
                       std::to_string(b.interval.index) + "]";
    if (b.seam) name += " (seam " + atlas.gluings.at(*b.seam).id + ")";
    return name;
}

// ---------------------------------------------------------------------------
// Level sets

bool LevelRange::contains(const Rational& t) const {
    return (t > lo || (t == lo && lo_closed)) && (t < hi || (t == hi && hi_closed));
}

LevelSet::LevelSet(std::vector<LevelRange> ranges) {
    ranges.erase(std::remove_if(ranges.begin(), ranges.end(), [](const LevelRange& r) { return !range_nonempty(r); }),
                 ranges.end());
    std::sort(ranges.begin(), ranges.end(), [](const LevelRange& a, const LevelRange& b) {
        if (a.lo != b.lo) return a.lo < b.lo;
        return a.lo_closed && !b.lo_closed;
    });
    for (const LevelRange& r : ranges) {
        if (ranges_.empty() || !joinable(ranges_.back(), r)) {
            ranges_.push_back(r);
            continue;
        }
        LevelRange& last = ranges_.back();
        if (r.hi > last.hi) {
            last.hi = r.hi;
            last.hi_closed = r.hi_closed;
        } else if (r.hi == last.hi) {
            last.hi_closed = last.hi_closed || r.hi_closed;
        }
    }
}

LevelSet LevelSet::point(const Rational& t) { return LevelSet({{t, t, true, true}}); }

LevelSet LevelSet::open(const Rational& lo, const Rational& hi) { return LevelSet({{lo, hi, false, false}}); }

bool LevelSet::contains(const Rational& t) const {
    return std::any_of(ranges_.begin(), ranges_.end(), [&](const LevelRange& r) { return r.contains(t); });
}

bool Saturation::contains(const Leaf& leaf) const {
    const auto* in = std::get_if<InteriorLeaf>(&leaf);
    return in != nullptr && in->strip == strip && levels.contains(in->level);
}

Saturation saturate(const ExpandedAtlas& atlas, std::size_t strip, const LevelSet& levels) {
    if (strip >= atlas.strips.size()) throw BadParameter("no strip at position " + std::to_string(strip));
    for (const LevelRange& r : levels.ranges()) {
        const bool lo_ok = r.lo > -1 || (r.lo == -1 && !r.lo_closed);
        const bool hi_ok = r.hi < 1 || (r.hi == 1 && !r.hi_closed);
        if (!lo_ok || !hi_ok) {
            throw BadLevel("levels " + std::string(r.lo_closed ? "[" : "(") + to_string(r.lo) + ", " +
                           to_string(r.hi) + (r.hi_closed ? "]" : ")") + " leave (-1, 1)");
        }
    }
    // Interior leaves are whole horizontal lines, so a set of levels is
    // already a union of leaves.
    return {strip, levels};
}

LeafClass classify_leaf(const ExpandedAtlas& atlas, const Leaf& leaf) {
    if (const auto* in = std::get_if<InteriorLeaf>(&leaf)) {
        if (in->strip >= atlas.strips.size() || in->level <= -1 || in->level >= 1) {
            throw UnknownLeaf("no interior leaf at level " + to_string(in->level) + " of strip position " +
                              std::to_string(in->strip));
        }
        return {};
    }
    const auto& b = std::get<BoundaryLeaf>(leaf);
    if (b.interval.strip >= atlas.strips.size() ||
        b.interval.index >= atlas.strips[b.interval.strip].side(b.interval.side).size()) {
        throw UnknownLeaf("no boundary interval " + std::to_string(b.interval.index) + " on that side");
    }
    LeafClass c;
    c.is_seam = seam_of(atlas, b.interval).has_value();
    c.shares_side = atlas.strips[b.interval.strip].side(b.interval.side).size() >= 2;
    return c;
}

// ---------------------------------------------------------------------------
// Local finiteness

FinitenessCertificate local_finiteness(const StripedAtlas& atlas) {
    FinitenessCertificate cert;
    for (const auto& [id, strip] : atlas.strips) {
        for (Side side : {Side::Top, Side::Bottom}) {
            const SideSpec& spec = strip.side(side);
            const std::string where = id + "." + side_name(side);
            for (std::size_t k = 0; k < spec.families.size(); ++k) {
                const IntervalFamily& f = spec.families[k];
                if (f.kind == IntervalFamily::Kind::Affine) {
                    cert.notes.push_back(where + " family " + std::to_string(k) +
                                         ": affine, no finite accumulation point");
                    continue;
                }
                std::vector<Rational> limits{f.lo_base};
                if (f.hi_base != f.lo_base) limits.push_back(f.hi_base);
                for (const Rational& p : limits) {
                    AccumulationPoint ap{id, side, p, k, containing(strip, side, p)};
                    cert.notes.push_back(where + " family " + std::to_string(k) + ": accumulates at " +
                                         to_string(p) + (ap.inside ? ", inside " + *ap.inside : ", a removed point"));
                    if (ap.inside) cert.locally_finite = false;
                    cert.points.push_back(std::move(ap));
                }
            }
        }
    }
    return cert;
}

nlohmann::json FinitenessCertificate::to_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (const AccumulationPoint& p : points) {
        pts.push_back({{"strip", p.strip},
                       {"side", side_name(p.side)},
                       {"point", to_string(p.point)},
                       {"family", p.family},
                       {"inside", p.inside ? nlohmann::json(*p.inside) : nlohmann::json(nullptr)}});
    }
    return {{"locally_finite", locally_finite}, {"accumulation_points", pts}, {"notes", notes}};
}

SingularReport singular_report(const ExpandedAtlas& atlas) {
    require_valid(atlas);
    SingularReport report;
    for (std::size_t g = 0; g < atlas.gluings.size(); ++g) {
        BoundaryLeaf leaf{atlas.gluings[g].x, g};
        report.leaves.push_back({leaf, classify_leaf(atlas, leaf), leaf_name(atlas, leaf)});
    }
    for (std::size_t s = 0; s < atlas.strips.size(); ++s) {
        for (Side side : {Side::Top, Side::Bottom}) {
            for (std::size_t i = 0; i < atlas.strips[s].side(side).size(); ++i) {
                const IntervalRef ref{s, side, i};
                if (seam_of(atlas, ref)) continue;
                BoundaryLeaf leaf{ref, std::nullopt};
                const LeafClass c = classify_leaf(atlas, leaf);
                if (c.singular()) report.leaves.push_back({leaf, c, leaf_name(atlas, leaf)});
            }
        }
    }
    report.certificate = local_finiteness(atlas.source);
    report.certificate.notes.insert(report.certificate.notes.begin(),
                                    "window " + std::to_string(atlas.window) +
                                        ": every side holds finitely many intervals");
    return report;
}

nlohmann::json SingularReport::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const SingularLeaf& l : leaves) {
        out.push_back({{"leaf", l.name}, {"seam", l.cls.is_seam}, {"shares_side", l.cls.shares_side}});
    }
    return {{"singular_leaves", out}, {"certificate", certificate.to_json()}};
}

}  // namespace stripes
