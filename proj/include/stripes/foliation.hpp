#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "stripes/atlas.hpp"

namespace stripes {

/// Image of R x {level} for a level strictly inside (-1, 1).
struct InteriorLeaf {
    std::size_t strip = 0;
    Rational level{0};

    friend bool operator==(const InteriorLeaf&, const InteriorLeaf&) = default;
};

/// Image of a boundary interval. `seam` is the position of the gluing that
/// uses the interval, if any.
struct BoundaryLeaf {
    IntervalRef interval;
    std::optional<std::size_t> seam;

    friend bool operator==(const BoundaryLeaf&, const BoundaryLeaf&) = default;
};

using Leaf = std::variant<InteriorLeaf, BoundaryLeaf>;

std::string leaf_name(const ExpandedAtlas& atlas, const Leaf& leaf);

struct LeafClass {
    bool is_seam = false;
    bool shares_side = false;

    bool singular() const { return is_seam || shares_side; }
    friend bool operator==(const LeafClass&, const LeafClass&) = default;
};

/// One connected piece of a level set: a point when lo == hi and both ends
/// are closed.
struct LevelRange {
    Rational lo{0};
    Rational hi{0};
    bool lo_closed = true;
    bool hi_closed = true;

    bool contains(const Rational& t) const;
    friend bool operator==(const LevelRange&, const LevelRange&) = default;
};

/// Finite union of level ranges, kept sorted and merged.
class LevelSet {
public:
    LevelSet() = default;
    explicit LevelSet(std::vector<LevelRange> ranges);

    static LevelSet point(const Rational& t);
    static LevelSet open(const Rational& lo, const Rational& hi);

    const std::vector<LevelRange>& ranges() const { return ranges_; }
    bool contains(const Rational& t) const;
    bool empty() const { return ranges_.empty(); }

    friend bool operator==(const LevelSet&, const LevelSet&) = default;

private:
    std::vector<LevelRange> ranges_;
};

/// The union of interior leaves of one strip through the given levels.
struct Saturation {
    std::size_t strip = 0;
    LevelSet levels;

    bool contains(const Leaf& leaf) const;
    friend bool operator==(const Saturation&, const Saturation&) = default;
};

/// Throws BadLevel when a level lies outside (-1, 1), BadParameter for an
/// unknown strip.
Saturation saturate(const ExpandedAtlas& atlas, std::size_t strip, const LevelSet& levels);

/// Throws UnknownLeaf if the leaf does not exist in the atlas.
LeafClass classify_leaf(const ExpandedAtlas& atlas, const Leaf& leaf);

// ---------------------------------------------------------------------------
// Local finiteness

struct AccumulationPoint {
    std::string strip;
    Side side = Side::Top;
    Rational point{0};
    std::size_t family = 0;            // family on that side producing it
    std::optional<std::string> inside; // interval or family member containing it
};

struct FinitenessCertificate {
    bool locally_finite = true;
    std::vector<AccumulationPoint> points;
    std::vector<std::string> notes;

    nlohmann::json to_json() const;
};

/// Accumulation analysis of the boundary intervals of every side. Affine
/// families run off to infinity in both directions. A geometric family
/// (a0 + a1 r^n, b0 + b1 r^n) accumulates at a0 and b0 as n grows. The
/// family of singular leaves is locally finite iff no accumulation point is
/// a point of the strip, that is iff none lies inside an interval of its side.
FinitenessCertificate local_finiteness(const StripedAtlas& atlas);

struct SingularLeaf {
    BoundaryLeaf leaf;
    LeafClass cls;
    std::string name;
};

struct SingularReport {
    std::vector<SingularLeaf> leaves;  // one per seam, then unglued singular intervals
    FinitenessCertificate certificate;

    nlohmann::json to_json() const;
};

/// Requires a valid atlas (throws InvalidAtlas). The certificate combines
/// the finite expanded sides with the symbolic analysis of the source atlas.
SingularReport singular_report(const ExpandedAtlas& atlas);

}  // namespace stripes
