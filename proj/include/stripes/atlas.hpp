#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stripes/rational.hpp"
#include "stripes/source_span.hpp"

namespace stripes {

enum class Side : std::int8_t { Bottom = -1, Top = 1 };

inline int sign(Side s) { return static_cast<int>(s); }
inline const char* side_name(Side s) { return s == Side::Top ? "top" : "bottom"; }

/// Open interval (lo, hi) on a boundary line of a model strip.
struct Interval {
    ExtendedRational lo;
    ExtendedRational hi;

    bool well_formed() const { return lo < hi; }
    bool contains(const Rational& x) const {
        return lo < ExtendedRational(x) && ExtendedRational(x) < hi;
    }
    bool overlaps(const Interval& other) const { return lo < other.hi && other.lo < hi; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Integer-indexed family of intervals.
///
/// Affine members are (lo_base + lo_coeff*n, hi_base + hi_coeff*n); geometric
/// members replace n by ratio^n with 0 < |ratio| < 1.
struct IntervalFamily {
    enum class Kind : std::uint8_t { Affine, Geometric };

    Kind kind = Kind::Affine;
    Rational lo_base{0};
    Rational lo_coeff{0};
    Rational hi_base{0};
    Rational hi_coeff{0};
    Rational ratio{0};  // geometric only

    Interval member(std::int64_t n) const;

    /// Symbolic family checks: lo(n) < hi(n) for every integer n, and for
    /// affine families pairwise disjointness of all members. Returns a
    /// description of the first failure.
    std::optional<std::string> check() const;

    friend bool operator==(const IntervalFamily&, const IntervalFamily&) = default;
};

struct SideSpec {
    std::vector<Interval> intervals;
    std::vector<IntervalFamily> families;

    bool empty() const { return intervals.empty() && families.empty(); }
    friend bool operator==(const SideSpec&, const SideSpec&) = default;
};

/// R x (-1,1) plus the listed boundary intervals on each side.
struct ModelStrip {
    std::string id;
    SideSpec top;
    SideSpec bottom;

    const SideSpec& side(Side s) const { return s == Side::Top ? top : bottom; }
    SideSpec& side(Side s) { return s == Side::Top ? top : bottom; }

    friend bool operator==(const ModelStrip&, const ModelStrip&) = default;
};

/// Index of a family member: `n + offset` when it uses the gluing family's
/// variable, the constant `offset` otherwise.
struct IndexExpr {
    bool uses_variable = false;
    std::int64_t offset = 0;

    std::int64_t eval(std::int64_t n) const { return uses_variable ? n + offset : offset; }
    friend bool operator==(const IndexExpr&, const IndexExpr&) = default;
};

struct ExplicitIndex {
    std::size_t index = 0;
    friend bool operator==(const ExplicitIndex&, const ExplicitIndex&) = default;
};

struct FamilyMember {
    std::size_t family = 0;
    IndexExpr member;
    friend bool operator==(const FamilyMember&, const FamilyMember&) = default;
};

struct BoundaryRef {
    std::string strip;
    Side side = Side::Top;
    std::variant<ExplicitIndex, FamilyMember> which;

    friend bool operator==(const BoundaryRef&, const BoundaryRef&) = default;
};

/// Identification of boundary interval `y` onto `x`. A gluing with a
/// `family_variable` is a Z-indexed family of gluings.
struct Gluing {
    std::string id;
    BoundaryRef x;
    BoundaryRef y;
    bool reversed = false;
    std::optional<std::string> family_variable;

    bool is_family() const { return family_variable.has_value(); }
    friend bool operator==(const Gluing&, const Gluing&) = default;
};

/// Where each parsed item came from. Keys: "strip:A", "interval:A:top:0",
/// "family:A:top:0", "glue:s". Ignored by equality.
using SourceMap = std::map<std::string, SourceSpan>;

struct StripedAtlas {
    std::map<std::string, ModelStrip> strips;
    std::map<std::string, Gluing> gluings;
    SourceMap spans;

    friend bool operator==(const StripedAtlas& a, const StripedAtlas& b) {
        return a.strips == b.strips && a.gluings == b.gluings;
    }
};

/// Structural problems of an unexpanded atlas: unresolvable references and
/// failed symbolic family checks. Each entry is "location: message".
struct StructureIssue {
    std::string location;
    std::string message;
};
std::vector<StructureIssue> check_structure(const StripedAtlas& atlas);

// ---------------------------------------------------------------------------
// Expanded (finite) atlas

struct ExpandedInterval {
    Interval interval;
    bool from_family = false;
    std::size_t source_index = 0;       // into SideSpec::intervals or ::families
    std::int64_t member = 0;            // meaningful when from_family

    friend bool operator==(const ExpandedInterval&, const ExpandedInterval&) = default;
};

struct ExpandedStrip {
    std::string id;
    std::vector<ExpandedInterval> top;
    std::vector<ExpandedInterval> bottom;

    const std::vector<ExpandedInterval>& side(Side s) const { return s == Side::Top ? top : bottom; }
    std::vector<ExpandedInterval>& side(Side s) { return s == Side::Top ? top : bottom; }

    friend bool operator==(const ExpandedStrip&, const ExpandedStrip&) = default;
};

/// Reference into an ExpandedAtlas: strip position, side, interval position.
struct IntervalRef {
    std::size_t strip = 0;
    Side side = Side::Top;
    std::size_t index = 0;

    friend auto operator<=>(const IntervalRef&, const IntervalRef&) = default;
};

struct ExpandedGluing {
    std::string id;         // "s" or "s[n]" for family members
    std::string source_id;
    std::optional<std::int64_t> member;
    IntervalRef x;
    IntervalRef y;
    bool reversed = false;

    friend bool operator==(const ExpandedGluing&, const ExpandedGluing&) = default;
};

/// A gluing family member left out because one of its references falls
/// outside the window.
struct DroppedGluing {
    std::string source_id;
    std::int64_t member = 0;
    std::string reason;
};

struct ExpandedAtlas {
    std::int64_t window = 0;
    std::vector<ExpandedStrip> strips;      // sorted by id
    std::vector<ExpandedGluing> gluings;    // sorted by (source id, member)
    std::vector<DroppedGluing> dropped;
    StripedAtlas source;

    std::optional<std::size_t> strip_index(const std::string& id) const;
    const ExpandedInterval& at(const IntervalRef& ref) const;
};

/// Family indices n with -window <= n < window are instantiated.
///
/// Throws ResolutionError if the atlas fails check_structure.
ExpandedAtlas expand(const StripedAtlas& atlas, std::int64_t window);

struct Violation {
    enum class Kind : std::uint8_t {
        EmptyInterval,   // lo >= hi
        Overlap,         // two intervals of one side meet
        SelfGluing,      // x and y name the same interval
        RoleConflict,    // interval is an X for one gluing and a Y for another
        DoubleUse,       // interval referenced by more than one gluing slot
    };

    Kind kind;
    std::string message;
    std::string strip;               // empty when not applicable
    std::optional<Side> side;
    std::vector<std::size_t> intervals;
    std::vector<std::string> gluings;
    std::vector<std::string> span_keys;  // SourceMap keys of the involved items
};

const char* kind_name(Violation::Kind kind);

struct ValidationReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
};

ValidationReport validate(const ExpandedAtlas& expanded);

/// Throws InvalidAtlas listing the first violation when `expanded` is invalid.
void require_valid(const ExpandedAtlas& expanded);

// ---------------------------------------------------------------------------
// Seams

struct ResolvedInterval {
    IntervalRef ref;
    std::string strip_id;
    Interval interval;
};

struct SeamDescriptor {
    std::string id;
    ResolvedInterval x;
    ResolvedInterval y;
    bool reversed = false;

    std::size_t alpha() const { return x.ref.strip; }
    std::size_t alpha_prime() const { return y.ref.strip; }
};

std::vector<SeamDescriptor> seams(const ExpandedAtlas& expanded);

/// The gluing homeomorphism Y -> X. Affine whenever an orientation-respecting
/// affine bijection exists; otherwise both intervals are mapped onto (0,1) by
/// fixed rational homeomorphisms.
Rational gamma(const SeamDescriptor& seam, const Rational& y);
Rational gamma_inverse(const SeamDescriptor& seam, const Rational& x);

/// Generic form of gamma on bare intervals.
Rational transfer(const Interval& from, const Interval& to, bool reversed, const Rational& t);

}  // namespace stripes
