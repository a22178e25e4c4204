#include "stripes/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <set>
#include <sstream>

namespace stripes {

namespace {

constexpr std::size_t kMaxErrors = 64;
constexpr std::int64_t kMaxIndexOffset = 1'000'000'000'000LL;
constexpr std::size_t kShorthandFamily = std::numeric_limits<std::size_t>::max();

// ---------------------------------------------------------------------------
// Lexer

enum class Tok : std::uint8_t { Ident, Number, Punct, End, Invalid };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceSpan span;
};

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    std::size_t line = 1;
    std::size_t col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.span = {line, col, 1, i};
        std::size_t len = 1;
        if (is_ident_start(c)) {
            while (i + len < text.size() && is_ident_char(text[i + len])) ++len;
            t.kind = Tok::Ident;
        } else if (is_digit(c)) {
            while (i + len < text.size() && is_digit(text[i + len])) ++len;
            t.kind = Tok::Number;
        } else if (std::string_view("{}()[]:;,.~+-*/^").find(c) != std::string_view::npos) {
            t.kind = Tok::Punct;
        } else {
            t.kind = Tok::Invalid;
        }
        t.text = std::string(text.substr(i, len));
        t.span.length = len;
        out.push_back(std::move(t));
        advance(len);
    }
    Token end;
    end.kind = Tok::End;
    end.span = {line, col, 0, text.size()};
    out.push_back(std::move(end));
    return out;
}

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::End: return "end of input";
        case Tok::Invalid: {
            const auto byte = static_cast<unsigned char>(t.text.front());
            if (byte >= 0x20 && byte < 0x7f) return "invalid character '" + t.text + "'";
            std::ostringstream os;
            os << "invalid byte 0x" << std::hex << static_cast<int>(byte);
            return os.str();
        }
        default: return "'" + t.text + "'";
    }
}

// ---------------------------------------------------------------------------
// Endpoint expressions

struct Poly {
    Rational constant{0};
    Rational affine{0};
    Rational geometric{0};
    std::optional<Rational> ratio;
    bool uses_affine = false;
    bool uses_geometric = false;
};

struct Endpoint {
    bool infinite = false;
    ExtendedRational inf_value;
    Poly poly;
    bool depends_on_n() const { return !infinite && (poly.uses_affine || poly.uses_geometric); }
};

struct SyntaxFailure {};

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text), toks_(lex(text)) {}

    ParseResult run() {
        while (!at_end()) {
            if (errors_.size() >= kMaxErrors) break;
            const std::size_t before = pos_;
            try {
                parse_item(/*in_family=*/false);
            } catch (const SyntaxFailure&) {
                recover(before);
            }
        }
        if (errors_.empty()) resolve();

        ParseResult result;
        result.errors = std::move(errors_);
        if (result.errors.empty()) result.atlas = std::move(atlas_);
        return result;
    }

private:
    // -- token helpers ------------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    bool at_end() const { return peek().kind == Tok::End; }
    bool is_punct(char c, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Punct && t.text[0] == c;
    }
    bool is_word(std::string_view w, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Ident && t.text == w;
    }
    const Token& take() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }

    [[noreturn]] void fail(const std::string& production, std::vector<std::string> expected) {
        std::string msg = "in " + production + ": expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i != 0) msg += i + 1 == expected.size() ? " or " : ", ";
            msg += expected[i];
        }
        msg += ", found " + describe(peek());
        error(peek().span, std::move(msg), std::move(expected));
        throw SyntaxFailure{};
    }

    [[noreturn]] void fail_at(const SourceSpan& span, std::string message) {
        error(span, std::move(message), {});
        throw SyntaxFailure{};
    }

    void error(SourceSpan span, std::string message, std::vector<std::string> expected) {
        // Spans at end of input are moved onto the last byte.
        if (!text_.empty() && span.offset >= text_.size()) {
            span.offset = text_.size() - 1;
            span.length = 1;
            span.line = static_cast<std::size_t>(
                            std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(span.offset), '\n')) + 1;
            span.column = column_of(span.offset);
        }
        errors_.push_back({span, std::move(message), std::move(expected)});
    }

    std::size_t column_of(std::size_t offset) const {
        const auto nl = offset == 0 ? std::string_view::npos : text_.rfind('\n', offset - 1);
        return nl == std::string_view::npos ? offset + 1 : offset - nl;
    }

    void expect_punct(char c, const std::string& production) {
        if (!is_punct(c)) fail(production, {std::string("'") + c + "'"});
        take();
    }
    void expect_word(std::string_view w, const std::string& production) {
        if (!is_word(w)) fail(production, {"'" + std::string(w) + "'"});
        take();
    }
    const Token& expect_ident(const std::string& production) {
        if (peek().kind != Tok::Ident) fail(production, {"identifier"});
        return take();
    }

    static SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
        SourceSpan s = a;
        if (b.line == a.line && b.offset + b.length >= a.offset) s.length = b.offset + b.length - a.offset;
        return s;
    }
    const SourceSpan& prev_span() const { return toks_[pos_ == 0 ? 0 : pos_ - 1].span; }

    void recover(std::size_t before) {
        if (pos_ == before) take();
        while (!at_end()) {
            if (is_punct(';') || is_punct('}')) {
                take();
                return;
            }
            if (is_word("strip") || is_word("glue") || is_word("family")) return;
            take();
        }
    }

    // -- items ---------------------------------------------------------------

    void parse_item(bool in_family) {
        if (is_word("strip")) {
            if (in_family) fail_at(peek().span, "in family: strips may not be declared inside a family");
            parse_strip();
        } else if (is_word("glue")) {
            parse_glue();
        } else if (is_word("family")) {
            if (in_family) fail_at(peek().span, "in family: nested families are not supported");
            parse_family();
        } else {
            fail("item", {"'strip'", "'glue'", "'family'"});
        }
    }

    void parse_strip() {
        const SourceSpan start = take().span;
        const Token& name = expect_ident("strip");
        ModelStrip strip;
        strip.id = name.text;
        const SourceSpan name_span = name.span;
        expect_punct('{', "strip");
        std::set<std::string> seen;
        while (!is_punct('}')) {
            if (at_end()) fail("strip", {"'top'", "'bottom'", "'}'"});
            const std::size_t before = pos_;
            try {
                parse_side(strip, seen);
            } catch (const SyntaxFailure&) {
                if (errors_.size() >= kMaxErrors) throw;
                if (pos_ == before) take();
                while (!at_end() && !is_punct(';') && !is_punct('}')) {
                    if (is_word("strip") || is_word("glue") || is_word("family")) throw;
                    take();
                }
                if (is_punct(';')) take();
            }
        }
        take();
        if (atlas_.strips.count(strip.id) != 0) {
            error(name_span, "in strip: duplicate strip id '" + strip.id + "'", {});
            return;
        }
        atlas_.spans["strip:" + strip.id] = join(start, prev_span());
        for (auto& [key, span] : pending_spans_) atlas_.spans[key] = span;
        pending_spans_.clear();
        atlas_.strips.emplace(strip.id, std::move(strip));
    }

    void parse_side(ModelStrip& strip, std::set<std::string>& seen) {
        if (!is_word("top") && !is_word("bottom")) fail("side", {"'top'", "'bottom'", "'}'"});
        const Token& kw = take();
        const Side side = kw.text == "top" ? Side::Top : Side::Bottom;
        if (!seen.insert(kw.text).second) fail_at(kw.span, "in side: side '" + kw.text + "' declared twice");
        expect_punct(':', "side");
        SideSpec& spec = strip.side(side);
        spec = {};
        if (is_word("none")) {
            take();
        } else {
            parse_interval(strip.id, side, spec);
            while (is_punct(',')) {
                take();
                parse_interval(strip.id, side, spec);
            }
        }
        if (is_punct(';')) {
            take();
        } else if (!is_punct('}')) {
            fail("side", {"','", "';'"});
        }
    }

    void parse_interval(const std::string& strip, Side side, SideSpec& spec) {
        const SourceSpan start = peek().span;
        expect_punct('(', "interval");
        const Endpoint lo = parse_endpoint();
        expect_punct(',', "interval");
        const Endpoint hi = parse_endpoint();
        expect_punct(')', "interval");
        const SourceSpan span = join(start, prev_span());
        const std::string side_key = strip + ":" + side_name(side);

        if (!lo.depends_on_n() && !hi.depends_on_n()) {
            Interval iv{lo.infinite ? lo.inf_value : ExtendedRational(lo.poly.constant),
                        hi.infinite ? hi.inf_value : ExtendedRational(hi.poly.constant)};
            if (!iv.well_formed()) fail_at(span, "in interval: lower endpoint must be less than upper endpoint");
            pending_spans_["interval:" + side_key + ":" + std::to_string(spec.intervals.size())] = span;
            spec.intervals.push_back(std::move(iv));
            return;
        }
        if (lo.infinite || hi.infinite) {
            fail_at(span, "in interval: a family interval may not have an infinite endpoint");
        }
        const bool geometric = lo.poly.uses_geometric || hi.poly.uses_geometric;
        if (geometric && (lo.poly.uses_affine || hi.poly.uses_affine)) {
            fail_at(span, "in interval: affine and geometric terms may not be mixed");
        }
        IntervalFamily fam;
        fam.kind = geometric ? IntervalFamily::Kind::Geometric : IntervalFamily::Kind::Affine;
        fam.lo_base = lo.poly.constant;
        fam.hi_base = hi.poly.constant;
        if (geometric) {
            if (lo.poly.ratio && hi.poly.ratio && *lo.poly.ratio != *hi.poly.ratio) {
                fail_at(span, "in interval: both endpoints must use the same ratio");
            }
            fam.ratio = lo.poly.ratio ? *lo.poly.ratio : *hi.poly.ratio;
            fam.lo_coeff = lo.poly.geometric;
            fam.hi_coeff = hi.poly.geometric;
        } else {
            fam.lo_coeff = lo.poly.affine;
            fam.hi_coeff = hi.poly.affine;
        }
        pending_spans_["family:" + side_key + ":" + std::to_string(spec.families.size())] = span;
        spec.families.push_back(std::move(fam));
    }

    Rational parse_unsigned_rational(const std::string& production) {
        if (peek().kind != Tok::Number) fail(production, {"rational"});
        std::string text = take().text;
        if (is_punct('/') && peek(1).kind == Tok::Number) {
            take();
            text += "/" + take().text;
        }
        const auto r = parse_rational(text);
        if (!r) fail_at(prev_span(), "in " + production + ": zero denominator");
        return *r;
    }

    Rational parse_signed_rational(const std::string& production) {
        bool negative = false;
        if (is_punct('-') || is_punct('+')) negative = take().text == "-";
        Rational r = parse_unsigned_rational(production);
        return negative ? Rational(-r) : r;
    }

    Endpoint parse_endpoint() {
        Endpoint ep;
        if ((is_punct('-') || is_punct('+')) && is_word("inf", 1)) {
            const bool neg = take().text == "-";
            take();
            ep.infinite = true;
            ep.inf_value = neg ? ExtendedRational::neg_inf() : ExtendedRational::pos_inf();
            return ep;
        }
        bool first = true;
        while (true) {
            bool negative = false;
            if (is_punct('-') || is_punct('+')) {
                negative = take().text == "-";
            } else if (!first) {
                break;
            }
            parse_term(ep.poly, negative);
            first = false;
        }
        return ep;
    }

    void parse_term(Poly& poly, bool negative) {
        Rational coeff{1};
        bool has_coeff = false;
        if (peek().kind == Tok::Number) {
            coeff = parse_unsigned_rational("endpoint");
            has_coeff = true;
            if (!is_punct('*')) {
                poly.constant += negative ? Rational(-coeff) : coeff;
                return;
            }
            take();
        }
        if (negative) coeff = -coeff;
        if (is_word("n")) {
            take();
            poly.affine += coeff;
            poly.uses_affine = true;
            return;
        }
        if (is_punct('(')) {
            const SourceSpan span = take().span;
            const Rational r = parse_signed_rational("endpoint");
            expect_punct(')', "endpoint");
            expect_punct('^', "endpoint");
            expect_word("n", "endpoint");
            if (r == 0 || boost::multiprecision::abs(r) >= 1) {
                fail_at(join(span, prev_span()), "in endpoint: geometric ratio must satisfy 0 < |r| < 1");
            }
            if (poly.ratio && *poly.ratio != r) {
                fail_at(join(span, prev_span()), "in endpoint: all geometric terms must share one ratio");
            }
            poly.ratio = r;
            poly.geometric += coeff;
            poly.uses_geometric = true;
            return;
        }
        if (has_coeff) fail("endpoint", {"'n'", "'('"});
        fail("endpoint", {"rational", "'n'", "'('", "'-inf'", "'+inf'"});
    }

    void parse_glue() {
        const SourceSpan start = take().span;
        const Token& name = expect_ident("glue");
        const std::string id = name.text;
        const SourceSpan name_span = name.span;
        expect_punct(':', "glue");
        Gluing g;
        g.id = id;
        g.family_variable = family_var_;
        PendingRef px;
        PendingRef py;
        g.x = parse_iref(px);
        expect_punct('~', "glue");
        g.y = parse_iref(py);
        if (is_word("reversed")) {
            take();
            g.reversed = true;
        }
        if (is_punct(';')) {
            take();
        } else if (!is_punct('}')) {
            fail("glue", {"'reversed'", "';'"});
        }
        if (atlas_.gluings.count(id) != 0) {
            error(name_span, "in glue: duplicate gluing id '" + id + "'", {});
            return;
        }
        px.glue = py.glue = id;
        px.first = true;
        if (px.shorthand) shorthand_.push_back(px);
        if (py.shorthand) shorthand_.push_back(py);
        atlas_.spans["glue:" + id] = join(start, prev_span());
        atlas_.gluings.emplace(id, std::move(g));
    }

    struct PendingRef {
        std::string glue;
        bool first = false;
        bool shorthand = false;
        SourceSpan span;
    };

    std::int64_t parse_int64(const std::string& production) {
        bool negative = false;
        if (is_punct('-') || is_punct('+')) negative = take().text == "-";
        if (peek().kind != Tok::Number) fail(production, {"integer"});
        const Token& t = take();
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || v > kMaxIndexOffset) fail_at(t.span, "in " + production + ": integer out of range");
        return negative ? -v : v;
    }

    IndexExpr parse_member() {
        IndexExpr e;
        if (peek().kind == Tok::Ident) {
            const Token& var = take();
            if (!family_var_) fail_at(var.span, "in index: variable '" + var.text + "' used outside a family");
            if (var.text != *family_var_) {
                fail_at(var.span, "in index: unknown variable '" + var.text + "' (family variable is '" +
                                      *family_var_ + "')");
            }
            e.uses_variable = true;
            if (is_punct('+') || is_punct('-')) e.offset = parse_int64("index");
            return e;
        }
        e.offset = parse_int64("index");
        return e;
    }

    BoundaryRef parse_iref(PendingRef& pending) {
        const SourceSpan start = peek().span;
        BoundaryRef ref;
        ref.strip = expect_ident("reference").text;
        expect_punct('.', "reference");
        if (!is_word("top") && !is_word("bottom")) fail("reference", {"'top'", "'bottom'"});
        ref.side = take().text == "top" ? Side::Top : Side::Bottom;
        expect_punct('[', "reference");
        if (peek().kind == Tok::Number && is_punct(':', 1)) {
            const std::int64_t slot = parse_int64("index");
            take();
            ref.which = FamilyMember{static_cast<std::size_t>(slot), parse_member()};
        } else if (peek().kind == Tok::Number && is_punct(']', 1)) {
            ref.which = ExplicitIndex{static_cast<std::size_t>(parse_int64("index"))};
        } else if (peek().kind == Tok::Ident) {
            ref.which = FamilyMember{kShorthandFamily, parse_member()};
            pending.shorthand = true;
        } else {
            fail("index", {"interval index", "family member"});
        }
        expect_punct(']', "reference");
        pending.span = join(start, prev_span());
        return ref;
    }

    void parse_family() {
        take();
        const Token& var = expect_ident("family");
        const std::string name = var.text;
        expect_word("in", "family");
        expect_word("Z", "family");
        expect_punct('{', "family");
        family_var_ = name;
        struct Reset {
            std::optional<std::string>& v;
            ~Reset() { v.reset(); }
        } reset{family_var_};
        while (!is_punct('}')) {
            if (at_end()) fail("family", {"'glue'", "'}'"});
            if (errors_.size() >= kMaxErrors) throw SyntaxFailure{};
            const std::size_t before = pos_;
            try {
                parse_item(/*in_family=*/true);
            } catch (const SyntaxFailure&) {
                if (pos_ == before) take();
                while (!at_end() && !is_punct(';') && !is_punct('}')) take();
                if (is_punct(';')) take();
            }
        }
        take();
    }

    // -- resolution ----------------------------------------------------------

    void resolve() {
        for (const PendingRef& p : shorthand_) {
            Gluing& g = atlas_.gluings.at(p.glue);
            BoundaryRef& ref = p.first ? g.x : g.y;
            const auto it = atlas_.strips.find(ref.strip);
            if (it == atlas_.strips.end()) continue;  // reported below
            const std::size_t count = it->second.side(ref.side).families.size();
            if (count != 1) {
                error(p.span,
                      "in reference: shorthand member index needs exactly one interval family on " +
                          ref.strip + "." + side_name(ref.side) + " (found " + std::to_string(count) +
                          "); use k:member",
                      {});
                continue;
            }
            std::get<FamilyMember>(ref.which).family = 0;
        }
        if (!errors_.empty()) return;
        for (const StructureIssue& issue : check_structure(atlas_)) {
            const auto it = atlas_.spans.find(issue.location);
            const SourceSpan span = it != atlas_.spans.end() ? it->second : SourceSpan{};
            error(span, "in resolution: " + issue.location + ": " + issue.message, {});
        }
    }

    std::string_view text_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<ParseError> errors_;
    StripedAtlas atlas_;
    SourceMap pending_spans_;
    std::vector<PendingRef> shorthand_;
    std::optional<std::string> family_var_;
};

// ---------------------------------------------------------------------------
// Serializer

std::string signed_term(const Rational& coeff, const std::string& atom) {
    if (coeff < 0) return " - " + to_string(Rational(-coeff)) + "*" + atom;
    return " + " + to_string(coeff) + "*" + atom;
}

std::string family_endpoint(const IntervalFamily& f, bool lo) {
    const Rational& base = lo ? f.lo_base : f.hi_base;
    const Rational& coeff = lo ? f.lo_coeff : f.hi_coeff;
    const std::string atom = f.kind == IntervalFamily::Kind::Affine ? "n" : "(" + to_string(f.ratio) + ")^n";
    return to_string(base) + signed_term(coeff, atom);
}

std::string index_text(const IndexExpr& e, const std::optional<std::string>& var) {
    if (!e.uses_variable) return std::to_string(e.offset);
    std::string s = var.value_or("n");
    if (e.offset > 0) s += "+" + std::to_string(e.offset);
    if (e.offset < 0) s += std::to_string(e.offset);
    return s;
}

std::string ref_text(const BoundaryRef& r, const std::optional<std::string>& var) {
    std::string s = r.strip + "." + side_name(r.side) + "[";
    if (const auto* e = std::get_if<ExplicitIndex>(&r.which)) {
        s += std::to_string(e->index);
    } else {
        const auto& f = std::get<FamilyMember>(r.which);
        s += std::to_string(f.family) + ":" + index_text(f.member, var);
    }
    return s + "]";
}

std::string glue_text(const Gluing& g) {
    return "glue " + g.id + ": " + ref_text(g.x, g.family_variable) + " ~ " +
           ref_text(g.y, g.family_variable) + (g.reversed ? " reversed" : "") + ";\n";
}

}  // namespace

ParseResult parse(std::string_view text) {
    try {
        return Parser(text).run();
    } catch (const std::exception& e) {
        ParseResult r;
        r.errors.push_back({SourceSpan{}, std::string("in atlas: internal error: ") + e.what(), {}});
        return r;
    }
}

std::string serialize(const StripedAtlas& atlas) {
    std::ostringstream os;
    for (const auto& [id, strip] : atlas.strips) {
        os << "strip " << id << " {\n";
        for (Side side : {Side::Top, Side::Bottom}) {
            const SideSpec& spec = strip.side(side);
            os << "  " << side_name(side) << ": ";
            if (spec.empty()) {
                os << "none;\n";
                continue;
            }
            bool first = true;
            for (const Interval& iv : spec.intervals) {
                os << (first ? "" : ", ") << "(" << to_string(iv.lo) << ", " << to_string(iv.hi) << ")";
                first = false;
            }
            for (const IntervalFamily& f : spec.families) {
                os << (first ? "" : ", ") << "(" << family_endpoint(f, true) << ", "
                   << family_endpoint(f, false) << ")";
                first = false;
            }
            os << ";\n";
        }
        os << "}\n";
    }

    std::map<std::string, std::vector<const Gluing*>> families;
    bool any_plain = false;
    for (const auto& [id, g] : atlas.gluings) {
        if (g.is_family()) {
            families[*g.family_variable].push_back(&g);
            continue;
        }
        if (!any_plain) os << "\n";
        any_plain = true;
        os << glue_text(g);
    }
    for (const auto& [var, list] : families) {
        os << "\nfamily " << var << " in Z {\n";
        for (const Gluing* g : list) os << "  " << glue_text(*g);
        os << "}\n";
    }
    return os.str();
}

std::string format_error(const ParseError& error, std::string_view source_name) {
    std::ostringstream os;
    os << source_name << ":" << error.span.line << ":" << error.span.column << ": " << error.message;
    return os.str();
}

}  // namespace stripes
