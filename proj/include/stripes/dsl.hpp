#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stripes/atlas.hpp"
#include "stripes/source_span.hpp"

namespace stripes {

struct ParseError {
    SourceSpan span;
    std::string message;                 // "in <production>: ..."
    std::vector<std::string> expected;   // token classes, may be empty
};

struct ParseResult {
    std::optional<StripedAtlas> atlas;   // set iff errors is empty
    std::vector<ParseError> errors;

    bool ok() const { return atlas.has_value(); }
};

/// Parses the .stripe text format. Total: never throws on any input.
///
///   atlas    := item*
///   item     := strip | glue | family
///   strip    := "strip" IDENT "{" side* "}"
///   side     := ("top" | "bottom") ":" (ivlist | "none") ";"
///   ivlist   := interval ("," interval)*
///   interval := "(" ep "," ep ")"
///   ep       := "-inf" | "+inf" | expr          expr over n: a + b*n, a + b*(r)^n
///   glue     := "glue" IDENT ":" iref "~" iref ["reversed"] ";"
///   iref     := IDENT "." ("top" | "bottom") "[" index "]"
///   index    := INT | INT ":" member | member  member: INT | VAR | VAR (+|-) INT
///   family   := "family" IDENT "in" "Z" "{" glue* "}"
///
/// An index `i` names explicit interval i of the side; `k:m` names member m
/// of interval family k; a bare `n+c` names a member of the side's only
/// family. The `;` before a closing `}` may be omitted.
ParseResult parse(std::string_view text);

/// Canonical text; byte-deterministic. Strips and gluings are sorted by id,
/// family gluings grouped by their index variable.
std::string serialize(const StripedAtlas& atlas);

/// "name:line:col: message (expected ...)"
std::string format_error(const ParseError& error, std::string_view source_name);

}  // namespace stripes
