#pragma once

#include <cstddef>

namespace stripes {

/// A slice of input text; line and column are 1-based, length in bytes.
struct SourceSpan {
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t length = 0;
    std::size_t offset = 0;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

}  // namespace stripes
