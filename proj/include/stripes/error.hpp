#pragma once

#include <stdexcept>
#include <string>

namespace stripes {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define STRIPES_DEFINE_ERROR(Name)                 \
    class Name : public Error {                    \
    public:                                        \
        explicit Name(const std::string& what)     \
            : Error(#Name ": " + what) {}          \
    }

STRIPES_DEFINE_ERROR(InvalidAtlas);
STRIPES_DEFINE_ERROR(ResolutionError);
STRIPES_DEFINE_ERROR(OutOfInterval);
STRIPES_DEFINE_ERROR(BadParameter);
STRIPES_DEFINE_ERROR(TooLarge);
STRIPES_DEFINE_ERROR(MalformedWord);
STRIPES_DEFINE_ERROR(EndpointMismatch);
STRIPES_DEFINE_ERROR(BasepointsMissComponent);
STRIPES_DEFINE_ERROR(IdCollision);
STRIPES_DEFINE_ERROR(IllFormedMap);
STRIPES_DEFINE_ERROR(UnsupportedConfiguration);
STRIPES_DEFINE_ERROR(ReportMismatch);
STRIPES_DEFINE_ERROR(BadLevel);
STRIPES_DEFINE_ERROR(UnknownLeaf);

#undef STRIPES_DEFINE_ERROR

}  // namespace stripes
