#pragma once

#include <stdexcept>
#include <string>

namespace greenwalk {

// Typed failure reasons. Values are stable: the C API exposes them verbatim.
enum class errc : int {
    ok = 0,
    outside_domain = 1,
    singular_at_source = 2,
    degenerate_transform = 3,
    unsupported_map = 4,
    non_converged = 5,
    step_too_coarse = 6,
    biased_window = 7,
    source_image = 8,
    pole_in_parameters = 9,
    nonpositive_time = 10,
    source_point = 11,
    origin_excluded = 12,
    invalid_argument = 13,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) {
    throw Error(code, what);
}

} // namespace greenwalk
