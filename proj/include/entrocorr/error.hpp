#ifndef ENTROCORR_ERROR_HPP
#define ENTROCORR_ERROR_HPP

#include <cstdio>
#include <stdexcept>
#include <string>

namespace entrocorr {

namespace detail {

// Short scientific rendering for diagnostics; std::to_string would print
// tiny values as 0.000000.
inline std::string fmt_g(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

enum class errc {
    negative_mass,
    zero_total,
    not_normalized,
    empty_shape,
    shape_mismatch,
    zero_total_weight,
    domain_error,
    non_positive_tolerance,
    infeasible_target,
    no_convergence,
    parse_error,
    empty_input,
    negative_pseudocount,
    non_ascending_bin_counts,
    io_error,
    internal_error,
};

inline const char* to_string(errc c) noexcept
{
    switch (c) {
        case errc::negative_mass:            return "negative_mass";
        case errc::zero_total:               return "zero_total";
        case errc::not_normalized:           return "not_normalized";
        case errc::empty_shape:              return "empty_shape";
        case errc::shape_mismatch:           return "shape_mismatch";
        case errc::zero_total_weight:        return "zero_total_weight";
        case errc::domain_error:             return "domain_error";
        case errc::non_positive_tolerance:   return "non_positive_tolerance";
        case errc::infeasible_target:        return "infeasible_target";
        case errc::no_convergence:           return "no_convergence";
        case errc::parse_error:              return "parse_error";
        case errc::empty_input:              return "empty_input";
        case errc::negative_pseudocount:     return "negative_pseudocount";
        case errc::non_ascending_bin_counts: return "non_ascending_bin_counts";
        case errc::io_error:                 return "io_error";
        case errc::internal_error:           return "internal_error";
    }
    return "unknown";
}

/// Single exception type for the whole library; the code tells callers
/// which contract was violated.
class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what)
{
    throw Error(code, what);
}

}  // namespace entrocorr

#endif  // ENTROCORR_ERROR_HPP
