#ifndef HEUNHK_ERRORS_HPP
#define HEUNHK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace heunhk {

/// Base of every error thrown by this library.
class error : public std::runtime_error {
public:
    error(std::string kind, const std::string &msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string &kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// The input data itself is unusable (CLI exit code 2).
class validation_error : public error {
    using error::error;
};

/// The computation ran but a numeric tolerance was breached (CLI exit code 3).
class numeric_error : public error {
    using error::error;
};

#define HEUNHK_VALIDATION_ERROR(name)                                          \
    class name : public validation_error {                                     \
    public:                                                                    \
        explicit name(const std::string &msg) : validation_error(#name, msg) {}\
    }

#define HEUNHK_NUMERIC_ERROR(name)                                             \
    class name : public numeric_error {                                        \
    public:                                                                    \
        explicit name(const std::string &msg) : numeric_error(#name, msg) {}   \
    }

HEUNHK_VALIDATION_ERROR(degenerate_lattice);
HEUNHK_VALIDATION_ERROR(pole_proximity);
HEUNHK_VALIDATION_ERROR(alpha_on_lattice);
HEUNHK_VALIDATION_ERROR(singular_collision);
HEUNHK_VALIDATION_ERROR(insufficient_coefficients);
HEUNHK_VALIDATION_ERROR(not_apparent);
HEUNHK_VALIDATION_ERROR(degenerate_selector);
HEUNHK_VALIDATION_ERROR(denominator_zero);
HEUNHK_VALIDATION_ERROR(stencil_through_singularity);

HEUNHK_NUMERIC_ERROR(no_convergence);
HEUNHK_NUMERIC_ERROR(empty_nullspace);
HEUNHK_NUMERIC_ERROR(non_constant_q);
HEUNHK_NUMERIC_ERROR(path_through_singularity);
HEUNHK_NUMERIC_ERROR(branch_tracking_lost);
HEUNHK_NUMERIC_ERROR(fit_residual_too_large);
HEUNHK_NUMERIC_ERROR(root_conditioning);
HEUNHK_NUMERIC_ERROR(branch_jump);
HEUNHK_NUMERIC_ERROR(degree_detection_failed);

#undef HEUNHK_VALIDATION_ERROR
#undef HEUNHK_NUMERIC_ERROR

} // namespace heunhk

#endif
