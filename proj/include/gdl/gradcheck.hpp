#pragma once

#include <array>
#include <cstdint>

#include "gdl/model.hpp"

namespace gdl {

struct GradCheckOptions {
    int image_size = 32;
    double sigma = 25.0;
    double fd_step = 1e-6;
    double rel_tol = 1e-5;
    // Allowance for central-difference roundoff: differencing a double-
    // precision loss of magnitude ~1e2 at step 1e-6 carries absolute noise
    // around |loss| * 1e-14 / fd_step ~ 1e-6, independent of the gradient.
    double abs_floor = 2e-6;
    long budget = 20000;  // refuse K * M * P^2 above this
};

struct GradCheckReport {
    bool pass = false;
    int coords = 0;
    // score_i = |analytic - fd| / max(|analytic|, |fd|, abs_floor / rel_tol);
    // a coordinate passes iff score_i <= rel_tol
    double worst_score = 0.0;
    size_t worst_coord = 0;
    // worst score per family: alpha, a, omega0, psi, tau0, tau1
    std::array<double, 6> family_worst{};
    // when any family is tied: max |tied grad - sum of untied per-layer
    // grads| over tied coordinates, relative to max(1, |sum|)
    double tie_sum_err = 0.0;
    bool checked_ties = false;
};

/// Per-coordinate pass rule shared by the checker and its tests.
bool fd_coord_pass(double analytic, double fd, double rel_tol, double abs_floor);
double fd_coord_score(double analytic, double fd, double rel_tol, double abs_floor);

/// Central finite differences of the squared-error loss on one random
/// instance (clean image, AWGN at opt.sigma) against the reverse-mode
/// gradient, every learnable coordinate. Filterbanks are re-realized for
/// every perturbed evaluation.
GradCheckReport gradcheck(const ArchConfig& arch, uint64_t seed, const GradCheckOptions& opt);

}  // namespace gdl
