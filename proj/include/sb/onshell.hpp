#ifndef SB_ONSHELL_HPP
#define SB_ONSHELL_HPP

#include "sb/bethe.hpp"
#include "sb/lattice.hpp"

namespace sb {

/// One candidate root of the Bethe equations on the float backend.
struct BetheSolution {
    BetheData data;
    double residual_norm = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Left minus right of every Bethe equation at the given data, a()+b()
/// entries: first the u-equations
///   lambda_2(u_j)/lambda_1(u_j) - f_[1](u-bar_j, u_j) / f_[2](u_j, u-bar_j)
///     / f_[2](v-bar, u_j),
/// then the v-equations
///   lambda_3(v_j)/lambda_2(v_j) - f_[2](v_j, u-bar) f_[2](v-bar_j, v_j)
///     / f_[3](v_j, v-bar_j),
/// with f_[k] = f for even k, argument-swapped f for odd k.
std::vector<Scalar> bethe_residuals(const Family& fam, const BetheData& d);

/// Transfer-matrix eigenvalue at z for on-shell data:
/// (-1)^[1] lambda_1(z) f_[1](u-bar, z)
///   + (-1)^[2] lambda_2(z) f_[2](z, u-bar) f_[2](v-bar, z)
///   + (-1)^[3] lambda_3(z) f_[3](z, v-bar).
Scalar tau_eigenvalue(const Family& fam, const Scalar& z, const BetheData& d);

/// Newton search for Bethe roots on the float backend: numeric Jacobian
/// by central differences (step 1e-6), at most 200 iterations per
/// attempt, seeded random restarts in a disk of radius max|z_k| + 5.
/// Returns the deduplicated converged solutions (roots whose parameter
/// sets match up to ordering within 1e-8 are merged; solutions with
/// coincident parameters inside one set are discarded).
std::vector<BetheSolution> solve_bethe(const ChainFamily& fam, std::size_t a,
                                       std::size_t b, int attempts,
                                       double tol = 1e-12, unsigned seed = 1);

struct OnshellReport {
    double ratio = 0.0;  // max_z |t(z) Phi - tau(z) Phi| / |Phi|
    bool pass = false;
};

/// Eigenvector check of the vector built from the solution, at the
/// given spectral-parameter samples.
OnshellReport verify_onshell(const ChainFamily& fam, const BetheSolution& sol,
                             const std::vector<Scalar>& z_samples,
                             double tol = 1e-8);

}  // namespace sb

#endif
