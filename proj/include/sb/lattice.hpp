#ifndef SB_LATTICE_HPP
#define SB_LATTICE_HPP

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "sb/graded.hpp"
#include "sb/kernels.hpp"

namespace sb {

struct TwistedModelError : std::logic_error {
    explicit TwistedModelError(const std::string& what) : std::logic_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Inhomogeneous fundamental chain with a diagonal twist.
struct ModelSpec {
    Grading grading;
    int L = 1;
    ParamSet z;                  // inhomogeneities, pairwise distinct
    std::vector<Scalar> kappa;   // twist, m+n nonzero entries
    Scalar c;

    ModelSpec(Grading g, int sites, ParamSet inhom, std::vector<Scalar> twist,
              Scalar constant);

    Backend backend() const { return c.backend(); }
    bool untwisted() const;

    static ModelSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static ModelSpec load(const std::string& path);
};

/// Scalar <-> JSON: rationals as "p/q" strings, complex as [re, im].
Scalar scalar_from_json(const nlohmann::json& j, Backend backend);
nlohmann::json scalar_to_json(const Scalar& s);

/// A concrete highest-weight realization of the algebra: monodromy
/// entries T_ij(u) as operators on a physical space, weights, and the
/// action of the full auxiliary-row monodromy on larger tensor spaces.
class Family {
public:
    virtual ~Family() = default;

    virtual const Grading& grading() const = 0;
    virtual const GradedSpace& space() const = 0;  // physical space
    virtual const Scalar& c() const = 0;
    Backend backend() const { return c().backend(); }

    /// T_ij(u) on the physical space; homogeneous of parity [i]+[j].
    virtual const GradedMatrix& entry(int i, int j, const Scalar& u) const = 0;
    /// lambda_j(u): eigenvalue of T_jj(u) on Omega.
    virtual Scalar weight(int j, const Scalar& u) const = 0;

    GradedVector omega() const;       // highest weight vector e_1 x ... x e_1
    GradedVector omega_dual() const;  // its covector

    /// Apply T(w), read as a matrix over aux factor `aux` of `big`
    /// (the physical block starts at factor phys_start), to a vector
    /// or covector on `big`. Default: assemble sum_ij E_ij^(aux) T_ij.
    virtual GradedVector apply_T(const GradedSpace& big, std::size_t aux,
                                 std::size_t phys_start, const Scalar& w,
                                 const GradedVector& vec) const;
};

/// Apply an operator supported on the trailing factor block [first..end)
/// with the graded crossing sign for its parity over the leading factors.
GradedVector apply_block(const GradedSpace& big, std::size_t first,
                         const GradedMatrix& op, int op_parity,
                         const GradedVector& vec);

class ChainFamily : public Family {
public:
    explicit ChainFamily(ModelSpec spec);

    const ModelSpec& model() const { return spec_; }
    const Grading& grading() const override { return spec_.grading; }
    const GradedSpace& space() const override { return phys_; }
    const Scalar& c() const override { return spec_.c; }

    const GradedMatrix& entry(int i, int j, const Scalar& u) const override;
    Scalar weight(int j, const Scalar& u) const override;

    /// R-matrix product route, O(L dim) per call.
    GradedVector apply_T(const GradedSpace& big, std::size_t aux,
                         std::size_t phys_start, const Scalar& w,
                         const GradedVector& vec) const override;

    /// t(u) = str T(u) = sum (-1)^[j] T_jj(u).
    GradedMatrix transfer(const Scalar& u) const;
    /// T^(0)_ij = (-1)^[j] sum_k E_ji^(k); untwisted models only.
    GradedMatrix zero_mode(int i, int j) const;

private:
    ModelSpec spec_;
    GradedSpace phys_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::string, std::vector<GradedMatrix>> cache_;  // key: u, 9 entries
    const std::vector<GradedMatrix>& entries_at(const Scalar& u) const;
};

/// R(u,v) = I + g(u,v) P on the two-factor space.
GradedMatrix build_R(const Grading& g, const Scalar& u, const Scalar& v,
                     const Scalar& c);

struct ResidualReport {
    double max_abs = 0.0;
    bool exact_zero = true;
    void record(const Scalar& s);
    void merge(const ResidualReport& o);
};

/// Yang-Baxter, unitarity and symmetry residuals of R at one point triple.
ResidualReport verify_R_axioms(const Grading& g, const Scalar& u, const Scalar& v,
                               const Scalar& w, const Scalar& c);

/// RTT residual R_12 T_1 T_2 - T_2 T_1 R_12 on [aux, aux, sites...].
ResidualReport verify_rtt(const Family& fam, const Scalar& u, const Scalar& v);

}  // namespace sb

#endif
