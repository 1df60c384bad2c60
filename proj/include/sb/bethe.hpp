#ifndef SB_BETHE_HPP
#define SB_BETHE_HPP

#include "sb/expr.hpp"

namespace sb {

struct SizeGuard : std::length_error {
    explicit SizeGuard(const std::string& what) : std::length_error(what) {}
};

struct SizeMismatch : std::invalid_argument {
    explicit SizeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// Bethe parameters: a = #u creation parameters for the 12-sector,
/// b = #v for the 23-sector.
struct BetheData {
    ParamSet u, v;
    std::size_t a() const { return u.size(); }
    std::size_t b() const { return v.size(); }
};

/// All splittings of `set` into labeled blocks of the given sizes, each
/// block keeping the original parameter order. Deterministic
/// (lexicographic choice of index subsets, first block outermost).
std::vector<std::vector<ParamSet>> enumerate_partitions(
    const ParamSet& set, const std::vector<std::size_t>& block_sizes);

/// Order of the elementary-matrix word inside the trace formula. The
/// two printed orders differ by the exchange signs of the odd factors,
/// compensated in the scalar prefactor.
enum class TraceOrder { Natural, Reversed };

/// Which of the two recursion relations drives the build: peeling the
/// first u parameter (12-sector) or the first v parameter (23-sector).
enum class RecRule { PeelU, PeelV };

/// Which explicit partition-sum form: X carries the same-set h-product,
/// Y carries the Izergin-type kernel.
enum class ExplForm { X, Y };

/// Dual recursions peel from the last parameter.
enum class DualRecRule { PeelU21, PeelV32 };

enum class CommRule { T12ThroughT13, T23ThroughT13 };

/// Bethe vector from the trace formula: supertrace over a+b auxiliary
/// copies of the monodromy product, the ordered R-product coupling the
/// v-aux spaces to the u-aux spaces, and the lowering-word insertion.
/// The family's grading selects the (2|1) or (1|2) normalization.
GradedVector bv_supertrace(const Family& fam, const BetheData& d,
                           TraceOrder order = TraceOrder::Natural);

/// Tarasov-Varchenko variant: full ordered R-product over all pairs of
/// auxiliary spaces, no normalization. Related to bv_supertrace by a
/// scalar prefactor and conjugation of the parameter sets.
GradedVector bv_tv(const Family& fam, const BetheData& d);

/// Bethe vector by full recursion unwinding; base cases are the pure
/// product states.
GradedVector bv_recursive(const Family& fam, const BetheData& d, RecRule rule);

/// Symbolic partition-sum expression for the Bethe vector (weights kept
/// symbolic so the algebra morphisms can act on it).
Expr bv_explicit_expr(AlgebraTag tag, const BetheData& d, const Scalar& c,
                      ExplForm form);
std::pair<Expr, GradedVector> bv_explicit(const Family& fam, const BetheData& d,
                                          ExplForm form);

/// Dual Bethe vector (left module) from the trace formula.
GradedVector dual_supertrace(const Family& fam, const BetheData& d);
GradedVector dual_recursive(const Family& fam, const BetheData& d, DualRecRule rule);
Expr dual_explicit_expr(AlgebraTag tag, const BetheData& d, const Scalar& c,
                        ExplForm form);
std::pair<Expr, GradedVector> dual_explicit(const Family& fam, const BetheData& d,
                                            ExplForm form);

/// The operator-level partition sums (the Bethe vector before hitting
/// the highest weight vector); (2|1) grading only.
GradedMatrix operator_XY(const Family& fam, const BetheData& d, ExplForm form);

/// Left minus right of the multiple-commutation identity moving T_12(v)
/// (or T_23(v)) through the normalized T_13 string; exactly zero.
GradedMatrix commutation_residual(const Family& fam, const Scalar& v,
                                  const ParamSet& u, CommRule which);

}  // namespace sb

#endif
