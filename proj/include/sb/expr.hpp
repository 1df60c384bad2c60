#ifndef SB_EXPR_HPP
#define SB_EXPR_HPP

#include <map>

#include "sb/lattice.hpp"

namespace sb {

struct TagMismatch : std::invalid_argument {
    explicit TagMismatch(const std::string& what) : std::invalid_argument(what) {}
};

enum class AlgebraTag { Y21, Y12 };

inline Grading algebra_grading(AlgebraTag t) {
    return t == AlgebraTag::Y21 ? Grading(2, 1) : Grading(1, 2);
}

enum class Terminal { OmegaRight, OmegaDaggerLeft };

/// One monodromy-entry letter T_ij(param) (or a tilde letter; the
/// algebra tag lives on the Expr).
struct GenSymbol {
    int i = 1, j = 1;
    Scalar param;
    int parity(const Grading& g) const { return (g.parity(i) + g.parity(j)) % 2; }
};

struct Monomial {
    Scalar coeff;
    std::vector<std::pair<int, Scalar>> lambdas;  // (weight index, param)
    std::vector<GenSymbol> word;
    int word_parity(const Grading& g) const;
};

/// Formal sum of monomials ending on Omega (right module) or starting
/// from Omega-dagger (left module).
class Expr {
public:
    Expr(AlgebraTag tag, Terminal terminal) : tag_(tag), terminal_(terminal) {}

    AlgebraTag tag() const { return tag_; }
    Terminal terminal() const { return terminal_; }
    const std::vector<Monomial>& terms() const { return terms_; }
    void add(Monomial m);
    Expr& operator+=(const Expr& o);
    Expr& operator*=(const Scalar& s);

    nlohmann::json to_json() const;

private:
    AlgebraTag tag_;
    Terminal terminal_;
    std::vector<Monomial> terms_;
};

/// Antimorphism T_ij -> (-1)^{[i][j]+[i]} T_ji: words reverse with the
/// Koszul sign, the terminal flips; lambda factors are untouched.
Expr psi_expr(const Expr& e);
/// Morphism T_ij -> (-1)^{[i][j]+[j]+1} (tilde of T_{j-bar, i-bar}),
/// indices barred as 4-i; lambda_j -> -(tilde lambda)_{4-j}; tag toggles.
Expr phi_expr(const Expr& e);
/// T_ij -> (-1)^{[i]+[j]} T_ij.
Expr gr_expr(const Expr& e);

/// Realize the expression in a concrete family. The family's grading
/// must match the expression's algebra tag.
GradedVector evaluate(const Expr& e, const Family& fam);

/// The image family under the algebra morphism: the tilde entries
/// realized on the same physical space as the base family,
///   (tilde T)_kl(u) = (-1)^{[i][j]+[j]+1} T_ij(u), i = 4-l, j = 4-k,
/// with weights (tilde lambda)_j = -lambda_{4-j}.
class PhiImageFamily : public Family {
public:
    explicit PhiImageFamily(const Family& base);

    const Grading& grading() const override { return grading_; }
    const GradedSpace& space() const override { return base_.space(); }
    const Scalar& c() const override { return base_.c(); }
    const GradedMatrix& entry(int i, int j, const Scalar& u) const override;
    Scalar weight(int j, const Scalar& u) const override;

private:
    const Family& base_;
    Grading grading_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::string, GradedMatrix> cache_;
};

}  // namespace sb

#endif
