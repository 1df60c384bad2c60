#ifndef SB_KERNELS_HPP
#define SB_KERNELS_HPP

#include <string>
#include <vector>

#include "sb/scalar.hpp"

namespace sb {

/// Ordered list of parameters sharing one backend. Permutations and
/// partitions are always explicit operations on the order.
class ParamSet {
public:
    ParamSet() = default;
    explicit ParamSet(std::vector<Scalar> elems);

    std::size_t size() const { return elems_.size(); }
    bool empty() const { return elems_.empty(); }
    const Scalar& operator[](std::size_t i) const { return elems_[i]; }
    const std::vector<Scalar>& elements() const { return elems_; }
    Backend backend() const;

    void push_back(const Scalar& s);
    /// Set with element i removed (the subset u-bar_i).
    ParamSet without(std::size_t i) const;
    /// Reversed order (the conjugate set w-bar^*).
    ParamSet conjugated() const;
    /// Swap of adjacent entries j, j+1.
    ParamSet transposed(std::size_t j) const;
    ParamSet concat(const ParamSet& other) const;

private:
    std::vector<Scalar> elems_;
};

enum class StructureFn { g, f, h, f0, f1 };

/// g = c/(u-v); f = 1+g; h = f/g = (u-v+c)/c; f0 = f; f1(u,v) = f(v,u).
Scalar eval_structure(StructureFn kind, const Scalar& u, const Scalar& v, const Scalar& c);

/// Double product of eval_structure over all pairs (left x right).
/// Empty sets give 1. Pairs with identical left/right values are
/// admitted only where no pole arises (h(u,u) = 1).
Scalar product_over(StructureFn kind, const ParamSet& left, const ParamSet& right,
                    const Scalar& c);
Scalar product_over(StructureFn kind, const ParamSet& left, const Scalar& right,
                    const Scalar& c);
Scalar product_over(StructureFn kind, const Scalar& left, const ParamSet& right,
                    const Scalar& c);

/// H(v-bar) = prod_{k<j} h(v_j, v_k); conjugated gives H(v-bar^*) =
/// prod_{j<k} h(v_j, v_k).
Scalar H_norm(const ParamSet& v, const Scalar& c, bool conjugated = false);

/// Izergin-type kernel K_l(v|u) = Delta_l(v) Delta'_l(u) h(v,u) det[g/h].
/// K_0 = 1. Throws PoleError when some v_j = u_k.
Scalar izergin_kernel(const ParamSet& v, const ParamSet& u, const Scalar& c);

enum class ScalarIdentity { KernelRecursion, PoleExpansion, ContourUi, ContourV0 };

struct ScalarIdentitySample {
    // Interpretation depends on the identity; see verify_scalar_identity.
    ParamSet setA;
    ParamSet setB;
    Scalar x;
    Scalar y;
};

/// Left minus right of the named rational-function identity. On the
/// exact backend the result is exactly zero for generic samples.
///
/// KernelRecursion: setA = v-bar (last element is the distinguished v_b),
///   setB = u-bar, |setA| = |setB|.
/// PoleExpansion:   setA = v_I, setB = u_ii, x = u_a.
/// ContourUi:       setA = u-bar_a (the summation set), x = u_a, y = v_i;
///   checks J = g(v_i,u_a){f(u_a,setA) - f(v_i,setA)}.
/// ContourV0:       setA = v_II' (summation set), x = u_i, y = v_b.
Scalar verify_scalar_identity(ScalarIdentity which, const ScalarIdentitySample& sample,
                              const Scalar& c);

}  // namespace sb

#endif
