#include "sb/lattice.hpp"

#include <fstream>
#include <sstream>

namespace sb {

ModelSpec::ModelSpec(Grading g, int sites, ParamSet inhom, std::vector<Scalar> twist,
                     Scalar constant)
    : grading(std::move(g)), L(sites), z(std::move(inhom)), kappa(std::move(twist)),
      c(std::move(constant)) {
    if (L < 1) throw ConfigError("L must be >= 1");
    if (static_cast<int>(z.size()) != L) throw ConfigError("need L inhomogeneities");
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t k = i + 1; k < z.size(); ++k)
            if ((z[i] - z[k]).is_zero()) throw ConfigError("inhomogeneities must be distinct");
    if (static_cast<int>(kappa.size()) != grading.dim())
        throw ConfigError("twist length must be m+n");
    for (const Scalar& k : kappa) {
        if (k.is_zero()) throw ConfigError("twist entries must be nonzero");
        if (k.backend() != c.backend()) throw ConfigError("twist backend mismatch");
    }
    if (c.is_zero()) throw ConfigError("c must be nonzero");
    if (!z.empty() && z.backend() != c.backend()) throw ConfigError("z backend mismatch");
}

bool ModelSpec::untwisted() const {
    Scalar one = Scalar::one(backend());
    for (const Scalar& k : kappa)
        if (k != one) return false;
    return true;
}

Scalar scalar_from_json(const nlohmann::json& j, Backend backend) {
    if (j.is_string()) {
        Scalar q = Scalar::parse_rational(j.get<std::string>());
        if (backend == Backend::Exact) return q;
        return Scalar::complex(q.rat().get_d(), 0.0);
    }
    if (j.is_number_integer()) {
        long n = j.get<long>();
        return backend == Backend::Exact ? Scalar(n)
                                         : Scalar::complex(static_cast<double>(n), 0.0);
    }
    if (j.is_array() && j.size() == 2) {
        if (backend == Backend::Exact)
            throw ConfigError("complex [re,im] value in an exact-backend model");
        return Scalar::complex(j[0].get<double>(), j[1].get<double>());
    }
    throw ConfigError("cannot read scalar: " + j.dump());
}

nlohmann::json scalar_to_json(const Scalar& s) {
    if (s.is_exact()) return s.str();
    return nlohmann::json::array({s.cplx().real(), s.cplx().imag()});
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
    for (const char* field : {"m", "n", "L", "z", "kappa", "c"})
        if (!j.contains(field)) throw ConfigError(std::string("missing field: ") + field);
    Backend backend = Backend::Exact;
    if (j.contains("backend")) {
        std::string b = j["backend"].get<std::string>();
        if (b == "float")
            backend = Backend::Float;
        else if (b != "exact")
            throw ConfigError("backend must be \"exact\" or \"float\"");
    }
    int m = j["m"].get<int>();
    int n = j["n"].get<int>();
    if (!((m == 2 && n == 1) || (m == 1 && n == 2)))
        throw ConfigError("(m,n) must be (2,1) or (1,2)");
    std::vector<Scalar> zs, ks;
    for (const auto& e : j["z"]) zs.push_back(scalar_from_json(e, backend));
    for (const auto& e : j["kappa"]) ks.push_back(scalar_from_json(e, backend));
    return ModelSpec(Grading(m, n), j["L"].get<int>(), ParamSet(std::move(zs)),
                     std::move(ks), scalar_from_json(j["c"], backend));
}

nlohmann::json ModelSpec::to_json() const {
    nlohmann::json j;
    j["m"] = grading.m();
    j["n"] = grading.n();
    j["L"] = L;
    j["z"] = nlohmann::json::array();
    for (std::size_t i = 0; i < z.size(); ++i) j["z"].push_back(scalar_to_json(z[i]));
    j["kappa"] = nlohmann::json::array();
    for (const Scalar& k : kappa) j["kappa"].push_back(scalar_to_json(k));
    j["c"] = scalar_to_json(c);
    j["backend"] = backend() == Backend::Exact ? "exact" : "float";
    return j;
}

ModelSpec ModelSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("bad JSON in " + path + ": " + e.what());
    }
    return from_json(j);
}

GradedVector Family::omega() const {
    GradedVector v(space(), VectorSide::Column, backend());
    v[0] = Scalar::one(backend());
    return v;
}

GradedVector Family::omega_dual() const {
    GradedVector v(space(), VectorSide::Row, backend());
    v[0] = Scalar::one(backend());
    return v;
}

GradedVector apply_block(const GradedSpace& big, std::size_t first,
                         const GradedMatrix& op, int op_parity,
                         const GradedVector& vec) {
    std::size_t d = op.dim();
    std::size_t lead_count = big.dim() / d;
    if (lead_count * d != big.dim()) throw DimensionMismatch("apply_block");
    GradedVector out(big, vec.side(), vec.backend());
    bool column = vec.side() == VectorSide::Column;
    for (std::size_t lead = 0; lead < lead_count; ++lead) {
        // crossing sign over the leading factors
        long crossed = 0;
        if (op_parity % 2 != 0) {
            std::size_t probe = lead * d;
            for (std::size_t q = 0; q < first; ++q) crossed += big.digit_parity(probe, q);
        }
        int sgn = parity_sign(static_cast<long>(op_parity) * crossed);
        for (std::size_t p = 0; p < d; ++p) {
            const Scalar& x = vec[lead * d + p];
            if (x.is_zero()) continue;
            for (std::size_t r = 0; r < d; ++r) {
                const Scalar& e = column ? op.at(r, p) : op.at(p, r);
                if (!e.is_zero()) out[lead * d + r] += apply_sign(e * x, sgn);
            }
        }
    }
    return out;
}

GradedVector Family::apply_T(const GradedSpace& big, std::size_t aux,
                             std::size_t phys_start, const Scalar& w,
                             const GradedVector& vec) const {
    int d = grading().dim();
    GradedVector out(big, vec.side(), vec.backend());
    bool column = vec.side() == VectorSide::Column;
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) {
            const GradedMatrix& t = entry(i, j, w);
            if (t.is_zero()) continue;
            int par = grading().parity(i) + grading().parity(j);
            GradedVector term = column
                ? apply_elementary(big, aux, i, j,
                                   apply_block(big, phys_start, t, par, vec))
                : apply_block(big, phys_start, t, par,
                              apply_elementary(big, aux, i, j, vec));
            out += term;
        }
    return out;
}

ChainFamily::ChainFamily(ModelSpec spec)
    : spec_(std::move(spec)), phys_(spec_.grading, static_cast<std::size_t>(spec_.L)) {}

GradedVector ChainFamily::apply_T(const GradedSpace& big, std::size_t aux,
                                  std::size_t phys_start, const Scalar& w,
                                  const GradedVector& vec) const {
    // T(w) = K R_{0L}(w,z_L) ... R_{01}(w,z_1): the k = 1 factor acts first
    // on columns, last on rows.
    GradedVector v = vec;
    if (vec.side() == VectorSide::Column) {
        for (int k = 0; k < spec_.L; ++k)
            v = apply_R(big, aux, phys_start + k, w, spec_.z[k], spec_.c, v);
        v = apply_diagonal(big, aux, spec_.kappa, v);
    } else {
        v = apply_diagonal(big, aux, spec_.kappa, v);
        for (int k = spec_.L - 1; k >= 0; --k)
            v = apply_R(big, aux, phys_start + k, w, spec_.z[k], spec_.c, v);
    }
    return v;
}

const std::vector<GradedMatrix>& ChainFamily::entries_at(const Scalar& u) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    std::string key = u.str();
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    int d = spec_.grading.dim();
    std::vector<GradedMatrix> ts(static_cast<std::size_t>(d) * d,
                                 GradedMatrix(phys_, spec_.backend()));
    GradedSpace big = GradedSpace(spec_.grading, 1).concat(phys_);
    std::size_t dim = phys_.dim();
    for (int j = 1; j <= d; ++j) {
        for (std::size_t x = 0; x < dim; ++x) {
            GradedVector v(big, VectorSide::Column, spec_.backend());
            v[static_cast<std::size_t>(j - 1) * dim + x] = Scalar::one(spec_.backend());
            v = apply_T(big, 0, 1, u, v);
            int px = phys_.parity(x);
            for (int i = 1; i <= d; ++i)
                for (std::size_t y = 0; y < dim; ++y) {
                    const Scalar& e = v[static_cast<std::size_t>(i - 1) * dim + y];
                    if (e.is_zero()) continue;
                    // undo the embedding sign of E_ij (x) T_ij
                    int sgn = parity_sign(static_cast<long>(px + phys_.parity(y)) *
                                          spec_.grading.parity(j));
                    ts[static_cast<std::size_t>(i - 1) * d + (j - 1)].at(y, x) =
                        apply_sign(e, sgn);
                }
        }
    }
    return cache_.emplace(std::move(key), std::move(ts)).first->second;
}

const GradedMatrix& ChainFamily::entry(int i, int j, const Scalar& u) const {
    int d = spec_.grading.dim();
    if (i < 1 || i > d || j < 1 || j > d) throw IndexOutOfRange("ChainFamily::entry");
    for (std::size_t k = 0; k < spec_.z.size(); ++k)
        if ((u - spec_.z[k]).is_zero()) throw PoleError("monodromy entry at u = z_k");
    return entries_at(u)[static_cast<std::size_t>(i - 1) * d + (j - 1)];
}

Scalar ChainFamily::weight(int j, const Scalar& u) const {
    if (j < 1 || j > spec_.grading.dim()) throw IndexOutOfRange("ChainFamily::weight");
    Scalar w = spec_.kappa[j - 1];
    if (j == 1)
        for (std::size_t k = 0; k < spec_.z.size(); ++k)
            w *= eval_structure(StructureFn::f, u, spec_.z[k], spec_.c);
    return w;
}

GradedMatrix ChainFamily::transfer(const Scalar& u) const {
    GradedMatrix t(phys_, spec_.backend());
    for (int j = 1; j <= spec_.grading.dim(); ++j)
        t += apply_sign(Scalar::one(spec_.backend()),
                        parity_sign(spec_.grading.parity(j))) *
             entry(j, j, u);
    return t;
}

GradedMatrix ChainFamily::zero_mode(int i, int j) const {
    if (!spec_.untwisted())
        throw TwistedModelError("zero modes are normalized for untwisted models only");
    GradedMatrix out(phys_, spec_.backend());
    for (int k = 0; k < spec_.L; ++k)
        out += apply_sign(Scalar::one(spec_.backend()),
                          parity_sign(spec_.grading.parity(j))) *
               elementary(phys_, static_cast<std::size_t>(k), j, i, spec_.backend());
    return out;
}

GradedMatrix build_R(const Grading& g, const Scalar& u, const Scalar& v,
                     const Scalar& c) {
    GradedSpace two(g, 2);
    return GradedMatrix::identity(two, c.backend()) +
           eval_structure(StructureFn::g, u, v, c) * perm_P(g, c.backend());
}

void ResidualReport::record(const Scalar& s) {
    if (!s.is_zero()) {
        exact_zero = false;
        max_abs = std::max(max_abs, s.abs());
    }
}

void ResidualReport::merge(const ResidualReport& o) {
    exact_zero = exact_zero && o.exact_zero;
    max_abs = std::max(max_abs, o.max_abs);
}

namespace {

void record_matrix(ResidualReport& rep, const GradedMatrix& m) {
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c) rep.record(m.at(r, c));
}

// dense P_pq on an arbitrary space, built from the sparse action
GradedMatrix dense_P(const GradedSpace& sp, std::size_t p, std::size_t q, Backend b) {
    GradedMatrix out(sp, b);
    for (std::size_t col = 0; col < sp.dim(); ++col) {
        GradedVector e(sp, VectorSide::Column, b);
        e[col] = Scalar::one(b);
        GradedVector r = apply_perm(sp, p, q, e);
        for (std::size_t row = 0; row < sp.dim(); ++row) out.at(row, col) = r[row];
    }
    return out;
}

}  // namespace

ResidualReport verify_R_axioms(const Grading& g, const Scalar& u, const Scalar& v,
                               const Scalar& w, const Scalar& c) {
    Backend b = c.backend();
    ResidualReport rep;

    GradedSpace three(g, 3);
    GradedMatrix id3 = GradedMatrix::identity(three, b);
    auto R = [&](std::size_t p, std::size_t q, const Scalar& x, const Scalar& y) {
        return id3 + eval_structure(StructureFn::g, x, y, c) * dense_P(three, p, q, b);
    };
    // Yang-Baxter
    record_matrix(rep, R(0, 1, u, v) * R(0, 2, u, w) * R(1, 2, v, w) -
                           R(1, 2, v, w) * R(0, 2, u, w) * R(0, 1, u, v));

    GradedSpace two(g, 2);
    GradedMatrix r12 = build_R(g, u, v, c);
    GradedMatrix r21 = build_R(g, v, u, c);  // P R P = R: same operator form
    // unitarity
    Scalar ff = eval_structure(StructureFn::f, u, v, c) *
                eval_structure(StructureFn::f, v, u, c);
    record_matrix(rep, r21 * r12 - ff * GradedMatrix::identity(two, b));
    // symmetry
    GradedMatrix p = perm_P(g, b);
    record_matrix(rep, p * r12 * p - r12);
    record_matrix(rep, supertranspose_factor(supertranspose_factor(r12, 0), 1) - r12);
    return rep;
}

ResidualReport verify_rtt(const Family& fam, const Scalar& u, const Scalar& v) {
    ResidualReport rep;
    GradedSpace big = GradedSpace(fam.grading(), 2).concat(fam.space());
    Backend b = fam.backend();
    for (std::size_t col = 0; col < big.dim(); ++col) {
        GradedVector e(big, VectorSide::Column, b);
        e[col] = Scalar::one(b);
        GradedVector lhs = apply_R(big, 0, 1, u, v, fam.c(),
                                   fam.apply_T(big, 0, 2, u,
                                               fam.apply_T(big, 1, 2, v, e)));
        GradedVector rhs = fam.apply_T(big, 1, 2, v,
                                       fam.apply_T(big, 0, 2, u,
                                                   apply_R(big, 0, 1, u, v, fam.c(), e)));
        GradedVector diff = lhs - rhs;
        for (std::size_t r = 0; r < diff.dim(); ++r) rep.record(diff[r]);
    }
    return rep;
}

}  // namespace sb
