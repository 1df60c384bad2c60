#include "sb/expr.hpp"

namespace sb {

int Monomial::word_parity(const Grading& g) const {
    int p = 0;
    for (const GenSymbol& s : word) p += s.parity(g);
    return p % 2;
}

void Expr::add(Monomial m) {
    if (!m.coeff.is_zero()) terms_.push_back(std::move(m));
}

Expr& Expr::operator+=(const Expr& o) {
    if (tag_ != o.tag_ || terminal_ != o.terminal_)
        throw TagMismatch("adding expressions of different kinds");
    for (const Monomial& m : o.terms_) terms_.push_back(m);
    return *this;
}

Expr& Expr::operator*=(const Scalar& s) {
    for (Monomial& m : terms_) m.coeff *= s;
    return *this;
}

nlohmann::json Expr::to_json() const {
    nlohmann::json j;
    j["algebra"] = tag_ == AlgebraTag::Y21 ? "Y21" : "Y12";
    j["terminal"] = terminal_ == Terminal::OmegaRight ? "omega-right" : "omega-dagger-left";
    j["terms"] = nlohmann::json::array();
    for (const Monomial& m : terms_) {
        nlohmann::json t;
        t["coeff"] = scalar_to_json(m.coeff);
        t["lambdas"] = nlohmann::json::array();
        for (const auto& [idx, p] : m.lambdas)
            t["lambdas"].push_back({idx, scalar_to_json(p)});
        t["word"] = nlohmann::json::array();
        for (const GenSymbol& s : m.word)
            t["word"].push_back({"T", s.i, s.j, scalar_to_json(s.param)});
        j["terms"].push_back(std::move(t));
    }
    return j;
}

Expr psi_expr(const Expr& e) {
    Grading g = algebra_grading(e.tag());
    Expr out(e.tag(), e.terminal() == Terminal::OmegaRight ? Terminal::OmegaDaggerLeft
                                                           : Terminal::OmegaRight);
    for (const Monomial& m : e.terms()) {
        Monomial n;
        n.coeff = m.coeff;
        n.lambdas = m.lambdas;
        // reversal sign: one Koszul factor per exchanged odd pair
        long expo = 0;
        for (std::size_t p = 0; p < m.word.size(); ++p)
            for (std::size_t q = p + 1; q < m.word.size(); ++q)
                expo += m.word[p].parity(g) * m.word[q].parity(g);
        for (auto it = m.word.rbegin(); it != m.word.rend(); ++it) {
            const GenSymbol& s = *it;
            expo += g.parity(s.i) * g.parity(s.j) + g.parity(s.i);
            n.word.push_back({s.j, s.i, s.param});
        }
        n.coeff = apply_sign(n.coeff, parity_sign(expo));
        out.add(std::move(n));
    }
    return out;
}

Expr phi_expr(const Expr& e) {
    Grading g = algebra_grading(e.tag());
    Expr out(e.tag() == AlgebraTag::Y21 ? AlgebraTag::Y12 : AlgebraTag::Y21,
             e.terminal());
    int top = g.dim() + 1;
    for (const Monomial& m : e.terms()) {
        Monomial n;
        n.coeff = m.coeff;
        long expo = 0;
        for (const GenSymbol& s : m.word) {
            expo += g.parity(s.i) * g.parity(s.j) + g.parity(s.j) + 1;
            n.word.push_back({top - s.j, top - s.i, s.param});
        }
        for (const auto& [idx, p] : m.lambdas) {
            expo += 1;  // lambda_j = -(tilde lambda)_{4-j}
            n.lambdas.emplace_back(top - idx, p);
        }
        n.coeff = apply_sign(n.coeff, parity_sign(expo));
        out.add(std::move(n));
    }
    return out;
}

Expr gr_expr(const Expr& e) {
    Grading g = algebra_grading(e.tag());
    Expr out(e.tag(), e.terminal());
    for (const Monomial& m : e.terms()) {
        Monomial n = m;
        long expo = 0;
        for (const GenSymbol& s : m.word) expo += g.parity(s.i) + g.parity(s.j);
        n.coeff = apply_sign(n.coeff, parity_sign(expo));
        out.add(std::move(n));
    }
    return out;
}

GradedVector evaluate(const Expr& e, const Family& fam) {
    if (!(fam.grading() == algebra_grading(e.tag())))
        throw TagMismatch("family grading does not match the expression algebra");
    bool right = e.terminal() == Terminal::OmegaRight;
    GradedVector acc(fam.space(), right ? VectorSide::Column : VectorSide::Row,
                     fam.backend());
    for (const Monomial& m : e.terms()) {
        GradedVector v = right ? fam.omega() : fam.omega_dual();
        if (right) {
            for (auto it = m.word.rbegin(); it != m.word.rend(); ++it)
                v = fam.entry(it->i, it->j, it->param).apply(v);
        } else {
            for (const GenSymbol& s : m.word)
                v = fam.entry(s.i, s.j, s.param).apply_left(v);
        }
        Scalar coeff = m.coeff;
        for (const auto& [idx, p] : m.lambdas) coeff *= fam.weight(idx, p);
        acc += coeff * v;
    }
    return acc;
}

PhiImageFamily::PhiImageFamily(const Family& base)
    : base_(base), grading_(base.grading().n(), base.grading().m()) {}

const GradedMatrix& PhiImageFamily::entry(int i, int j, const Scalar& u) const {
    int d = grading_.dim();
    if (i < 1 || i > d || j < 1 || j > d) throw IndexOutOfRange("PhiImageFamily::entry");
    std::lock_guard<std::mutex> lock(cache_mutex_);
    std::string key = std::to_string(i) + "," + std::to_string(j) + "@" + u.str();
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    int bi = d + 1 - j, bj = d + 1 - i;  // source indices in the base algebra
    const Grading& bg = base_.grading();
    int sgn = parity_sign(bg.parity(bi) * bg.parity(bj) + bg.parity(bj) + 1);
    GradedMatrix m = base_.entry(bi, bj, u);
    if (sgn < 0) m *= -Scalar::one(base_.backend());
    return cache_.emplace(std::move(key), std::move(m)).first->second;
}

Scalar PhiImageFamily::weight(int j, const Scalar& u) const {
    if (j < 1 || j > grading_.dim()) throw IndexOutOfRange("PhiImageFamily::weight");
    return -base_.weight(grading_.dim() + 1 - j, u);
}

}  // namespace sb
