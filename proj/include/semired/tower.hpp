#pragma once

#include <cassert>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "semired/fq.hpp"
#include "semired/rational.hpp"
#include "semired/value.hpp"

namespace semired {

// A tower of number fields over Q carrying the 3-adic valuation, normalized
// v(3) = 1. Each level is defined by a monic polynomial over the previous
// level whose irreducibility over the 3-adic completion has been certified
// (see certify.hpp); that certificate is what makes the valuation on the
// level well defined (unique extension), so norms compute it exactly.
//
// Elements of level k are stored flat: a polynomial of degree < deg_k in the
// level-k generator whose coefficients are level-(k-1) elements, laid out as
// deg_k consecutive blocks of size block(k-1).
class Tower;

struct Elem {
    int level = 0;
    std::vector<Rat> a;
};

struct CertLevel {
    // data recorded by the certificate at construction
    long e_rel = 1, f_rel = 1;
    std::string note;
    // inductive-valuation atoms: elements of this level (flat) with known
    // valuation; they generate the value group together with lower levels
    std::vector<std::pair<std::vector<Rat>, Rat>> atoms;
};

class Tower {
  public:
    Tower() {
        // level 0 = Q
        blocks_ = {1};
        e_ = {1};
        f_ = {1};
    }

    int levels() const { return static_cast<int>(degs_.size()); }
    long degree() const { return blocks_.back(); }
    long block(int level) const { return blocks_[static_cast<size_t>(level)]; }
    int level_degree(int level) const { return degs_[static_cast<size_t>(level - 1)]; }
    long e() const { return e_.back(); }
    long f() const { return f_.back(); }
    long e_at(int level) const { return e_[static_cast<size_t>(level)]; }
    long f_at(int level) const { return f_[static_cast<size_t>(level)]; }
    const std::vector<Elem>& defpoly(int level) const {
        return defpolys_[static_cast<size_t>(level - 1)];
    }
    const CertLevel& cert(int level) const { return certs_[static_cast<size_t>(level - 1)]; }
    CertLevel& cert_mut(int level) { return certs_[static_cast<size_t>(level - 1)]; }
    const std::string& gen_name(int level) const { return names_[static_cast<size_t>(level - 1)]; }

    // ---- element constructors ----
    Elem zero(int level) const { return Elem{level, std::vector<Rat>(static_cast<size_t>(block(level)), Rat(0))}; }
    Elem one(int level) const {
        Elem z = zero(level);
        z.a[0] = 1;
        return z;
    }
    Elem from_rat(int level, const Rat& q) const {
        Elem z = zero(level);
        z.a[0] = q;
        return z;
    }
    Elem gen(int level) const {
        if (level < 1) throw std::invalid_argument("gen: level >= 1");
        Elem z = zero(level);
        z.a[static_cast<size_t>(block(level - 1))] = 1;
        return z;
    }
    Elem lift(const Elem& x, int to_level) const {
        if (x.level > to_level) throw std::invalid_argument("lift: target below element");
        Elem z = zero(to_level);
        std::copy(x.a.begin(), x.a.end(), z.a.begin());
        z.level = to_level;
        return z;
    }

    bool is_zero(const Elem& x) const {
        for (const auto& q : x.a)
            if (q != 0) return false;
        return true;
    }
    bool equal(const Elem& x, const Elem& y) const {
        if (x.level != y.level) return false;
        return x.a == y.a;
    }

    // ---- arithmetic ----
    Elem add(const Elem& x, const Elem& y) const {
        check2(x, y);
        Elem z = x;
        for (size_t i = 0; i < z.a.size(); ++i) z.a[i] += y.a[i];
        return z;
    }
    Elem sub(const Elem& x, const Elem& y) const {
        check2(x, y);
        Elem z = x;
        for (size_t i = 0; i < z.a.size(); ++i) z.a[i] -= y.a[i];
        return z;
    }
    Elem neg(const Elem& x) const {
        Elem z = x;
        for (auto& q : z.a) q = -q;
        return z;
    }
    Elem scale_rat(const Elem& x, const Rat& s) const {
        Elem z = x;
        for (auto& q : z.a) q *= s;
        return z;
    }
    Elem mul(const Elem& x, const Elem& y) const {
        check2(x, y);
        Elem z = zero(x.level);
        mul_span(x.level, x.a.data(), y.a.data(), z.a.data());
        return z;
    }
    Elem pow(const Elem& x, long n) const {
        if (n < 0) return inv(pow(x, -n));
        Elem r = one(x.level);
        Elem b = x;
        while (n) {
            if (n & 1) r = mul(r, b);
            b = mul(b, b);
            n >>= 1;
        }
        return r;
    }
    Elem inv(const Elem& x) const;
    Elem div(const Elem& x, const Elem& y) const {
        if (is_zero(y)) throw std::domain_error("tower: division by zero");
        return mul(x, inv(y));
    }

    // multiply by the generator of `genlevel` (<= x.level); cheap shift+reduce
    Elem mul_gen(const Elem& x, int genlevel) const;

    // ---- norms and valuation ----
    // norm from `level` down one step: determinant of the multiplication map
    Elem norm_step(const Elem& x) const;
    Elem norm_to(const Elem& x, int target_level) const {
        if (target_level > x.level) throw std::invalid_argument("norm_to: target above element");
        Elem cur = x;
        while (cur.level > target_level) cur = norm_step(cur);
        return cur;
    }
    Value valuation(const Elem& x) const {
        if (is_zero(x)) return Value::infinity();
        Elem n = norm_to(x, 0);
        return Value(Rat(val3(n.a[0]), degree_at(x.level)));
    }

    long degree_at(int level) const { return blocks_[static_cast<size_t>(level)]; }

    // ---- value group and residues ----
    // element of valuation exactly gamma (gamma in (1/e)Z), built from the
    // recorded atoms by an extended-gcd combination
    Elem scale_elem(int level, const Rat& gamma) const;

    // residue of a valuation-0 element in the residue field (F_3 or F_9)
    unsigned residue(const Elem& x, const Fq& F) const;
    // lift of a residue-field element into the tower
    Elem lift_residue(int level, unsigned r, const Fq& F) const;

    // all valuation atoms visible at `level` (lifted), including 3
    std::vector<std::pair<Elem, Rat>> atoms_at(int level) const;

    // residue field degree bookkeeping: generator of the unramified part, if any
    void set_unram_gen(const Elem& g) { unram_gen_ = std::make_shared<Elem>(g); }

    // ---- construction (used by tower_extend in certify.hpp) ----
    void push_level(const std::string& name, std::vector<Elem> defpoly, CertLevel cert) {
        int d = static_cast<int>(defpoly.size()) - 1;
        if (d < 2) throw std::invalid_argument("push_level: degree >= 2");
        degs_.push_back(d);
        blocks_.push_back(blocks_.back() * d);
        e_.push_back(e_.back() * cert.e_rel);
        f_.push_back(f_.back() * cert.f_rel);
        defpolys_.push_back(std::move(defpoly));
        certs_.push_back(std::move(cert));
        names_.push_back(name);
    }

    std::string elem_str(const Elem& x) const;

  private:
    void check2(const Elem& x, const Elem& y) const {
        if (x.level != y.level || x.a.size() != y.a.size())
            throw std::invalid_argument("tower: level mismatch");
    }

    // z (size block(level)) = x * y reduced; scratch-free recursive schoolbook
    void mul_span(int level, const Rat* x, const Rat* y, Rat* z) const;
    void add_mul_span(int level, const Rat* x, const Rat* y, Rat* acc) const;
    void sub_mul_span(int level, const Rat* x, const Rat* y, Rat* acc) const;

    std::vector<int> degs_;
    std::vector<long> blocks_;  // blocks_[k] = product of degs up to level k
    std::vector<long> e_, f_;
    std::vector<std::vector<Elem>> defpolys_;  // coefficients at level k-1
    std::vector<CertLevel> certs_;
    std::vector<std::string> names_;
    std::shared_ptr<Elem> unram_gen_;

  public:
    const Elem* unram_gen() const { return unram_gen_.get(); }
};

// ---------------- implementation ----------------

inline void Tower::add_mul_span(int level, const Rat* x, const Rat* y, Rat* acc) const {
    if (level == 0) {
        *acc += *x * *y;
        return;
    }
    long B = block(level - 1);
    int d = level_degree(level);
    // product into 2d-1 blocks, then reduce
    std::vector<Rat> prod(static_cast<size_t>((2 * d - 1) * B), Rat(0));
    for (int i = 0; i < d; ++i) {
        bool xz = true;
        for (long t = 0; t < B; ++t)
            if (x[i * B + t] != 0) { xz = false; break; }
        if (xz) continue;
        for (int j = 0; j < d; ++j)
            add_mul_span(level - 1, x + i * B, y + j * B, prod.data() + (i + j) * B);
    }
    // reduce by the monic defining polynomial
    const auto& dp = defpolys_[static_cast<size_t>(level - 1)];
    for (int i = 2 * d - 2; i >= d; --i) {
        Rat* c = prod.data() + i * B;
        bool cz = true;
        for (long t = 0; t < B; ++t)
            if (c[t] != 0) { cz = false; break; }
        if (cz) continue;
        for (int j = 0; j < d; ++j)
            sub_mul_span(level - 1, c, dp[static_cast<size_t>(j)].a.data(),
                         prod.data() + (i - d + j) * B);
        for (long t = 0; t < B; ++t) c[t] = 0;
    }
    for (long t = 0; t < d * B; ++t) acc[t] += prod[static_cast<size_t>(t)];
}

inline void Tower::sub_mul_span(int level, const Rat* x, const Rat* y, Rat* acc) const {
    if (level == 0) {
        *acc -= *x * *y;
        return;
    }
    long B = block(level);
    std::vector<Rat> tmp(static_cast<size_t>(B), Rat(0));
    add_mul_span(level, x, y, tmp.data());
    for (long t = 0; t < B; ++t) acc[t] -= tmp[static_cast<size_t>(t)];
}

inline void Tower::mul_span(int level, const Rat* x, const Rat* y, Rat* z) const {
    long B = block(level);
    for (long t = 0; t < B; ++t) z[t] = 0;
    add_mul_span(level, x, y, z);
}

inline Elem Tower::mul_gen(const Elem& x, int genlevel) const {
    if (genlevel == x.level) {
        // shift blocks up by one and reduce once
        int d = level_degree(genlevel);
        long B = block(genlevel - 1);
        Elem z = zero(x.level);
        // top block of x becomes the overflow coefficient
        const Rat* top = x.a.data() + (d - 1) * B;
        bool topz = true;
        for (long t = 0; t < B; ++t)
            if (top[t] != 0) { topz = false; break; }
        for (int i = d - 1; i >= 1; --i)
            std::copy(x.a.begin() + (i - 1) * B, x.a.begin() + i * B, z.a.begin() + i * B);
        if (!topz) {
            const auto& dp = defpolys_[static_cast<size_t>(genlevel - 1)];
            for (int j = 0; j < d; ++j)
                sub_mul_span(genlevel - 1, top, dp[static_cast<size_t>(j)].a.data(),
                             z.a.data() + j * B);
        }
        return z;
    }
    // apply blockwise at the lower level
    int d = level_degree(x.level);
    long B = block(x.level - 1);
    Elem z = zero(x.level);
    for (int i = 0; i < d; ++i) {
        Elem blockelem{x.level - 1,
                       std::vector<Rat>(x.a.begin() + i * B, x.a.begin() + (i + 1) * B)};
        Elem r = mul_gen(blockelem, genlevel);
        std::copy(r.a.begin(), r.a.end(), z.a.begin() + i * B);
    }
    return z;
}

// extended Euclid over the previous level's polynomials
inline Elem Tower::inv(const Elem& x) const {
    if (x.level == 0) {
        if (x.a[0] == 0) throw std::domain_error("tower: inverse of zero");
        Elem z = x;
        z.a[0] = 1 / x.a[0];
        return z;
    }
    int lev = x.level;
    int km = lev - 1;
    long B = block(km);
    int d = level_degree(lev);
    using Poly = std::vector<Elem>;  // over level km
    auto getblock = [&](const Elem& e, int i) {
        return Elem{km, std::vector<Rat>(e.a.begin() + i * B, e.a.begin() + (i + 1) * B)};
    };
    auto strip = [&](Poly& p) {
        while (!p.empty() && is_zero(p.back())) p.pop_back();
    };
    Poly r0 = defpolys_[static_cast<size_t>(km)];
    Poly r1;
    for (int i = 0; i < d; ++i) r1.push_back(getblock(x, i));
    strip(r1);
    if (r1.empty()) throw std::domain_error("tower: inverse of zero");
    Poly s0, s1{one(km)};
    auto polysub_scaled = [&](Poly a, const Poly& b, const Elem& c, int shift) {
        // a -= c * x^shift * b
        if (a.size() < b.size() + static_cast<size_t>(shift))
            a.resize(b.size() + static_cast<size_t>(shift), zero(km));
        for (size_t i = 0; i < b.size(); ++i)
            a[i + static_cast<size_t>(shift)] =
                sub(a[i + static_cast<size_t>(shift)], mul(c, b[i]));
        strip(a);
        return a;
    };
    while (true) {
        strip(r1);
        if (r1.empty()) throw std::domain_error("tower: non-invertible element");
        if (r1.size() == 1) {
            Elem ic = inv(r1[0]);
            Elem out = zero(lev);
            for (size_t i = 0; i < s1.size() && i < static_cast<size_t>(d); ++i) {
                Elem t = mul(s1[i], ic);
                std::copy(t.a.begin(), t.a.end(), out.a.begin() + static_cast<long>(i) * B);
            }
            return out;
        }
        // divide r0 by r1
        Poly rem = r0;
        Poly quo;
        Elem linv = inv(r1.back());
        strip(rem);
        while (rem.size() >= r1.size() && !rem.empty()) {
            Elem c = mul(rem.back(), linv);
            int shift = static_cast<int>(rem.size() - r1.size());
            if (quo.size() < static_cast<size_t>(shift) + 1) quo.resize(static_cast<size_t>(shift) + 1, zero(km));
            quo[static_cast<size_t>(shift)] = c;
            rem = polysub_scaled(rem, r1, c, shift);
        }
        // s_new = s0 - quo * s1
        Poly snew = s0;
        for (size_t i = 0; i < quo.size(); ++i)
            if (!is_zero(quo[i])) snew = polysub_scaled(snew, s1, quo[i], static_cast<int>(i));
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = snew;
    }
}

// determinant of the multiplication-by-x map, computed over the level below.
inline Elem Tower::norm_step(const Elem& x) const {
    int lev = x.level;
    if (lev == 0) throw std::invalid_argument("norm_step at level 0");
    int km = lev - 1;
    long B = block(km);
    int d = level_degree(lev);
    // columns: x * g^i
    std::vector<Elem> cols;
    cols.reserve(static_cast<size_t>(d));
    Elem cur = x;
    for (int i = 0; i < d; ++i) {
        cols.push_back(cur);
        if (i + 1 < d) cur = mul_gen(cur, lev);
    }
    auto entry = [&](int row, int col) {
        return Elem{km, std::vector<Rat>(cols[static_cast<size_t>(col)].a.begin() + row * B,
                                         cols[static_cast<size_t>(col)].a.begin() + (row + 1) * B)};
    };
    if (d == 2)
        return sub(mul(entry(0, 0), entry(1, 1)), mul(entry(0, 1), entry(1, 0)));
    if (d == 3) {
        Elem t0 = mul(entry(0, 0), sub(mul(entry(1, 1), entry(2, 2)), mul(entry(1, 2), entry(2, 1))));
        Elem t1 = mul(entry(0, 1), sub(mul(entry(1, 0), entry(2, 2)), mul(entry(1, 2), entry(2, 0))));
        Elem t2 = mul(entry(0, 2), sub(mul(entry(1, 0), entry(2, 1)), mul(entry(1, 1), entry(2, 0))));
        return add(sub(t0, t1), t2);
    }
    // fraction-free Bareiss
    std::vector<std::vector<Elem>> M(static_cast<size_t>(d));
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) M[static_cast<size_t>(r)].push_back(entry(r, c));
    Elem prev = one(km);
    int sign = 1;
    for (int col = 0; col < d - 1; ++col) {
        int piv = -1;
        for (int r = col; r < d; ++r)
            if (!is_zero(M[static_cast<size_t>(r)][static_cast<size_t>(col)])) { piv = r; break; }
        if (piv < 0) return zero(km);
        if (piv != col) {
            std::swap(M[static_cast<size_t>(piv)], M[static_cast<size_t>(col)]);
            sign = -sign;
        }
        for (int r = col + 1; r < d; ++r) {
            for (int c = col + 1; c < d; ++c) {
                Elem num = sub(mul(M[static_cast<size_t>(r)][static_cast<size_t>(c)],
                                   M[static_cast<size_t>(col)][static_cast<size_t>(col)]),
                               mul(M[static_cast<size_t>(r)][static_cast<size_t>(col)],
                                   M[static_cast<size_t>(col)][static_cast<size_t>(c)]));
                M[static_cast<size_t>(r)][static_cast<size_t>(c)] = div(num, prev);
            }
            M[static_cast<size_t>(r)][static_cast<size_t>(col)] = zero(km);
        }
        prev = M[static_cast<size_t>(col)][static_cast<size_t>(col)];
    }
    Elem det = M[static_cast<size_t>(d - 1)][static_cast<size_t>(d - 1)];
    return sign < 0 ? neg(det) : det;
}

inline Elem Tower::scale_elem(int level, const Rat& gamma) const {
    // solve sum c_i * v_i = gamma in integers over the atoms
    auto atoms = atoms_at(level);
    long L = 1;
    for (auto& [el, v] : atoms) L = lcm_long(L, rat_den(v));
    L = lcm_long(L, rat_den(gamma));
    Rat target = gamma * L;
    if (rat_den(target) != 1) throw std::domain_error("scale_elem: target not rational-integral");
    // extended gcd over n_i = v_i * L
    std::vector<long> n(atoms.size());
    for (size_t i = 0; i < atoms.size(); ++i) n[i] = rat_num_long(atoms[i].second * L);
    std::vector<long> coef(atoms.size(), 0);
    long g = 0;
    long gx = 0;
    for (size_t i = 0; i < n.size(); ++i) {
        // g_new = gcd(g, n_i): track coefficients
        long a = g, b = n[i];
        long x0 = 1, y0 = 0, x1 = 0, y1 = 1;
        while (b) {
            long qd = a / b;
            long t = a - qd * b; a = b; b = t;
            t = x0 - qd * x1; x0 = x1; x1 = t;
            t = y0 - qd * y1; y0 = y1; y1 = t;
        }
        // a = x0*g + y0*n_i
        for (size_t j = 0; j < i; ++j) coef[j] *= x0;
        coef[i] = y0;
        g = a;
        (void)gx;
        if (g == 1) break;
    }
    long m = rat_num_long(target);
    if (g == 0 || m % g != 0)
        throw std::domain_error("scale_elem: value not in the group generated by atoms");
    long k = m / g;
    std::vector<long> p(atoms.size());
    for (size_t i = 0; i < atoms.size(); ++i) p[i] = coef[i] * k;
    // keep exponents of non-rational atoms small, compensating with powers
    // of 3 (atom 0): c_i may shift by multiples of L/gcd(n_i, L)
    for (size_t i = 1; i < atoms.size(); ++i) {
        long ni = n[i];
        long gi = std::gcd(std::abs(ni), L);
        long step = L / gi;
        if (step == 0) continue;
        long r = p[i] % step;
        if (r < 0) r += step;
        if (2 * r > step) r -= step;
        long removed = p[i] - r;
        p[i] = r;
        p[0] += removed * ni / L;
    }
    Elem out = one(level);
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (p[i] == 0) continue;
        out = mul(out, pow(atoms[i].first, p[i]));
    }
    return out;
}

inline std::vector<std::pair<Elem, Rat>> Tower::atoms_at(int level) const {
    std::vector<std::pair<Elem, Rat>> out;
    out.emplace_back(from_rat(level, 3), Rat(1));
    for (int l = 1; l <= level; ++l)
        for (const auto& [flat, v] : certs_[static_cast<size_t>(l - 1)].atoms)
            out.emplace_back(lift(Elem{l, flat}, level), v);
    return out;
}

inline unsigned Tower::residue(const Elem& x, const Fq& F) const {
    for (unsigned cand = 0; cand < F.q(); ++cand) {
        Elem d = sub(x, lift_residue(x.level, cand, F));
        Value v = valuation(d);
        if (v.is_infinite() || v.finite() > 0) return cand;
    }
    throw std::domain_error("residue: no candidate matched (residue field too small?)");
}

inline Elem Tower::lift_residue(int level, unsigned r, const Fq& F) const {
    if (F.k() == 1) return from_rat(level, static_cast<long>(r));
    if (F.k() == 2 && unram_gen_) {
        long c0 = static_cast<long>(r % 3);
        long c1 = static_cast<long>(r / 3);
        Elem g = lift(*unram_gen_, level);
        return add(from_rat(level, c0), scale_rat(g, Rat(c1)));
    }
    throw std::domain_error("lift_residue: no unramified generator recorded");
}

inline std::string Tower::elem_str(const Elem& x) const {
    std::string s = "[";
    for (size_t i = 0; i < x.a.size(); ++i) {
        if (i) s += ",";
        s += rat_str(x.a[i]);
    }
    return s + "]";
}

}  // namespace semired
