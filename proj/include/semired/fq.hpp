#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace semired {

// Small finite fields of characteristic 3, as F_3[t]/(m(t)) with fixed,
// documented defining polynomials:
//   F9  = F_3[i]/(i^2 + 1)
//   F27 = F_3[t]/(t^3 - t + 1)
//   F81 = F_3[s]/(s^4 + s + 2)
//   F729 = F_3[u]/(u^6 + u^5 + 2)   (irreducibility verified at construction)
// Elements are encoded as base-3 digit strings packed into an unsigned index
// (digit i = coefficient of t^i); arithmetic via lookup tables.
class Fq {
  public:
    explicit Fq(int k) : k_(k) {
        static const std::vector<std::vector<int>> mods = {
            {},             // k = 0 unused
            {0, 1},         // t            (F3: reduce by t -> 0, i.e. plain mod 3)
            {1, 0, 1},      // t^2 + 1
            {1, 2, 0, 1},   // t^3 + 2t + 1  == t^3 - t + 1
            {2, 1, 0, 0, 1},        // t^4 + t + 2
            {},                     // k = 5 unused
            {2, 0, 0, 0, 0, 1, 1},  // t^6 + t^5 + 2
        };
        if (k < 1 || k > 6 || k == 5) throw std::invalid_argument("Fq: k in {1,2,3,4,6}");
        mod_ = mods[static_cast<size_t>(k)];
        q_ = 1;
        for (int i = 0; i < k; ++i) q_ *= 3;
        build_tables();
        if (!is_irreducible_check()) throw std::logic_error("Fq: defining polynomial reducible");
    }

    int k() const { return k_; }
    unsigned q() const { return q_; }

    unsigned zero() const { return 0; }
    unsigned one() const { return 1; }
    unsigned from_int(long n) const {
        long r = n % 3;
        if (r < 0) r += 3;
        return static_cast<unsigned>(r);
    }
    // generator t of the extension (k >= 2)
    unsigned gen() const { return 3; }

    unsigned add(unsigned a, unsigned b) const {
        unsigned out = 0, p = 1;
        for (int i = 0; i < k_; ++i) {
            out += ((a % 3 + b % 3) % 3) * p;
            a /= 3; b /= 3; p *= 3;
        }
        return out;
    }
    unsigned neg(unsigned a) const {
        unsigned out = 0, p = 1;
        for (int i = 0; i < k_; ++i) {
            out += ((3 - a % 3) % 3) * p;
            a /= 3; p *= 3;
        }
        return out;
    }
    unsigned sub(unsigned a, unsigned b) const { return add(a, neg(b)); }
    unsigned mul(unsigned a, unsigned b) const { return mul_t_[a * q_ + b]; }
    unsigned inv(unsigned a) const {
        if (a == 0) throw std::domain_error("Fq: inverse of zero");
        return inv_t_[a];
    }
    unsigned pow(unsigned a, long n) const {
        if (n < 0) { a = inv(a); n = -n; }
        unsigned r = 1;
        while (n) {
            if (n & 1) r = mul(r, a);
            a = mul(a, a);
            n >>= 1;
        }
        return r;
    }
    bool is_square(unsigned a) const {
        if (a == 0) return true;
        return pow(a, static_cast<long>(q_ - 1) / 2) == 1;
    }
    unsigned sqrt(unsigned a) const {
        for (unsigned x = 0; x < q_; ++x)
            if (mul(x, x) == a) return x;
        throw std::domain_error("Fq: not a square");
    }
    // char 3: cube root is the inverse of Frobenius, always exists, unique
    unsigned cbrt(unsigned a) const {
        for (unsigned x = 0; x < q_; ++x)
            if (mul(mul(x, x), x) == a) return x;
        throw std::logic_error("Fq: cbrt unreachable");
    }

    std::string str(unsigned a) const {
        if (k_ == 1) return std::to_string(a);
        std::string s = "[";
        for (int i = 0; i < k_; ++i) {
            s += std::to_string(a % 3);
            a /= 3;
            if (i + 1 < k_) s += ",";
        }
        return s + "]";
    }

    // Embedding of this field into `big` (degrees must divide): the image of
    // the generator is the smallest root of this field's modulus in `big`.
    std::vector<unsigned> embedding_into(const Fq& big) const {
        if (big.k_ % k_ != 0) throw std::invalid_argument("Fq: no embedding");
        unsigned root = 0;
        bool found = false;
        for (unsigned x = 0; x < big.q_ && !found; ++x) {
            unsigned acc = 0, p = big.one();
            for (size_t i = 0; i < mod_.size(); ++i) {
                acc = big.add(acc, big.mul(big.from_int(mod_[i]), p));
                p = big.mul(p, x);
            }
            if (acc == 0) { root = x; found = true; }
        }
        if (!found) throw std::logic_error("Fq: embedding root not found");
        std::vector<unsigned> img(q_);
        for (unsigned a = 0; a < q_; ++a) {
            unsigned acc = 0, p = big.one(), aa = a;
            for (int i = 0; i < k_; ++i) {
                acc = big.add(acc, big.mul(big.from_int(static_cast<long>(aa % 3)), p));
                p = big.mul(p, root);
                aa /= 3;
            }
            img[a] = acc;
        }
        return img;
    }

  private:
    void build_tables() {
        mul_t_.assign(static_cast<size_t>(q_) * q_, 0);
        for (unsigned a = 0; a < q_; ++a)
            for (unsigned b = 0; b < q_; ++b)
                mul_t_[a * q_ + b] = mul_slow(a, b);
        inv_t_.assign(q_, 0);
        for (unsigned a = 1; a < q_; ++a)
            for (unsigned b = 1; b < q_; ++b)
                if (mul_t_[a * q_ + b] == 1) { inv_t_[a] = b; break; }
    }

    unsigned mul_slow(unsigned a, unsigned b) const {
        std::vector<int> pa(static_cast<size_t>(k_)), pb(static_cast<size_t>(k_));
        for (int i = 0; i < k_; ++i) { pa[i] = static_cast<int>(a % 3); a /= 3; }
        for (int i = 0; i < k_; ++i) { pb[i] = static_cast<int>(b % 3); b /= 3; }
        std::vector<int> prod(static_cast<size_t>(2 * k_ - 1), 0);
        for (int i = 0; i < k_; ++i)
            for (int j = 0; j < k_; ++j)
                prod[i + j] = (prod[i + j] + pa[i] * pb[j]) % 3;
        for (int i = 2 * k_ - 2; i >= k_; --i) {
            int c = prod[i];
            if (!c) continue;
            for (int j = 0; j <= k_; ++j)
                prod[i - k_ + j] = ((prod[i - k_ + j] - c * mod_[j]) % 3 + 3) % 3;
        }
        unsigned out = 0, p = 1;
        for (int i = 0; i < k_; ++i) { out += static_cast<unsigned>(prod[i]) * p; p *= 3; }
        return out;
    }

    // the quotient ring is a field iff every nonzero element is invertible
    bool is_irreducible_check() const {
        if (k_ == 1) return true;
        for (unsigned a = 1; a < q_; ++a)
            if (inv_t_[a] == 0) return false;
        return true;
    }

    int k_;
    unsigned q_;
    std::vector<int> mod_;
    std::vector<unsigned> mul_t_;
    std::vector<unsigned> inv_t_;
};

// Dense univariate polynomials over Fq, coefficient index = degree.
struct FqPoly {
    std::vector<unsigned> c;

    static FqPoly zero() { return FqPoly{}; }
    bool is_zero() const { return c.empty(); }
    int deg() const { return static_cast<int>(c.size()) - 1; }
    void strip() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
};

inline FqPoly fq_add(const Fq& F, const FqPoly& a, const FqPoly& b) {
    FqPoly out;
    out.c.resize(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < out.c.size(); ++i) {
        unsigned x = i < a.c.size() ? a.c[i] : 0;
        unsigned y = i < b.c.size() ? b.c[i] : 0;
        out.c[i] = F.add(x, y);
    }
    out.strip();
    return out;
}

inline FqPoly fq_mul(const Fq& F, const FqPoly& a, const FqPoly& b) {
    if (a.is_zero() || b.is_zero()) return FqPoly{};
    FqPoly out;
    out.c.assign(a.c.size() + b.c.size() - 1, 0);
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j)
            out.c[i + j] = F.add(out.c[i + j], F.mul(a.c[i], b.c[j]));
    out.strip();
    return out;
}

inline FqPoly fq_scale(const Fq& F, const FqPoly& a, unsigned s) {
    FqPoly out = a;
    for (auto& x : out.c) x = F.mul(x, s);
    out.strip();
    return out;
}

inline unsigned fq_eval(const Fq& F, const FqPoly& a, unsigned x) {
    unsigned acc = 0;
    for (size_t i = a.c.size(); i-- > 0;) acc = F.add(F.mul(acc, x), a.c[i]);
    return acc;
}

// division with remainder; divisor need not be monic
inline std::pair<FqPoly, FqPoly> fq_divmod(const Fq& F, FqPoly a, FqPoly b) {
    b.strip();
    if (b.is_zero()) throw std::domain_error("FqPoly: division by zero");
    a.strip();
    FqPoly q;
    if (a.deg() >= b.deg()) q.c.assign(static_cast<size_t>(a.deg() - b.deg()) + 1, 0);
    unsigned linv = F.inv(b.c.back());
    while (!a.is_zero() && a.deg() >= b.deg()) {
        unsigned f = F.mul(a.c.back(), linv);
        int shift = a.deg() - b.deg();
        q.c[static_cast<size_t>(shift)] = f;
        for (size_t i = 0; i < b.c.size(); ++i)
            a.c[static_cast<size_t>(shift) + i] =
                F.sub(a.c[static_cast<size_t>(shift) + i], F.mul(f, b.c[i]));
        a.strip();
    }
    q.strip();
    return {q, a};
}

inline FqPoly fq_gcd(const Fq& F, FqPoly a, FqPoly b) {
    a.strip(); b.strip();
    while (!b.is_zero()) {
        auto [q, r] = fq_divmod(F, a, b);
        a = b;
        b = r;
    }
    if (!a.is_zero()) a = fq_scale(F, a, F.inv(a.c.back()));
    return a;
}

inline std::vector<unsigned> fq_roots(const Fq& F, const FqPoly& a) {
    std::vector<unsigned> out;
    for (unsigned x = 0; x < F.q(); ++x)
        if (fq_eval(F, a, x) == 0) out.push_back(x);
    return out;
}

}  // namespace semired
