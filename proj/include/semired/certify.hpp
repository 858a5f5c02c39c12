#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semired/fq.hpp"
#include "semired/rational.hpp"
#include "semired/tower.hpp"
#include "semired/value.hpp"

namespace semired {

// Local analysis of monic polynomials over a tower level: Newton polygons,
// residual polynomials and (where needed) one layer of key polynomials
// (second-order polygons). This is what certifies tower extensions and
// decides local factor shapes. Depth 2 suffices for every extension these
// scenarios use (wild ramification index at most 9 = 3^2).

struct LocalScene {
    const Tower* tw;
    int level;
    long e;        // value group (1/e)Z
    const Fq* F;   // residue field (F_3 unless an unramified step was taken)

    Elem scale(const Rat& gamma) const { return tw->scale_elem(level, gamma); }
    unsigned residue(const Elem& x) const { return tw->residue(x, *F); }
    Elem lift_res(unsigned r) const { return tw->lift_residue(level, r, *F); }
};

inline LocalScene scene_of(const Tower& tw, const Fq& F) {
    return LocalScene{&tw, tw.levels(), tw.e(), &F};
}

struct NPSeg {
    Rat rootval;   // = -(geometric slope); roots of this segment have this valuation
    int length;
    int i0, i1;    // endpoint indices
    Rat v0, v1;    // endpoint heights
};

struct NPData {
    int ord0 = 0;
    std::vector<NPSeg> segs;
    std::vector<Value> vals;
};

inline NPData np_of_poly(const LocalScene& sc, const std::vector<Elem>& poly) {
    NPData out;
    out.vals.reserve(poly.size());
    for (const auto& c : poly) out.vals.push_back(sc.tw->valuation(c));
    std::vector<std::pair<int, Rat>> pts;
    for (size_t i = 0; i < poly.size(); ++i)
        if (!out.vals[i].is_infinite()) pts.emplace_back(static_cast<int>(i), out.vals[i].finite());
    if (pts.empty()) throw std::invalid_argument("newton polygon of zero polynomial");
    out.ord0 = pts.front().first;
    std::vector<std::pair<int, Rat>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull[hull.size() - 1];
            // pop b if it is not strictly below segment a-p
            if (Rat(b.first - a.first) * (p.second - a.second) <=
                Rat(p.first - a.first) * (b.second - a.second))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    for (size_t i = 0; i + 1 < hull.size(); ++i) {
        NPSeg s;
        s.i0 = hull[i].first;
        s.i1 = hull[i + 1].first;
        s.v0 = hull[i].second;
        s.v1 = hull[i + 1].second;
        s.length = s.i1 - s.i0;
        s.rootval = -(s.v1 - s.v0) / (s.i1 - s.i0);
        out.segs.push_back(std::move(s));
    }
    return out;
}

inline long den_rel(const Rat& mu, long egroup) {
    Rat m = mu * egroup;
    return rat_den(m);
}

// residual polynomial of one segment (first order)
inline FqPoly residual_of_seg(const LocalScene& sc, const std::vector<Elem>& poly,
                              const NPSeg& seg, const NPData& np, long* eprime_out) {
    long ep = den_rel(seg.rootval, sc.e);
    *eprime_out = ep;
    int d = seg.length / static_cast<int>(ep);
    FqPoly R;
    R.c.assign(static_cast<size_t>(d) + 1, 0);
    for (int j = 0; j <= d; ++j) {
        int i = seg.i0 + j * static_cast<int>(ep);
        Rat target = seg.v0 - seg.rootval * (i - seg.i0);
        if (!np.vals[static_cast<size_t>(i)].is_infinite() &&
            np.vals[static_cast<size_t>(i)].finite() == target) {
            Elem u = sc.tw->mul(poly[static_cast<size_t>(i)], sc.scale(-target));
            R.c[static_cast<size_t>(j)] = sc.residue(u);
        }
    }
    R.strip();
    return R;
}

// poly(y + c) via Horner: out <- out*(y + c) + coef, highest coefficient first
inline std::vector<Elem> taylor_shift_elems(const Tower& tw, const std::vector<Elem>& poly,
                                            const Elem& c) {
    std::vector<Elem> out;
    for (size_t idx = poly.size(); idx-- > 0;) {
        std::vector<Elem> next(out.size() + 1, tw.zero(c.level));
        for (size_t i = 0; i < out.size(); ++i) next[i + 1] = out[i];
        for (size_t i = 0; i < out.size(); ++i)
            next[i] = tw.add(next[i], tw.mul(out[i], c));
        next[0] = tw.add(next[0], poly[idx]);
        out = std::move(next);
    }
    return out;
}

// roots with multiplicity plus rootless cofactor
inline std::pair<std::vector<std::pair<unsigned, int>>, FqPoly>
fq_roots_mult(const Fq& F, FqPoly R) {
    std::vector<std::pair<unsigned, int>> roots;
    R.strip();
    while (R.deg() >= 1) {
        bool found = false;
        for (unsigned x = 0; x < F.q() && !found; ++x) {
            if (fq_eval(F, R, x) == 0) {
                FqPoly lin;
                lin.c = {F.neg(x), 1};
                auto [q, r] = fq_divmod(F, R, lin);
                (void)r;
                R = q;
                bool hit = false;
                for (auto& [rt, m] : roots)
                    if (rt == x) { ++m; hit = true; break; }
                if (!hit) roots.emplace_back(x, 1);
                found = true;
            }
        }
        if (!found) break;
    }
    return {roots, R};
}

struct Piece {
    long degree = 0;
    long e_rel = 0, f_rel = 0;
    bool certified = false;
    std::string note;
};

struct TypeData {
    Elem shift;               // accumulated depth-1 shift c
    Rat mu1;                  // depth-1 slope (v(gen - c))
    bool has_depth2 = false;
    std::vector<Elem> phi2;   // key polynomial in the shifted variable
    Rat mu2;                  // v(phi2(root))
};

struct AnalyzeResult {
    std::vector<Piece> pieces;
    TypeData type;
    bool irreducible() const {
        return pieces.size() == 1 && pieces[0].certified;
    }
    std::string notes() const {
        std::string s;
        for (const auto& p : pieces) {
            if (!s.empty()) s += "; ";
            s += "deg " + std::to_string(p.degree) + ": " + p.note;
        }
        return s;
    }
};

namespace detail {

inline std::optional<Rat> d2_first_slope(const LocalScene& sc, const std::vector<Elem>& g,
                                         const std::vector<Elem>& phi2, const Rat& mu1);

// phi-adic expansion: g = sum a_i phi^i with deg a_i < deg phi
inline std::vector<std::vector<Elem>> phi_expansion(const Tower& tw, std::vector<Elem> g,
                                                    const std::vector<Elem>& phi) {
    std::vector<std::vector<Elem>> out;
    auto strip = [&](std::vector<Elem>& p) {
        while (!p.empty() && tw.is_zero(p.back())) p.pop_back();
    };
    strip(g);
    size_t dphi = phi.size() - 1;
    while (!g.empty()) {
        if (g.size() - 1 < dphi) {
            out.push_back(g);
            break;
        }
        // divide g by monic phi
        std::vector<Elem> quo(g.size() - dphi, tw.zero(g[0].level));
        std::vector<Elem> rem = g;
        for (size_t sh = rem.size() - dphi; sh-- > 0;) {
            size_t topi = sh + dphi;
            if (topi >= rem.size()) continue;
            Elem c = rem[topi];
            if (tw.is_zero(c)) continue;
            quo[sh] = c;
            for (size_t j = 0; j <= dphi; ++j)
                rem[sh + j] = tw.sub(rem[sh + j], tw.mul(c, phi[j]));
        }
        rem.resize(dphi, tw.zero(g[0].level));
        strip(rem);
        out.push_back(rem);
        g = std::move(quo);
        strip(g);
    }
    return out;
}

// V1 value of a (deg < e1) coefficient polynomial, plus dominant y-power
inline std::pair<Value, int> v1_of(const LocalScene& sc, const std::vector<Elem>& a,
                                   const Rat& mu1) {
    Value best = Value::infinity();
    int kk = -1;
    for (size_t j = 0; j < a.size(); ++j) {
        Value v = sc.tw->valuation(a[j]);
        if (v.is_infinite()) continue;
        Value tot = Value(v.finite() + mu1 * static_cast<long>(j));
        if (tot < best) {
            best = tot;
            kk = static_cast<int>(j);
        }
    }
    return {best, kk};
}

struct D2Data {
    std::vector<std::pair<int, Rat>> pts;           // (i, V1(a_i)) finite ones
    std::vector<std::pair<Value, int>> v1;          // per i
    std::vector<std::vector<Elem>> coeffs;
};

inline D2Data d2_points(const LocalScene& sc, const std::vector<Elem>& g,
                        const std::vector<Elem>& phi2, const Rat& mu1) {
    D2Data out;
    out.coeffs = phi_expansion(*sc.tw, g, phi2);
    for (size_t i = 0; i < out.coeffs.size(); ++i) {
        if (out.coeffs[i].empty()) {
            out.v1.emplace_back(Value::infinity(), -1);
            continue;
        }
        auto pv = v1_of(sc, out.coeffs[i], mu1);
        out.v1.push_back(pv);
        if (!pv.first.is_infinite())
            out.pts.emplace_back(static_cast<int>(i), pv.first.finite());
    }
    return out;
}

inline std::vector<NPSeg> hull_of(const std::vector<std::pair<int, Rat>>& pts) {
    std::vector<std::pair<int, Rat>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull[hull.size() - 1];
            if (Rat(b.first - a.first) * (p.second - a.second) <=
                Rat(p.first - a.first) * (b.second - a.second))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    std::vector<NPSeg> segs;
    for (size_t i = 0; i + 1 < hull.size(); ++i) {
        NPSeg s;
        s.i0 = hull[i].first;
        s.i1 = hull[i + 1].first;
        s.v0 = hull[i].second;
        s.v1 = hull[i + 1].second;
        s.length = s.i1 - s.i0;
        s.rootval = -(s.v1 - s.v0) / (s.i1 - s.i0);
        segs.push_back(std::move(s));
    }
    return segs;
}

inline std::optional<Rat> d2_first_slope(const LocalScene& sc, const std::vector<Elem>& g,
                                         const std::vector<Elem>& phi2, const Rat& mu1) {
    D2Data d = d2_points(sc, g, phi2, mu1);
    if (d.pts.size() < 2 || d.pts.front().first != 0) return std::nullopt;
    auto segs = hull_of(d.pts);
    if (segs.empty()) return std::nullopt;
    return segs.front().rootval;
}

// order-2 residual polynomial with explicit grading fold: residual
// coefficients r_j = res(unit of a_{i_j}) * rho^{fold_j}
inline FqPoly d2_residual(const LocalScene& sc, const NPSeg& seg, long e1, const Rat& mu1,
                          long egroup1, const D2Data& dd, unsigned rho) {
    const Fq& F = *sc.F;
    long e2 = den_rel(seg.rootval, egroup1);
    int d = seg.length / static_cast<int>(e2);
    struct Entry {
        int j;
        int kk;
        unsigned ur;
        bool present;
    };
    std::vector<Entry> entries;
    for (int j = 0; j <= d; ++j) {
        int i = seg.i0 + j * static_cast<int>(e2);
        Rat target = seg.v0 - seg.rootval * (i - seg.i0);
        const auto& [vv, kk] = dd.v1[static_cast<size_t>(i)];
        if (!vv.is_infinite() && vv.finite() == target) {
            const Elem& dom = dd.coeffs[static_cast<size_t>(i)][static_cast<size_t>(kk)];
            Value vd = sc.tw->valuation(dom);
            Elem u = sc.tw->mul(dom, sc.scale(-vd.finite()));
            entries.push_back({j, kk, sc.residue(u), true});
        } else {
            entries.push_back({j, 0, 0, false});
        }
    }
    // per-step change in y-grading: unique dk in (-e1, e1) with
    // e2*mu2 - dk*mu1 in (1/e)Z
    long dk = 0;
    bool found = false;
    for (long kk = -(e1 - 1); kk < e1; ++kk) {
        Rat t = (seg.rootval * e2 - mu1 * kk) * sc.e;
        if (rat_den(t) == 1) { dk = kk; found = true; break; }
    }
    if (!found) throw std::logic_error("d2_residual: no grading step");
    int j0 = -1, k0 = 0;
    for (const auto& en : entries)
        if (en.present) { j0 = en.j; k0 = en.kk; break; }
    FqPoly R;
    R.c.assign(static_cast<size_t>(d) + 1, 0);
    long qorder = static_cast<long>(F.q()) - 1;
    for (const auto& en : entries) {
        if (!en.present) continue;
        long expect = k0 - static_cast<long>(en.j - j0) * dk;
        long diff = expect - en.kk;
        if (diff % e1 != 0) throw std::logic_error("d2_residual: grading fold not integral");
        long fold = diff / e1;
        long fm = fold % qorder;
        if (fm < 0) fm += qorder;
        unsigned co = F.mul(en.ur, F.pow(rho, fm));
        R.c[static_cast<size_t>(en.j)] = co;
    }
    R.strip();
    return R;
}

inline std::vector<Piece> depth2(const LocalScene& sc, const std::vector<Elem>& g,
                                 const Rat& mu1, long e1, unsigned rho, int budget,
                                 TypeData* type) {
    const Tower& tw = *sc.tw;
    const Fq& F = *sc.F;
    long n = static_cast<long>(g.size()) - 1;
    long L2 = n / e1;
    Elem R0 = tw.mul(sc.lift_res(rho), sc.scale(mu1 * e1));
    std::vector<Elem> phi2;
    phi2.push_back(tw.neg(R0));
    for (long i = 1; i < e1; ++i) phi2.push_back(tw.zero(sc.level));
    phi2.push_back(tw.one(sc.level));
    long egroup1 = 0;
    {
        long d1 = sc.e;
        long d2v = rat_den(mu1);
        long gcd_ = std::gcd(d1, d2v);
        egroup1 = d1 / gcd_ * d2v;
    }
    for (int round = 0; round < budget; ++round) {
        D2Data dd = d2_points(sc, g, phi2, mu1);
        if (dd.pts.empty() || dd.pts.front().first != 0)
            return {Piece{n, 0, 0, false, "order-2 expansion degenerate"}};
        auto segs = hull_of(dd.pts);
        if (segs.size() != 1) {
            // order-2 polygon split: the polynomial factors; report shapes
            std::vector<Piece> out;
            for (const auto& s : segs) {
                long e2 = den_rel(s.rootval, egroup1);
                if (e2 == s.length)
                    out.push_back(Piece{e1 * s.length, e1 * e2, 1, true,
                                        "order-2 segment tot.ram."});
                else
                    out.push_back(Piece{e1 * s.length, 0, 0, false,
                                        "order-2 segment unresolved"});
            }
            return out;
        }
        NPSeg s = segs[0];
        if (!(s.rootval > mu1 * e1))
            return {Piece{n, 0, 0, false, "order-2 slope did not advance"}};
        long e2 = den_rel(s.rootval, egroup1);
        if (e2 == L2) {
            type->has_depth2 = true;
            type->phi2 = phi2;
            type->mu2 = s.rootval;
            return {Piece{n, e1 * e2, 1, true,
                          "order-2 slope " + rat_str(s.rootval) + ", e2'=len"}};
        }
        FqPoly R2 = d2_residual(sc, s, e1, mu1, egroup1, dd, rho);
        auto [roots, rem] = fq_roots_mult(F, R2);
        int remdeg = rem.is_zero() ? 0 : rem.deg();
        bool powerlin = roots.size() == 1 && remdeg <= 0 && roots[0].second > 1 &&
                        static_cast<long>(roots[0].second) * e2 == L2;
        if (powerlin && e2 == 1) {
            // refine phi2: add a term of V1-value = slope; exact unit found by
            // search over the (tiny) residue field
            long kstar = -1;
            for (long kk = 0; kk < e1; ++kk) {
                Rat t = (s.rootval - mu1 * kk) * sc.e;
                if (rat_den(t) == 1) { kstar = kk; break; }
            }
            if (kstar < 0) return {Piece{n, 0, 0, false, "order-2 refinement: no kstar"}};
            Rat gam = s.rootval - mu1 * kstar;
            std::optional<std::vector<Elem>> best;
            Rat bestmu = s.rootval;
            for (unsigned lam = 1; lam < F.q(); ++lam) {
                Elem t = tw.mul(sc.lift_res(lam), sc.scale(gam));
                std::vector<Elem> cand = phi2;
                cand[static_cast<size_t>(kstar)] =
                    tw.add(cand[static_cast<size_t>(kstar)], t);
                auto mu2c = d2_first_slope(sc, g, cand, mu1);
                if (mu2c && *mu2c > bestmu) {
                    best = cand;
                    bestmu = *mu2c;
                }
            }
            if (!best)
                return {Piece{n, 0, 0, false, "order-2 refinement found no advancing unit"}};
            phi2 = *best;
            continue;
        }
        if (roots.size() == 1 && remdeg <= 0 && roots[0].second == 1 && L2 == e2) {
            type->has_depth2 = true;
            type->phi2 = phi2;
            type->mu2 = s.rootval;
            return {Piece{n, e1 * e2, 1, true, "order-2 simple residual"}};
        }
        if (roots.empty() && remdeg > 0 && static_cast<long>(remdeg) * e2 == L2 &&
            remdeg <= 3) {
            bool irr = true;
            for (unsigned x = 0; x < F.q(); ++x)
                if (fq_eval(F, rem, x) == 0) { irr = false; break; }
            if (irr && remdeg >= 2) {
                type->has_depth2 = true;
                type->phi2 = phi2;
                type->mu2 = s.rootval;
                return {Piece{n, e1 * e2, remdeg, true,
                              "order-2 irreducible residual deg " + std::to_string(remdeg)}};
            }
        }
        // split at order 2
        std::vector<Piece> out;
        for (auto& [rt, m] : roots) {
            if (m == 1)
                out.push_back(Piece{e1 * e2, e1 * e2, 1, true, "order-2 simple root"});
            else
                out.push_back(Piece{e1 * e2 * m, 0, 0, false, "order-2 repeated root"});
        }
        if (remdeg > 0)
            out.push_back(Piece{e1 * e2 * remdeg, 0, 0, false, "order-2 rootless part"});
        return out;
    }
    return {Piece{n, 0, 0, false, "order-2 budget exhausted"}};
}

}  // namespace detail

// Full local analysis: factors poly over the completion into certified
// pieces where the implemented criteria apply. For tower extension the
// result must be a single certified piece.
inline AnalyzeResult analyze_local(const LocalScene& sc, std::vector<Elem> poly, int budget = 200) {
    const Tower& tw = *sc.tw;
    const Fq& F = *sc.F;
    AnalyzeResult res;
    res.type.shift = tw.zero(sc.level);
    while (!poly.empty() && tw.is_zero(poly.back())) poly.pop_back();
    if (poly.size() < 2) throw std::invalid_argument("analyze_local: degree >= 1 required");
    for (int round = 0; round < budget; ++round) {
        NPData np = np_of_poly(sc, poly);
        if (np.ord0 > 0 || np.segs.size() != 1) {
            if (np.ord0 > 0)
                res.pieces.push_back(Piece{np.ord0, 1, 1, true,
                                           "exact root at accumulated shift (mult " +
                                               std::to_string(np.ord0) + ")"});
            for (const auto& seg : np.segs) {
                long ep = 0;
                if (den_rel(seg.rootval, sc.e) == seg.length) {
                    res.pieces.push_back(Piece{seg.length, seg.length, 1, true,
                                               "segment slope " + rat_str(seg.rootval) +
                                                   " tot.ram."});
                    continue;
                }
                FqPoly R = residual_of_seg(sc, poly, seg, np, &ep);
                auto [roots, rem] = fq_roots_mult(F, R);
                int remdeg = rem.is_zero() ? 0 : rem.deg();
                for (auto& [rt, m] : roots) {
                    if (m == 1)
                        res.pieces.push_back(Piece{ep, ep, 1, true,
                                                   "slope " + rat_str(seg.rootval) +
                                                       " simple residual root"});
                    else
                        res.pieces.push_back(Piece{ep * m, 0, 0, false,
                                                   "slope " + rat_str(seg.rootval) +
                                                       " repeated residual root"});
                }
                if (remdeg > 0) {
                    bool irr = remdeg <= 3;
                    for (unsigned x = 0; x < F.q() && irr; ++x)
                        if (fq_eval(F, rem, x) == 0) irr = false;
                    res.pieces.push_back(Piece{ep * remdeg, irr ? ep : 0,
                                               irr ? remdeg : 0, irr && remdeg <= 3,
                                               "slope " + rat_str(seg.rootval) +
                                                   " rootless residual deg " +
                                                   std::to_string(remdeg)});
                }
            }
            return res;
        }
        const NPSeg& seg = np.segs[0];
        long e1 = den_rel(seg.rootval, sc.e);
        if (e1 == seg.length) {
            res.pieces.push_back(Piece{seg.length, e1, 1, true,
                                       "single slope " + rat_str(seg.rootval) + ", e'=deg"});
            res.type.mu1 = seg.rootval;
            return res;
        }
        long ep = 0;
        FqPoly R = residual_of_seg(sc, poly, seg, np, &ep);
        auto [roots, rem] = fq_roots_mult(F, R);
        int remdeg = rem.is_zero() ? 0 : rem.deg();
        bool powerlin = roots.size() == 1 && remdeg <= 0 && roots[0].second > 1 &&
                        static_cast<long>(roots[0].second) * ep == seg.length;
        if (powerlin && ep == 1) {
            Elem c = tw.mul(sc.lift_res(roots[0].first), sc.scale(seg.rootval));
            res.type.shift = tw.add(res.type.shift, c);
            poly = taylor_shift_elems(tw, poly, c);
            continue;
        }
        if (powerlin && ep > 1) {
            res.type.mu1 = seg.rootval;
            auto pieces = detail::depth2(sc, poly, seg.rootval, ep, roots[0].first,
                                         budget - round, &res.type);
            res.pieces = std::move(pieces);
            return res;
        }
        if (roots.size() == 1 && remdeg <= 0 && roots[0].second == 1 &&
            seg.length == ep) {
            res.pieces.push_back(Piece{seg.length, ep, 1, true, "simple residual root"});
            res.type.mu1 = seg.rootval;
            return res;
        }
        if (roots.empty() && remdeg > 0 && static_cast<long>(remdeg) * ep == seg.length) {
            bool irr = remdeg <= 3;
            for (unsigned x = 0; x < F.q() && irr; ++x)
                if (fq_eval(F, rem, x) == 0) irr = false;
            if (irr) {
                res.pieces.push_back(Piece{seg.length, ep, remdeg, true,
                                           "irreducible residual deg " +
                                               std::to_string(remdeg)});
                res.type.mu1 = seg.rootval;
                return res;
            }
        }
        // genuine split (or unhandled): classify per residual factor
        for (auto& [rt, m] : roots) {
            if (m == 1)
                res.pieces.push_back(Piece{ep, ep, 1, true, "simple residual root"});
            else
                res.pieces.push_back(Piece{ep * m, 0, 0, false, "repeated residual root"});
        }
        if (remdeg > 0) {
            bool irr = remdeg <= 3;
            for (unsigned x = 0; x < F.q() && irr; ++x)
                if (fq_eval(F, rem, x) == 0) irr = false;
            res.pieces.push_back(Piece{ep * remdeg, irr ? ep : 0, irr ? remdeg : 0,
                                       irr, "rootless residual deg " + std::to_string(remdeg)});
        }
        return res;
    }
    res.pieces.push_back(Piece{static_cast<long>(poly.size()) - 1, 0, 0, false,
                               "precision exhausted during local analysis"});
    return res;
}

// Extends a tower by a certified-irreducible monic polynomial. Degree-1
// input is absorbed as a no-op. Rejects non-monic and non-certifiable input.
inline Tower tower_extend(const Tower& tw, const std::string& name,
                          const std::vector<Elem>& defpoly, const Fq& F3,
                          int budget = 200) {
    if (defpoly.empty()) throw std::invalid_argument("tower_extend: empty polynomial");
    std::vector<Elem> p = defpoly;
    while (!p.empty() && tw.is_zero(p.back())) p.pop_back();
    if (p.size() < 2) throw std::invalid_argument("tower_extend: zero or constant polynomial");
    if (!tw.equal(p.back(), tw.one(p.back().level)))
        throw std::invalid_argument("tower_extend: defining polynomial must be monic");
    if (p.size() == 2) return tw;  // degree-1 extension is the identity
    LocalScene sc = scene_of(tw, F3);
    AnalyzeResult ar = analyze_local(sc, p, budget);
    if (!ar.irreducible())
        throw std::domain_error("tower_extend: reducibility detected or not certifiable: " +
                                ar.notes());
    const Piece& piece = ar.pieces[0];
    CertLevel cert;
    cert.e_rel = piece.e_rel;
    cert.f_rel = piece.f_rel;
    cert.note = piece.note;
    Tower out = tw;
    int newlevel = tw.levels() + 1;
    std::vector<Elem> dp = p;
    out.push_level(name, std::move(dp), cert);
    // record valuation atoms: gen - shift with value mu1; phi2(gen - shift)
    // with value mu2 when depth 2 was used
    Elem g = out.gen(newlevel);
    Elem shifted = out.sub(g, out.lift(ar.type.shift, newlevel));
    CertLevel& stored = out.cert_mut(newlevel);
    if (piece.f_rel == 1 || piece.e_rel > 1) {
        Value v1 = out.valuation(shifted);
        if (v1.is_infinite()) throw std::logic_error("tower_extend: shifted generator is zero");
        stored.atoms.emplace_back(shifted.a, v1.finite());
        if (ar.type.has_depth2) {
            Elem w2 = out.zero(newlevel);
            for (size_t i = ar.type.phi2.size(); i-- > 0;) {
                w2 = out.mul(w2, shifted);
                w2 = out.add(w2, out.lift(ar.type.phi2[i], newlevel));
            }
            Value v2 = out.valuation(w2);
            if (v2.is_infinite() || v2.finite() != ar.type.mu2)
                throw std::logic_error("tower_extend: key-polynomial value mismatch");
            stored.atoms.emplace_back(w2.a, v2.finite());
        }
        // consistency: e_rel must match the group index generated by atoms
    }
    if (piece.f_rel == 2) {
        // unramified quadratic step: record the generator as the residue-field
        // generator; only the i^2 = -1 presentation is supported
        out.set_unram_gen(out.gen(newlevel));
    }
    return out;
}

}  // namespace semired
