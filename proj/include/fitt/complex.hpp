#pragma once

// Free complexes over (Z/p^N)[G] in the row-vector convention: d_n is a
// rank_n x rank_{n-1} matrix and a chain x in degree n maps to x * d_n.

#include "fitt/howell.hpp"
#include "fitt/ideal.hpp"
#include "fitt/parallel.hpp"
#include "fitt/ring.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fitt {

class FreeComplex {
public:
    FreeComplex() = default;
    explicit FreeComplex(ContextPtr ctx) : ctx_(std::move(ctx)) {}

    const ContextPtr& context() const { return ctx_; }
    /// Highest degree with a basis.
    int max_degree() const { return static_cast<int>(labels_.size()) - 1; }
    std::size_t rank(int n) const {
        return n < 0 || n > max_degree() ? 0 : labels_[static_cast<std::size_t>(n)].size();
    }
    const std::vector<std::string>& labels(int n) const { return labels_.at(static_cast<std::size_t>(n)); }
    /// Boundary d_n from degree n to n-1; n >= 1.
    const RingMatrix& d(int n) const { return d_.at(static_cast<std::size_t>(n)); }
    RingMatrix& d(int n) { return d_.at(static_cast<std::size_t>(n)); }

    /// Append the next degree with its boundary into the previous one.
    void push_degree(std::vector<std::string> labels, RingMatrix boundary) {
        if (labels_.empty()) {
            labels_.push_back(std::move(labels));
            d_.emplace_back(ctx_, labels_.back().size(), 0);
            return;
        }
        if (boundary.rows() != labels.size() || boundary.cols() != labels_.back().size())
            throw Error("FreeComplex: boundary shape does not match ranks");
        labels_.push_back(std::move(labels));
        d_.push_back(std::move(boundary));
    }
    void push_degree0(std::vector<std::string> labels) { push_degree(std::move(labels), RingMatrix()); }

    /// First degree n >= 2 with d_{n-1} d_n nonzero, if any.
    std::optional<int> boundary_defect() const {
        for (int n = 2; n <= max_degree(); ++n)
            if (!(d(n) * d(n - 1)).is_zero()) return n;
        return std::nullopt;
    }
    bool is_complex() const { return !boundary_defect().has_value(); }

    /// Keep degrees 0..n.
    FreeComplex truncated(int n) const {
        FreeComplex c(*this);
        auto k = static_cast<std::size_t>(std::max(n, -1) + 1);
        if (c.labels_.size() > k) {
            c.labels_.resize(k);
            c.d_.resize(k);
        }
        return c;
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "complex p=" << ctx_->p() << " N=" << ctx_->coeff_precision() << " group=";
        const auto& o = ctx_->group().factor_orders();
        os << '(';
        for (std::size_t i = 0; i < o.size(); ++i) os << (i ? "," : "") << o[i];
        os << ")\n";
        for (int n = 0; n <= max_degree(); ++n) {
            os << "degree " << n << " rank " << rank(n) << '\n';
            os << "  basis:";
            for (const auto& l : labels(n)) os << ' ' << (l.empty() ? "1" : l);
            os << '\n';
            if (n == 0) continue;
            for (std::size_t i = 0; i < rank(n); ++i)
                for (std::size_t j = 0; j < rank(n - 1); ++j) {
                    const auto& x = d(n).at(i, j);
                    if (!x.is_zero())
                        os << "  d(" << (labels(n)[i].empty() ? "1" : labels(n)[i]) << " -> "
                           << (labels(n - 1)[j].empty() ? "1" : labels(n - 1)[j]) << ") = " << x.to_string() << '\n';
                }
        }
        return os.str();
    }

private:
    ContextPtr ctx_;
    std::vector<std::vector<std::string>> labels_;
    std::vector<RingMatrix> d_;
};

using ComplexPtr = std::shared_ptr<const FreeComplex>;

/// Degree-wise matrices f_n: rank_src(n) x rank_tgt(n).
struct ComplexMorphism {
    ComplexPtr source, target;
    std::vector<RingMatrix> f;

    int max_degree() const { return static_cast<int>(f.size()) - 1; }

    /// First degree n >= 1 where d_src f_{n-1} != f_n d_tgt.
    std::optional<int> square_defect() const {
        for (int n = 1; n <= max_degree(); ++n) {
            if (n > source->max_degree() || n > target->max_degree()) break;
            if (!(source->d(n) * f[static_cast<std::size_t>(n - 1)] ==
                  f[static_cast<std::size_t>(n)] * target->d(n)))
                return n;
        }
        return std::nullopt;
    }
    void verify() const {
        if (auto n = square_defect()) throw Error("morphism: square in degree " + std::to_string(*n) + " does not commute");
    }
};

// ---------------------------------------------------------------------------
// Constructions

inline constexpr std::size_t default_rank_budget = 2000;

/// Standard resolution of Z_p over Z_p[h] tensored up to the ambient group:
/// degree n has basis all n-tuples of elements of h.
inline FreeComplex bar_resolution(const ContextPtr& ctx, const Subgroup& h, int max_degree,
                                  std::size_t budget = default_rank_budget) {
    if (!(h.parent() == ctx->group())) throw Error("bar_resolution: subgroup of a different group");
    const auto& els = h.elements();
    const auto m = els.size();
    std::vector<std::size_t> pos(ctx->group_order(), 0);
    for (std::size_t i = 0; i < m; ++i) pos[els[i]] = i;
    std::size_t size = 1;
    for (int n = 0; n <= max_degree; ++n) {
        if (size > budget)
            throw Error("bar_resolution: degree " + std::to_string(n) + " rank " + std::to_string(size) +
                        " exceeds the budget " + std::to_string(budget));
        if (n < max_degree) size *= m;
    }
    const auto& grp = ctx->group();
    auto label = [&](const std::vector<std::size_t>& t) {
        std::string s = "(";
        for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + grp.element_string(els[t[i]]);
        return s + ")";
    };
    auto index = [&](const std::vector<std::size_t>& t) {
        std::size_t k = 0;
        for (auto x : t) k = k * m + x;
        return k;
    };
    FreeComplex c(ctx);
    c.push_degree0({"()"});
    std::size_t prev_rank = 1;
    for (int n = 1; n <= max_degree; ++n) {
        std::size_t rank = prev_rank * m;
        RingMatrix d(ctx, rank, prev_rank);
        std::vector<std::string> labels(rank);
        std::vector<std::size_t> t(static_cast<std::size_t>(n), 0);
        for (std::size_t row = 0; row < rank; ++row) {
            // t = digits of row in base m
            std::size_t r = row;
            for (std::size_t i = t.size(); i-- > 0;) {
                t[i] = r % m;
                r /= m;
            }
            labels[row] = label(t);
            std::vector<std::size_t> face(t.begin() + 1, t.end());
            d.at(row, index(face)) += RingElement::group_element(ctx, els[t[0]]);
            for (std::size_t j = 1; j < t.size(); ++j) {
                std::vector<std::size_t> u;
                for (std::size_t i = 0; i < t.size(); ++i) {
                    if (i == j) continue;
                    if (i == j - 1)
                        u.push_back(pos[grp.mul(els[t[j - 1]], els[t[j]])]);
                    else
                        u.push_back(t[i]);
                }
                d.at(row, index(u)) += RingElement::constant(ctx, (j % 2) ? -1 : 1);
            }
            std::vector<std::size_t> last(t.begin(), t.end() - 1);
            d.at(row, index(last)) += RingElement::constant(ctx, (n % 2) ? -1 : 1);
        }
        c.push_degree(labels, d);
        prev_rank = rank;
    }
    return c;
}

inline FreeComplex bar_resolution(const ContextPtr& ctx, int max_degree, std::size_t budget = default_rank_budget) {
    return bar_resolution(ctx, Subgroup::whole(ctx->group()), max_degree, budget);
}

/// Inclusion of bar resolutions B(h) -> B(G) sending a tuple to itself.
inline ComplexMorphism bar_inclusion(const ComplexPtr& sub_bar, const ComplexPtr& bar) {
    ComplexMorphism f{sub_bar, bar, {}};
    const auto& ctx = bar->context();
    int top = std::min(sub_bar->max_degree(), bar->max_degree());
    for (int n = 0; n <= top; ++n) {
        std::map<std::string, std::size_t> where;
        for (std::size_t j = 0; j < bar->rank(n); ++j) where[bar->labels(n)[j]] = j;
        RingMatrix m(ctx, sub_bar->rank(n), bar->rank(n));
        for (std::size_t i = 0; i < sub_bar->rank(n); ++i) m.at(i, where.at(sub_bar->labels(n)[i])) = RingElement::one(ctx);
        f.f.push_back(m);
    }
    return f;
}

/// [... -> R --N--> R --(s-1)--> R -> 0], boundaries alternating s - 1 (odd
/// degrees) and the norm of <s> (even degrees). Basis labels var^n.
inline FreeComplex cyclic_complex(GroupIndex s, const ContextPtr& ctx, int max_degree, const std::string& var = "x") {
    auto m = ctx->group().element_order(s);
    auto tau = minus_one(s, ctx);
    auto nu = geometric_sum(s, m, ctx);
    FreeComplex c(ctx);
    c.push_degree0({""});
    for (int n = 1; n <= max_degree; ++n) {
        RingMatrix d(ctx, 1, 1);
        d.at(0, 0) = (n % 2) ? tau : nu;
        c.push_degree({var + (n == 1 ? "" : "^" + std::to_string(n))}, d);
    }
    return c;
}

/// Push a ring element along an injective group homomorphism given on indices.
inline RingElement embed_element(const RingElement& x, const ContextPtr& big, const std::vector<GroupIndex>& map) {
    RingElement r(big);
    const auto& small = x.context();
    for (int j = 0; j <= x.t_degree(); ++j)
        for (GroupIndex g = 0; g < small->group_order(); ++g)
            if (auto c = x.coeff(g, static_cast<std::size_t>(j))) r.set(map.at(g), static_cast<std::size_t>(j), c);
    return r;
}

/// Base change of a complex over a subgroup ring; map gives the embedding.
inline FreeComplex induce_complex(const FreeComplex& c, const ContextPtr& big, const std::vector<GroupIndex>& map) {
    if (map.size() != c.context()->group_order()) throw Error("induce_complex: embedding has the wrong size");
    if (c.context()->mod().q != big->mod().q) throw Error("induce_complex: coefficient precision mismatch");
    FreeComplex out(big);
    out.push_degree0(c.labels(0));
    for (int n = 1; n <= c.max_degree(); ++n) {
        const auto& d = c.d(n);
        RingMatrix e(big, d.rows(), d.cols());
        for (std::size_t i = 0; i < d.rows(); ++i)
            for (std::size_t j = 0; j < d.cols(); ++j) e.at(i, j) = embed_element(d.at(i, j), big, map);
        out.push_degree(c.labels(n), e);
    }
    return out;
}

/// Embedding of the cyclic group C_m (indices 0..m-1) onto <s>.
inline std::vector<GroupIndex> cyclic_embedding(GroupIndex s, const PGroup& g) {
    auto m = g.element_order(s);
    std::vector<GroupIndex> map(m);
    for (std::uint64_t k = 0; k < m; ++k) map[k] = g.power(s, k);
    return map;
}

namespace detail {

// Basis of a tensor product in degree n: one (degree, basis index) per factor.
struct TensorBasis {
    std::vector<std::vector<std::size_t>> degs, idx;
    std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, std::size_t> lookup;
};

inline TensorBasis tensor_basis(const std::vector<const FreeComplex*>& fs, int n) {
    TensorBasis b;
    const auto k = fs.size();
    std::vector<std::size_t> deg(k, 0);
    // Degree tuples with the first factor's degree descending, so rank-1
    // factors give monomials x_{l1}...x_{ln} (l1 <= ... <= ln) in lex order.
    std::function<void(std::size_t, int)> rec = [&](std::size_t l, int left) {
        if (l == k) {
            if (left != 0) return;
            std::vector<std::size_t> id(k, 0);
            std::function<void(std::size_t)> fill = [&](std::size_t m) {
                if (m == k) {
                    b.lookup[{deg, id}] = b.degs.size();
                    b.degs.push_back(deg);
                    b.idx.push_back(id);
                    return;
                }
                for (std::size_t i = 0; i < fs[m]->rank(static_cast<int>(deg[m])); ++i) {
                    id[m] = i;
                    fill(m + 1);
                }
            };
            fill(0);
            return;
        }
        int top = std::min(left, fs[l]->max_degree());
        for (int d = top; d >= 0; --d) {
            deg[l] = static_cast<std::size_t>(d);
            rec(l + 1, left - d);
        }
    };
    rec(0, n);
    return b;
}

inline std::string tensor_label(const std::vector<const FreeComplex*>& fs, const std::vector<std::size_t>& deg,
                                const std::vector<std::size_t>& id) {
    std::string s;
    for (std::size_t l = 0; l < fs.size(); ++l) {
        const auto& lab = fs[l]->labels(static_cast<int>(deg[l]))[id[l]];
        if (lab.empty()) continue;
        s += (s.empty() ? "" : "*") + lab;
    }
    return s;
}

}  // namespace detail

/// Tensor product over the common group ring with Koszul signs: the boundary
/// applied to factor l carries (-1)^{sum of earlier degrees}.
inline FreeComplex tensor_complexes(const std::vector<FreeComplex>& factors) {
    if (factors.empty()) throw Error("tensor_complexes: no factors");
    const auto& ctx = factors.front().context();
    std::vector<const FreeComplex*> fs;
    // Degree n needs every factor built up to n.
    int top = factors.front().max_degree();
    for (const auto& f : factors) {
        if (!f.context()->same(*ctx)) throw Error("tensor_complexes: context mismatch");
        fs.push_back(&f);
        top = std::min(top, f.max_degree());
    }
    FreeComplex c(ctx);
    detail::TensorBasis prev;
    for (int n = 0; n <= top; ++n) {
        auto basis = detail::tensor_basis(fs, n);
        std::vector<std::string> labels;
        for (std::size_t k = 0; k < basis.degs.size(); ++k)
            labels.push_back(detail::tensor_label(fs, basis.degs[k], basis.idx[k]));
        if (n == 0) {
            c.push_degree0(labels);
        } else {
            RingMatrix d(ctx, basis.degs.size(), prev.degs.size());
            for (std::size_t row = 0; row < basis.degs.size(); ++row) {
                const auto& deg = basis.degs[row];
                const auto& id = basis.idx[row];
                std::size_t before = 0;
                for (std::size_t l = 0; l < fs.size(); ++l) {
                    if (deg[l] > 0) {
                        const auto& dl = fs[l]->d(static_cast<int>(deg[l]));
                        auto ndeg = deg;
                        --ndeg[l];
                        auto nid = id;
                        for (std::size_t j = 0; j < dl.cols(); ++j) {
                            const auto& x = dl.at(id[l], j);
                            if (x.is_zero()) continue;
                            nid[l] = j;
                            auto col = prev.lookup.at({ndeg, nid});
                            d.at(row, col) += (before % 2) ? -x : x;
                        }
                    }
                    before += deg[l];
                }
            }
            c.push_degree(labels, d);
        }
        prev = std::move(basis);
    }
    return c;
}

/// Tensor product of morphisms between tensor products with the same factor
/// structure (degree-preserving, no signs).
inline ComplexMorphism tensor_morphisms(const std::vector<ComplexMorphism>& ms, ComplexPtr source, ComplexPtr target) {
    std::vector<const FreeComplex*> src, tgt;
    for (const auto& m : ms) {
        src.push_back(m.source.get());
        tgt.push_back(m.target.get());
    }
    ComplexMorphism out{source, target, {}};
    const auto& ctx = target->context();
    int top = std::min(source->max_degree(), target->max_degree());
    for (int n = 0; n <= top; ++n) {
        auto sb = detail::tensor_basis(src, n);
        auto tb = detail::tensor_basis(tgt, n);
        RingMatrix f(ctx, sb.degs.size(), tb.degs.size());
        for (std::size_t row = 0; row < sb.degs.size(); ++row) {
            const auto& deg = sb.degs[row];
            // Expand the product of per-factor rows.
            std::vector<std::pair<std::vector<std::size_t>, RingElement>> acc{{{}, RingElement::one(ctx)}};
            for (std::size_t l = 0; l < ms.size(); ++l) {
                const auto& fl = ms[l].f.at(deg[l]);
                std::vector<std::pair<std::vector<std::size_t>, RingElement>> next;
                for (const auto& [ids, v] : acc)
                    for (std::size_t j = 0; j < fl.cols(); ++j) {
                        const auto& x = fl.at(sb.idx[row][l], j);
                        if (x.is_zero()) continue;
                        auto nids = ids;
                        nids.push_back(j);
                        next.emplace_back(nids, v * x);
                    }
                acc = std::move(next);
            }
            for (const auto& [ids, v] : acc) f.at(row, tb.lookup.at({deg, ids})) += v;
        }
        out.f.push_back(f);
    }
    return out;
}

/// Block-diagonal direct sum; labels are prefixed by the summand index.
inline FreeComplex direct_sum(const std::vector<FreeComplex>& cs, bool prefix_labels = true) {
    if (cs.empty()) throw Error("direct_sum: no summands");
    const auto& ctx = cs.front().context();
    int top = cs.front().max_degree();
    for (const auto& c : cs) top = std::min(top, c.max_degree());
    FreeComplex out(ctx);
    for (int n = 0; n <= top; ++n) {
        std::vector<std::string> labels;
        std::size_t rows = 0, cols = 0;
        for (std::size_t k = 0; k < cs.size(); ++k) {
            for (const auto& l : cs[k].labels(n))
                labels.push_back(prefix_labels ? "[" + std::to_string(k + 1) + "]" + l : l);
            rows += cs[k].rank(n);
            cols += cs[k].rank(n - 1);
        }
        if (n == 0) {
            out.push_degree0(labels);
            continue;
        }
        RingMatrix d(ctx, rows, cols);
        std::size_t r0 = 0, c0 = 0;
        for (const auto& c : cs) {
            const auto& dc = c.d(n);
            for (std::size_t i = 0; i < dc.rows(); ++i)
                for (std::size_t j = 0; j < dc.cols(); ++j) d.at(r0 + i, c0 + j) = dc.at(i, j);
            r0 += dc.rows();
            c0 += dc.cols();
        }
        out.push_degree(labels, d);
    }
    return out;
}

/// Cone(f) with D^n = target^n + source^{n-1} and d(c, s) = (dc + f(s), -ds).
inline FreeComplex mapping_cone(const ComplexMorphism& f) {
    const auto& T = *f.target;
    const auto& S = *f.source;
    const auto& ctx = T.context();
    int top = std::min({T.max_degree(), S.max_degree() + 1, f.max_degree() + 1});
    FreeComplex out(ctx);
    auto labels = [&](int n) {
        std::vector<std::string> l;
        for (const auto& x : T.labels(n)) l.push_back(x.empty() ? "1" : x);
        if (n >= 1)
            for (const auto& x : S.labels(n - 1)) l.push_back("s(" + (x.empty() ? std::string("1") : x) + ")");
        return l;
    };
    out.push_degree0(labels(0));
    for (int n = 1; n <= top; ++n) {
        auto tn = T.rank(n), sn = S.rank(n - 1), tm = T.rank(n - 1), sm = S.rank(n - 2);
        RingMatrix d(ctx, tn + sn, tm + sm);
        for (std::size_t i = 0; i < tn; ++i)
            for (std::size_t j = 0; j < tm; ++j) d.at(i, j) = T.d(n).at(i, j);
        const auto& fn = f.f.at(static_cast<std::size_t>(n - 1));
        for (std::size_t i = 0; i < sn; ++i) {
            for (std::size_t j = 0; j < tm; ++j) d.at(tn + i, j) = fn.at(i, j);
            if (n >= 2)
                for (std::size_t j = 0; j < sm; ++j) d.at(tn + i, tm + j) = -S.d(n - 1).at(i, j);
        }
        out.push_degree(labels(n), d);
    }
    return out;
}

/// Identity morphism of a complex.
inline ComplexMorphism identity_morphism(const ComplexPtr& c) {
    ComplexMorphism m{c, c, {}};
    for (int n = 0; n <= c->max_degree(); ++n) m.f.push_back(RingMatrix::identity(c->context(), c->rank(n)));
    return m;
}

// ---------------------------------------------------------------------------
// The product-of-cyclic construction

/// E_i for each factor generator, tensored into C, the single-factor
/// complexes C_i, the morphism f: sum C_i -> C sending the basis of C_i^n to
/// x_i^n, and the cokernel D of the patched morphism f' into C + Y.
struct TensorConstruction {
    ComplexPtr C;
    std::vector<FreeComplex> Ci;
    ComplexPtr sum_Ci;
    ComplexMorphism f;
    FreeComplex D;
};

inline std::vector<FreeComplex> cyclic_factors(const ContextPtr& ctx, const std::vector<GroupIndex>& gens, int max_degree) {
    std::vector<FreeComplex> es;
    for (std::size_t i = 0; i < gens.size(); ++i)
        es.push_back(cyclic_complex(gens[i], ctx, max_degree, "x" + std::to_string(i + 1)));
    return es;
}

/// C_i: rank one in each degree with the boundaries of E_i.
inline std::vector<FreeComplex> single_factor_complexes(const ContextPtr& ctx, const std::vector<GroupIndex>& gens,
                                                        int max_degree) {
    std::vector<FreeComplex> out;
    for (std::size_t i = 0; i < gens.size(); ++i)
        out.push_back(cyclic_complex(gens[i], ctx, max_degree, "c" + std::to_string(i + 1)));
    return out;
}

/// f: sum_i C_i -> C, the basis element of C_i^n going to x_i^n.
inline ComplexMorphism morphism_tensor_f(const ComplexPtr& sum_ci, const ComplexPtr& C, std::size_t r) {
    ComplexMorphism f{sum_ci, C, {}};
    const auto& ctx = C->context();
    int top = std::min(sum_ci->max_degree(), C->max_degree());
    for (int n = 0; n <= top; ++n) {
        RingMatrix m(ctx, r, C->rank(n));
        for (std::size_t i = 0; i < r; ++i) {
            std::string want = n == 0 ? "" : "x" + std::to_string(i + 1) + (n == 1 ? "" : "^" + std::to_string(n));
            const auto& ls = C->labels(n);
            auto it = std::find(ls.begin(), ls.end(), want);
            if (it == ls.end()) throw Error("morphism_tensor_f: pure power " + want + " missing from C");
            m.at(i, static_cast<std::size_t>(it - ls.begin())) = RingElement::one(ctx);
        }
        f.f.push_back(m);
    }
    f.verify();
    return f;
}

namespace detail {

// Degree-wise cokernel of an injective morphism whose image rows each carry
// a coefficient 1 at a distinct pivot basis element.
inline FreeComplex cokernel_by_pivots(const FreeComplex& tgt, const std::vector<RingMatrix>& f) {
    const auto& ctx = tgt.context();
    FreeComplex out(ctx);
    std::vector<std::vector<std::size_t>> keep(static_cast<std::size_t>(tgt.max_degree() + 1));
    std::vector<std::map<std::size_t, std::size_t>> pivot_row(keep.size());
    int top = std::min(tgt.max_degree(), static_cast<int>(f.size()) - 1);
    for (int n = 0; n <= top; ++n) {
        const auto& fn = f[static_cast<std::size_t>(n)];
        std::set<std::size_t> pivots;
        for (std::size_t i = 0; i < fn.rows(); ++i) {
            std::optional<std::size_t> piv;
            for (std::size_t j = 0; j < fn.cols() && !piv; ++j) {
                if (!(fn.at(i, j) == RingElement::one(ctx))) continue;
                bool alone = true;
                for (std::size_t k = 0; k < fn.rows(); ++k)
                    if (k != i && !fn.at(k, j).is_zero()) alone = false;
                if (alone) piv = j;
            }
            if (!piv) throw Error("cokernel: morphism is not split injective in degree " + std::to_string(n));
            pivots.insert(*piv);
            pivot_row[static_cast<std::size_t>(n)][*piv] = i;
        }
        for (std::size_t i = 0; i < fn.rows(); ++i)
            for (std::size_t j = 0; j < fn.cols(); ++j)
                if (pivots.count(j) && !fn.at(i, j).is_zero() && pivot_row[static_cast<std::size_t>(n)][j] != i)
                    throw Error("cokernel: pivot columns overlap");
        for (std::size_t j = 0; j < tgt.rank(n); ++j)
            if (!pivots.count(j)) keep[static_cast<std::size_t>(n)].push_back(j);
    }
    for (int n = 0; n <= top; ++n) {
        const auto& kn = keep[static_cast<std::size_t>(n)];
        std::vector<std::string> labels;
        for (auto j : kn) labels.push_back(tgt.labels(n)[j]);
        if (n == 0) {
            out.push_degree0(labels);
            continue;
        }
        const auto& km = keep[static_cast<std::size_t>(n - 1)];
        std::map<std::size_t, std::size_t> kpos;
        for (std::size_t k = 0; k < km.size(); ++k) kpos[km[k]] = k;
        const auto& fm = f[static_cast<std::size_t>(n - 1)];
        const auto& piv = pivot_row[static_cast<std::size_t>(n - 1)];
        RingMatrix d(ctx, kn.size(), km.size());
        for (std::size_t a = 0; a < kn.size(); ++a) {
            for (std::size_t j = 0; j < tgt.rank(n - 1); ++j) {
                const auto& x = tgt.d(n).at(kn[a], j);
                if (x.is_zero()) continue;
                auto it = piv.find(j);
                if (it == piv.end()) {
                    d.at(a, kpos.at(j)) += x;
                    continue;
                }
                // pivot j = -(rest of its image row)
                for (std::size_t l = 0; l < fm.cols(); ++l) {
                    if (l == j || fm.at(it->second, l).is_zero()) continue;
                    d.at(a, kpos.at(l)) -= x * fm.at(it->second, l);
                }
            }
        }
        out.push_degree(labels, d);
    }
    return out;
}

}  // namespace detail

/// D = Cok(f': sum C_i -> C + Y) with Y = [R^r --id--> R^r] in degrees 1, 0,
/// f'_0 = (f_0, id) and f'_1(c_i) = (x_i, tau_i y_i).
inline FreeComplex pruned_complex_D(const ComplexMorphism& f, const std::vector<GroupIndex>& gens) {
    const auto& C = *f.target;
    const auto& ctx = C.context();
    const auto r = gens.size();
    FreeComplex Cp(ctx);
    std::vector<RingMatrix> fp;
    int top = std::min(C.max_degree(), f.max_degree());
    for (int n = 0; n <= top; ++n) {
        auto labels = C.labels(n);
        std::size_t extra = n <= 1 ? r : 0;
        for (std::size_t i = 0; i < extra; ++i) labels.push_back((n == 0 ? "z" : "y") + std::to_string(i + 1));
        if (n == 0) {
            Cp.push_degree0(labels);
        } else {
            RingMatrix d(ctx, C.rank(n) + extra, Cp.rank(n - 1));
            for (std::size_t i = 0; i < C.rank(n); ++i)
                for (std::size_t j = 0; j < C.rank(n - 1); ++j) d.at(i, j) = C.d(n).at(i, j);
            if (n == 1)
                for (std::size_t i = 0; i < r; ++i) d.at(C.rank(1) + i, C.rank(0) + i) = RingElement::one(ctx);
            Cp.push_degree(labels, d);
        }
        const auto& fn = f.f[static_cast<std::size_t>(n)];
        RingMatrix m(ctx, fn.rows(), Cp.rank(n));
        for (std::size_t i = 0; i < fn.rows(); ++i)
            for (std::size_t j = 0; j < fn.cols(); ++j) m.at(i, j) = fn.at(i, j);
        if (n == 0)
            for (std::size_t i = 0; i < r; ++i) m.at(i, C.rank(0) + i) = RingElement::one(ctx);
        if (n == 1)
            for (std::size_t i = 0; i < r; ++i) m.at(i, C.rank(1) + i) = minus_one(gens[i], ctx);
        fp.push_back(m);
    }
    ComplexMorphism check{f.source, std::make_shared<const FreeComplex>(Cp), fp};
    check.verify();
    return detail::cokernel_by_pivots(Cp, fp);
}

/// The full chain for G = prod of cyclic factors <gens[i]>.
inline TensorConstruction tensor_construction(const ContextPtr& ctx, const std::vector<GroupIndex>& gens,
                                              int max_degree = 4) {
    TensorConstruction t;
    t.C = std::make_shared<const FreeComplex>(tensor_complexes(cyclic_factors(ctx, gens, max_degree)));
    t.Ci = single_factor_complexes(ctx, gens, max_degree);
    t.sum_Ci = std::make_shared<const FreeComplex>(direct_sum(t.Ci));
    t.f = morphism_tensor_f(t.sum_Ci, t.C, gens.size());
    t.D = pruned_complex_D(t.f, gens);
    return t;
}

// ---------------------------------------------------------------------------
// One subgroup inside a product of cyclic groups

/// E_1 -> E for G_1 = <s^m> inside <s>: identity in even degrees,
/// multiplication by 1 + s + ... + s^{m-1} in odd degrees.
inline ComplexMorphism special_morphism_s(const ComplexPtr& e1, const ComplexPtr& e, GroupIndex s, std::uint64_t m) {
    const auto& ctx = e->context();
    auto mu = geometric_sum(s, m, ctx);
    ComplexMorphism f{e1, e, {}};
    int top = std::min(e1->max_degree(), e->max_degree());
    for (int n = 0; n <= top; ++n) {
        RingMatrix x(ctx, 1, 1);
        x.at(0, 0) = (n % 2) ? mu : RingElement::one(ctx);
        f.f.push_back(x);
    }
    f.verify();
    return f;
}

struct ConeConstruction {
    ComplexPtr C, C1;
    ComplexMorphism f;
    FreeComplex D;
};

/// Cone of C_1 -> C for G = prod <gens[j]> and G_1 = prod <gens[j]^{m_j}>.
inline ConeConstruction cone_construction(const ContextPtr& ctx, const std::vector<GroupIndex>& gens,
                                          const std::vector<std::uint64_t>& index, int max_degree = 4) {
    if (gens.size() != index.size()) throw Error("cone_construction: one index per factor");
    std::vector<FreeComplex> e, e1;
    for (std::size_t j = 0; j < gens.size(); ++j) {
        auto ord = ctx->group().element_order(gens[j]);
        if (index[j] == 0 || ord % index[j] != 0) throw Error("cone_construction: index must divide the factor order");
        auto sub = ctx->group().power(gens[j], index[j]);
        e.push_back(cyclic_complex(gens[j], ctx, max_degree, "x" + std::to_string(j + 1)));
        e1.push_back(cyclic_complex(sub, ctx, max_degree, "u" + std::to_string(j + 1)));
    }
    std::vector<ComplexMorphism> parts;
    for (std::size_t j = 0; j < gens.size(); ++j)
        parts.push_back(special_morphism_s(std::make_shared<const FreeComplex>(e1[j]),
                                           std::make_shared<const FreeComplex>(e[j]), gens[j], index[j]));
    ConeConstruction out;
    out.C = std::make_shared<const FreeComplex>(tensor_complexes(e));
    out.C1 = std::make_shared<const FreeComplex>(tensor_complexes(e1));
    out.f = tensor_morphisms(parts, out.C1, out.C);
    out.f.verify();
    out.D = mapping_cone(out.f);
    return out;
}

// ---------------------------------------------------------------------------
// The cyclic-H construction over G = H x C_{p^n}

struct Thm46Complexes {
    FreeComplex C1, C, D;
    ComplexMorphism inclusion;
};

/// C over G = H x <c>, c of order p^n (h generates H), with the subcomplex
/// C_1 on the final basis element of each degree; D = C / C_1.
inline Thm46Complexes thm46_complexes(const ContextPtr& ctx, GroupIndex h, GroupIndex c) {
    const auto& g = ctx->group();
    auto Tm = minus_one(c, ctx);
    auto dm = minus_one(h, ctx);
    auto Nn = geometric_sum(c, g.element_order(c), ctx);
    auto NH = geometric_sum(h, g.element_order(h), ctx);
    auto z = RingElement::zero(ctx);
    Thm46Complexes out;
    out.C = FreeComplex(ctx);
    out.C.push_degree0({"e0"});
    out.C.push_degree({"e1_1", "e1_2"}, RingMatrix::from_rows(ctx, {{Tm}, {dm}}));
    out.C.push_degree({"e2_1", "e2_2", "e2_3"}, RingMatrix::from_rows(ctx, {{Nn, z}, {dm, -Tm}, {z, NH}}));
    out.C.push_degree({"e3_1", "e3_2", "e3_3", "e3_4"},
                      RingMatrix::from_rows(ctx, {{Tm, z, z}, {dm, -Nn, z}, {z, NH, Tm}, {z, z, dm}}));
    out.C1 = FreeComplex(ctx);
    out.C1.push_degree0({"u0"});
    out.C1.push_degree({"u1"}, RingMatrix::from_rows(ctx, {{dm}}));
    out.C1.push_degree({"u2"}, RingMatrix::from_rows(ctx, {{NH}}));
    out.C1.push_degree({"u3"}, RingMatrix::from_rows(ctx, {{dm}}));
    out.inclusion.source = std::make_shared<const FreeComplex>(out.C1);
    out.inclusion.target = std::make_shared<const FreeComplex>(out.C);
    for (int n = 0; n <= 3; ++n) {
        RingMatrix m(ctx, 1, out.C.rank(n));
        m.at(0, out.C.rank(n) - 1) = RingElement::one(ctx);
        out.inclusion.f.push_back(m);
    }
    out.inclusion.verify();
    out.D = detail::cokernel_by_pivots(out.C, out.inclusion.f);
    return out;
}

// ---------------------------------------------------------------------------
// Reduction by unit pivots

/// Cancel pairs (a in degree n, b in degree n-1) with d_n[a][b] an exact unit
/// of the T-free ring, for n in [1, max_level]. The result is homotopy
/// equivalent to the input.
inline FreeComplex minimize(const FreeComplex& in, int max_level = 3) {
    FreeComplex c(in);
    const auto& ctx = c.context();
    max_level = std::min(max_level, c.max_degree());
    auto remove_row = [&](RingMatrix& m, std::size_t r) {
        RingMatrix t(ctx, m.rows() - 1, m.cols());
        for (std::size_t i = 0, k = 0; i < m.rows(); ++i) {
            if (i == r) continue;
            for (std::size_t j = 0; j < m.cols(); ++j) t.at(k, j) = m.at(i, j);
            ++k;
        }
        m = std::move(t);
    };
    auto remove_col = [&](RingMatrix& m, std::size_t col) {
        RingMatrix t(ctx, m.rows(), m.cols() - 1);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0, k = 0; j < m.cols(); ++j) {
                if (j == col) continue;
                t.at(i, k++) = m.at(i, j);
            }
        m = std::move(t);
    };
    // Labels are rebuilt after cancellation.
    std::vector<std::vector<std::string>> labels;
    for (int n = 0; n <= c.max_degree(); ++n) labels.push_back(c.labels(n));
    std::vector<RingMatrix> d;
    d.emplace_back();
    for (int n = 1; n <= c.max_degree(); ++n) d.push_back(c.d(n));
    for (int n = 1; n <= max_level; ++n) {
        while (true) {
            auto& dn = d[static_cast<std::size_t>(n)];
            std::optional<std::pair<std::size_t, std::size_t>> piv;
            for (std::size_t i = 0; i < dn.rows() && !piv; ++i)
                for (std::size_t j = 0; j < dn.cols(); ++j) {
                    const auto& x = dn.at(i, j);
                    if (!x.is_zero() && x.is_t_free() && x.is_unit()) {
                        piv = {i, j};
                        break;
                    }
                }
            if (!piv) break;
            auto [a, b] = *piv;
            auto inv = dn.at(a, b).inverse_t_free();
            // d'[x][y] = d[x][y] - d[x][b] inv d[a][y]
            std::vector<RingElement> arow(dn.cols(), RingElement(ctx));
            for (std::size_t y = 0; y < dn.cols(); ++y) arow[y] = inv * dn.at(a, y);
            for (std::size_t x = 0; x < dn.rows(); ++x) {
                if (x == a) continue;
                auto xb = dn.at(x, b);
                if (xb.is_zero()) continue;
                for (std::size_t y = 0; y < dn.cols(); ++y)
                    if (!arow[y].is_zero()) dn.at(x, y) -= xb * arow[y];
            }
            remove_row(dn, a);
            remove_col(dn, b);
            if (static_cast<std::size_t>(n) + 1 < d.size()) remove_col(d[static_cast<std::size_t>(n) + 1], a);
            if (n >= 2) remove_row(d[static_cast<std::size_t>(n) - 1], b);
            labels[static_cast<std::size_t>(n)].erase(labels[static_cast<std::size_t>(n)].begin() + static_cast<std::ptrdiff_t>(a));
            labels[static_cast<std::size_t>(n) - 1].erase(labels[static_cast<std::size_t>(n) - 1].begin() +
                                                          static_cast<std::ptrdiff_t>(b));
        }
    }
    FreeComplex out(ctx);
    out.push_degree0(labels[0]);
    for (int n = 1; n <= c.max_degree(); ++n) out.push_degree(labels[static_cast<std::size_t>(n)], d[static_cast<std::size_t>(n)]);
    return out;
}

/// Cone of sum_i B(h_i) -> B(G), minimized; only needs degrees through 3.
inline FreeComplex bar_cone(const ContextPtr& ctx, const std::vector<Subgroup>& subs, int max_degree = 3,
                            std::size_t budget = default_rank_budget) {
    auto bar = std::make_shared<const FreeComplex>(bar_resolution(ctx, max_degree, budget));
    std::vector<FreeComplex> parts;
    for (const auto& h : subs) parts.push_back(bar_resolution(ctx, h, max_degree - 1, budget));
    auto sum = std::make_shared<const FreeComplex>(direct_sum(parts));
    ComplexMorphism f{sum, bar, {}};
    for (int n = 0; n <= max_degree - 1; ++n) {
        RingMatrix m(ctx, sum->rank(n), bar->rank(n));
        std::size_t r0 = 0;
        for (const auto& part : parts) {
            auto inc = bar_inclusion(std::make_shared<const FreeComplex>(part), bar);
            const auto& fi = inc.f[static_cast<std::size_t>(n)];
            for (std::size_t i = 0; i < fi.rows(); ++i)
                for (std::size_t j = 0; j < fi.cols(); ++j) m.at(r0 + i, j) = fi.at(i, j);
            r0 += fi.rows();
        }
        f.f.push_back(m);
    }
    f.verify();
    return minimize(mapping_cone(f), max_degree);
}

// ---------------------------------------------------------------------------
// Homology over the flattened Z/p^N basis

/// Rows (i, g) -> coefficient vector of g * (row i), blocks of |G| per column.
inline ResidueMatrix module_rows(const RingMatrix& m) {
    const auto& ctx = m.context();
    const auto n = ctx->group_order();
    ResidueMatrix out(ctx->mod(), m.cols() * n);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m.at(i, j).is_t_free()) throw Error("module_rows: entries must be T-free");
        for (GroupIndex g = 0; g < n; ++g) {
            ResidueVector v(m.cols() * n, 0);
            for (std::size_t j = 0; j < m.cols(); ++j) {
                auto x = m.at(i, j).shifted_by(g);
                for (GroupIndex k = 0; k < n; ++k) v[j * n + k] = x.coeff(k, 0);
            }
            out.rows.push_back(std::move(v));
        }
    }
    return out;
}

struct HomologyProfile {
    int degree = 0;
    std::vector<int> exponents;  // H = sum Z/p^e, descending
    std::size_t generator_count = 0;
    ResidueMatrix presentation;  // relations among the chosen generators
    /// Fitt_k over Z/p^N as a valuation: p^v, with v = N meaning (0).
    std::vector<int> fitting_valuations;
    bool trivial() const { return exponents.empty(); }
    std::string to_string() const {
        if (exponents.empty()) return "0";
        std::ostringstream os;
        for (std::size_t i = 0; i < exponents.size(); ++i) os << (i ? " + " : "") << "Z/p^" << exponents[i];
        return os.str();
    }
};

inline std::vector<int> fitting_from_exponents(const std::vector<int>& exps, int N, std::size_t upto) {
    std::vector<int> out;
    for (std::size_t k = 0; k <= upto; ++k) {
        int v = 0;
        for (std::size_t i = k; i < exps.size(); ++i) v += exps[i];
        out.push_back(std::min(v, N));
    }
    return out;
}

inline HomologyProfile homology_profile(const FreeComplex& c, int n) {
    if (n < 0 || n >= c.max_degree()) throw Error("homology_profile: boundary d_{n+1} not built");
    const auto& ctx = c.context();
    const auto mod = ctx->mod();
    const auto G = ctx->group_order();
    const auto width = c.rank(n) * G;
    // Z/p^N generators of ker d_n.
    std::vector<ResidueVector> ker;
    if (n == 0 || c.rank(n - 1) == 0) {
        for (std::size_t k = 0; k < width; ++k) {
            ResidueVector v(width, 0);
            v[k] = 1;
            ker.push_back(v);
        }
    } else {
        auto rows = module_rows(c.d(n));
        // Left kernel in the flattened (basis, group) coordinates: x * rows.
        ker = kernel(rows);
    }
    auto image = module_rows(c.d(n + 1)).rows;
    const auto s = ker.size();
    HowellBuilder hb(mod, width + s);
    for (std::size_t i = 0; i < s; ++i) {
        ResidueVector r(width + s, 0);
        std::copy(ker[i].begin(), ker[i].end(), r.begin());
        r[width + i] = 1;
        hb.insert(r);
    }
    std::vector<ResidueVector> rel;
    for (std::size_t col = width; col < width + s; ++col)
        if (const auto& r = hb.row_at(col)) rel.emplace_back(r->begin() + static_cast<std::ptrdiff_t>(width), r->end());
    for (const auto& v : image) {
        ResidueVector r(width + s, 0);
        std::copy(v.begin(), v.end(), r.begin());
        // Reduce the ambient part to zero; the tail records the combination.
        for (std::size_t k = 0; k < width; ++k) {
            if (!r[k]) continue;
            const auto& piv = hb.row_at(k);
            if (!piv) throw Error("homology_profile: image not contained in the kernel");
            auto pv = (*piv)[k];
            int b = mod.valuation(pv);
            int a = mod.valuation(r[k]);
            if (a < b) throw Error("homology_profile: image not contained in the kernel");
            auto f = (r[k] / mod.power_of_p(b)) % mod.q;
            for (std::size_t t = k; t < width + s; ++t) r[t] = mod.sub(r[t], mod.mul(f, (*piv)[t]));
        }
        ResidueVector coeffs(s);
        for (std::size_t i = 0; i < s; ++i) coeffs[i] = mod.neg(r[width + i]);
        rel.push_back(coeffs);
    }
    HomologyProfile p;
    p.degree = n;
    p.generator_count = s;
    p.presentation = ResidueMatrix(mod, s);
    for (const auto& r : rel) p.presentation.rows.push_back(r);
    p.exponents = quotient_invariants(mod, s, rel);
    p.fitting_valuations = fitting_from_exponents(p.exponents, mod.N, 2);
    return p;
}

struct ExactnessReport {
    bool pass = true;
    std::vector<HomologyProfile> profiles;  // degrees 0..max_degree-1
    std::vector<int> failing;
};

/// Homology trivial in every built degree outside `allowed`.
inline ExactnessReport check_exactness(const FreeComplex& c, const std::set<int>& allowed, unsigned jobs = 1) {
    ExactnessReport rep;
    auto top = c.max_degree();
    rep.profiles.resize(static_cast<std::size_t>(std::max(top, 0)));
    parallel_for(rep.profiles.size(), jobs,
                 [&](std::size_t n) { rep.profiles[n] = homology_profile(c, static_cast<int>(n)); });
    for (const auto& p : rep.profiles)
        if (!allowed.count(p.degree) && !p.trivial()) {
            rep.pass = false;
            rep.failing.push_back(p.degree);
        }
    return rep;
}

// ---------------------------------------------------------------------------
// Fitt^[1] from a complex satisfying (a)(b)(c)

/// Map taking elements of the T-free ring of the complex into Lambda.
using LiftMap = std::function<RingElement(const RingElement&)>;

inline RingMatrix lift_matrix(const RingMatrix& m, const ContextPtr& lambda, const LiftMap& lift) {
    RingMatrix out(lambda, m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out.at(i, j) = lift(m.at(i, j));
    return out;
}

inline FractionalIdeal fitt_shift1_from_complex(const FreeComplex& D, const ContextPtr& lambda, const LiftMap& lift,
                                                const DenFactor& w, unsigned jobs = 0) {
    if (D.max_degree() < 3) throw Error("fitt_shift1_from_complex: need D built through degree 3");
    auto A = lift_matrix(D.d(3), lambda, lift);
    return fitt_shift1_lifted(A, D.rank(0), D.rank(1), D.rank(2), w, jobs);
}

/// n = 0 form: D over H itself, canonical lift.
inline FractionalIdeal fitt_shift1_from_complex(const FreeComplex& D, const ContextPtr& lambda, unsigned jobs = 0) {
    if (!(D.context()->group() == lambda->group())) throw Error("fitt_shift1_from_complex: group mismatch");
    return fitt_shift1_from_complex(
        D, lambda, [&](const RingElement& x) { return x.in_context(lambda); }, den_t(), jobs);
}

}  // namespace fitt
