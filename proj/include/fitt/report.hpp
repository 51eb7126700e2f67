#pragma once

// Batch front end: config parsing, task dispatch and deterministic text and
// JSON reports.

#include "fitt/monomials.hpp"
#include "fitt/parallel.hpp"
#include "fitt/scenarios.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fitt {

inline constexpr const char* tool_version = "0.1.0";

using json = nlohmann::ordered_json;

/// Malformed or invalid config; `where` is a JSON pointer or line:column.
class ConfigError : public Error {
public:
    ConfigError(const std::string& where, const std::string& msg) : Error(where + ": " + msg), where_(where) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct Settings {
    std::uint64_t p = 3;
    int coeff_precision = 2;
    int t_precision = 6;
    std::vector<std::uint64_t> group_orders{3, 3};
    unsigned jobs = 1;
    int max_degree = 3;
    bool allow_even_p = false;
    std::size_t budget = default_rank_budget;
};

/// Command-line values; set fields win over the config file.
struct Overrides {
    std::optional<std::uint64_t> p;
    std::optional<int> coeff_precision, t_precision, max_degree;
    std::optional<std::vector<std::uint64_t>> group_orders;
    std::optional<unsigned> jobs;
    std::optional<std::size_t> budget;
    bool allow_even_p = false;
};

struct TaskSpec {
    std::string id, kind;
    json params;
    std::string pointer;  // location in the config
};

struct Config {
    Settings settings;
    std::vector<PlaceDatum> places;
    std::vector<TaskSpec> tasks;
    json echo;
};

inline const std::set<std::string>& task_kinds() {
    static const std::set<std::string> k{"fitt1",  "minors", "strong-conjecture", "weak-conjecture", "gkt-minors", "thm46",
                                         "thm45",  "thm47",  "independence",      "exactness",       "reproduce"};
    return k;
}

inline const std::vector<std::string>& example_ids() {
    static const std::vector<std::string> k{"ex-4.5", "ex-4.6",       "prop-1.9", "s1",
                                            "s2-5minors", "thm46-minors", "thm47-B", "independence"};
    return k;
}

namespace detail {

inline std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <class T>
T get_as(const json& j, const std::string& where, const char* what) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where, std::string("expected ") + what);
    }
}

inline std::vector<std::int64_t> exponent_tuple(const json& j, const std::string& where, std::size_t rank) {
    auto v = get_as<std::vector<std::int64_t>>(j, where, "an array of integers");
    if (v.size() != rank) throw ConfigError(where, "expected " + std::to_string(rank) + " exponents");
    return v;
}

inline PlaceDatum parse_place(const json& j, const std::string& where, std::size_t rank) {
    if (!j.is_object()) throw ConfigError(where, "place must be an object");
    PlaceDatum p;
    p.label = j.contains("label") ? get_as<std::string>(j["label"], where + "/label", "a string") : "v";
    if (j.contains("inertia_generators")) {
        const auto& g = j["inertia_generators"];
        if (!g.is_array()) throw ConfigError(where + "/inertia_generators", "expected an array");
        for (std::size_t i = 0; i < g.size(); ++i)
            p.inertia_generators.push_back(exponent_tuple(g[i], where + "/inertia_generators/" + std::to_string(i), rank));
    }
    if (j.contains("frobenius")) {
        const auto& f = j["frobenius"];
        if (!f.is_object()) throw ConfigError(where + "/frobenius", "expected an object");
        if (f.contains("group_element"))
            p.frobenius_element = exponent_tuple(f["group_element"], where + "/frobenius/group_element", rank);
        if (f.contains("n_v")) {
            auto n = get_as<int>(f["n_v"], where + "/frobenius/n_v", "an integer");
            if (n < 0 || n > 3) throw ConfigError(where + "/frobenius/n_v", "n_v must lie in 0..3");
            p.n_v = static_cast<unsigned>(n);
        }
    }
    return p;
}

}  // namespace detail

inline Config parse_config(const json& j, const Overrides& o = {}) {
    if (!j.is_object()) throw ConfigError("/", "config must be a JSON object");
    Config c;
    auto& s = c.settings;
    if (j.contains("p")) s.p = detail::get_as<std::uint64_t>(j["p"], "/p", "an integer");
    if (j.contains("coeff_precision")) s.coeff_precision = detail::get_as<int>(j["coeff_precision"], "/coeff_precision", "an integer");
    if (j.contains("t_precision")) s.t_precision = detail::get_as<int>(j["t_precision"], "/t_precision", "an integer");
    if (j.contains("group_orders"))
        s.group_orders = detail::get_as<std::vector<std::uint64_t>>(j["group_orders"], "/group_orders", "an array of integers");
    if (j.contains("max_degree")) s.max_degree = detail::get_as<int>(j["max_degree"], "/max_degree", "an integer");
    if (o.p) s.p = *o.p;
    if (o.coeff_precision) s.coeff_precision = *o.coeff_precision;
    if (o.t_precision) s.t_precision = *o.t_precision;
    if (o.group_orders) s.group_orders = *o.group_orders;
    if (o.max_degree) s.max_degree = *o.max_degree;
    if (o.jobs) s.jobs = std::max(1u, *o.jobs);
    if (o.budget) s.budget = *o.budget;
    s.allow_even_p = o.allow_even_p;
    if (s.coeff_precision < 1) throw ConfigError("/coeff_precision", "must be at least 1");
    if (s.t_precision < 1) throw ConfigError("/t_precision", "must be at least 1");
    if (s.max_degree < 1) throw ConfigError("/max_degree", "must be at least 1");
    try {
        make_context(PGroup(s.p, s.group_orders), s.coeff_precision, s.t_precision, s.allow_even_p);
    } catch (const Error& e) {
        throw ConfigError("/", e.what());
    }
    const auto rank = s.group_orders.size();
    if (j.contains("places")) {
        const auto& ps = j["places"];
        if (!ps.is_array()) throw ConfigError("/places", "expected an array");
        for (std::size_t i = 0; i < ps.size(); ++i) c.places.push_back(detail::parse_place(ps[i], "/places/" + std::to_string(i), rank));
    }
    if (!j.contains("tasks") || !j["tasks"].is_array()) throw ConfigError("/tasks", "expected an array of tasks");
    const auto& ts = j["tasks"];
    std::set<std::string> ids;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        auto where = "/tasks/" + std::to_string(i);
        const auto& t = ts[i];
        if (!t.is_object()) throw ConfigError(where, "task must be an object");
        if (!t.contains("kind")) throw ConfigError(where, "missing kind");
        TaskSpec spec;
        spec.kind = detail::get_as<std::string>(t["kind"], where + "/kind", "a string");
        if (!task_kinds().count(spec.kind)) throw ConfigError(where + "/kind", "unknown task kind '" + spec.kind + "'");
        spec.id = t.contains("id") ? detail::get_as<std::string>(t["id"], where + "/id", "a string") : spec.kind + "-" + std::to_string(i + 1);
        if (!ids.insert(spec.id).second) throw ConfigError(where + "/id", "duplicate task id '" + spec.id + "'");
        if (spec.kind == "reproduce") {
            if (!t.contains("example")) throw ConfigError(where, "reproduce needs an example id");
            auto ex = detail::get_as<std::string>(t["example"], where + "/example", "a string");
            const auto& known = example_ids();
            if (std::find(known.begin(), known.end(), ex) == known.end())
                throw ConfigError(where + "/example", "unknown example id '" + ex + "'");
        }
        if (t.contains("method") && !parse_method(t["method"].is_string() ? t["method"].get<std::string>() : ""))
            throw ConfigError(where + "/method", "unknown method");
        if (t.contains("extra_places")) {
            const auto& e = t["extra_places"];
            if (!e.is_array()) throw ConfigError(where + "/extra_places", "expected an array");
            for (std::size_t k = 0; k < e.size(); ++k) detail::parse_place(e[k], where + "/extra_places/" + std::to_string(k), rank);
        }
        spec.params = t;
        spec.pointer = where;
        c.tasks.push_back(std::move(spec));
    }
    c.echo = json::object();
    c.echo["p"] = s.p;
    c.echo["coeff_precision"] = s.coeff_precision;
    c.echo["t_precision"] = s.t_precision;
    c.echo["group_orders"] = s.group_orders;
    c.echo["max_degree"] = s.max_degree;
    c.echo["places"] = j.contains("places") ? j["places"] : json::array();
    c.echo["tasks"] = ts;
    return c;
}

inline Config parse_config_text(const std::string& text, const Overrides& o = {}) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(detail::line_col(text, e.byte), "malformed JSON");
    }
    return parse_config(j, o);
}

inline Config load_config(const std::string& path, const Overrides& o = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), o);
}

// ---------------------------------------------------------------------------
// Results

enum class Status { Pass, Fail, Error };

inline const char* status_name(Status s) {
    switch (s) {
        case Status::Pass: return "PASS";
        case Status::Fail: return "FAIL";
        case Status::Error: return "ERROR";
    }
    return "?";
}

struct RenderedIdeal {
    std::string role;
    std::vector<std::string> generators;
    std::string denominator;  // empty for integral ideals
};

struct TaskResult {
    std::string id, kind;
    Status status = Status::Pass;
    int N = 0, M = 0;
    std::vector<RenderedIdeal> ideals;
    std::string witness;
    std::vector<std::string> notes;
    double millis = 0;

    void check(bool ok, const std::string& what) {
        if (ok) return;
        if (status == Status::Pass) status = Status::Fail;
        if (witness.empty()) witness = what;
    }
};

inline std::vector<std::string> sorted_generators(const Ideal& i) {
    auto g = i.generators();
    std::sort(g.begin(), g.end(), [](const RingElement& a, const RingElement& b) { return a.sort_key() < b.sort_key(); });
    std::vector<std::string> out;
    for (const auto& x : g) out.push_back(x.to_string());
    if (out.empty()) out.push_back("0");
    return out;
}

inline RenderedIdeal render(const Ideal& i, const std::string& role) { return {role, sorted_generators(i), ""}; }

inline RenderedIdeal render(const FractionalIdeal& f, const std::string& role) {
    RenderedIdeal r{role, sorted_generators(f.numerator()), ""};
    auto s = f.to_string();
    auto slash = s.find(") / ");
    if (!f.denominator().empty() && slash != std::string::npos) r.denominator = s.substr(slash + 4);
    return r;
}

// ---------------------------------------------------------------------------
// Reproductions of the worked examples, parameterised for the acceptance run

namespace reproduce {

inline TaskResult example_result(const std::string& id) {
    TaskResult r;
    r.id = id;
    r.kind = "reproduce";
    return r;
}

inline RingElement nu_of(const ContextPtr& L, GroupIndex g) { return norm_element(Subgroup(L->group(), {g}), L); }

inline TaskResult ex45(std::vector<std::uint64_t> orders = {3, 3}, int N = 2, int M = 6) {
    auto r = example_result("ex-4.5");
    r.N = N;
    r.M = M;
    auto L = make_context(PGroup(3, orders), N, M);
    Scenario s(L, {{"v1", {{1, 0}}, {}, 0}, {"v2", {{0, 1}}, {}, 0}});
    auto f = fitt1_Z0(s, Method::Tensor);
    auto g = all_factor_generators(L->group());
    auto expect = FractionalIdeal::from_terms(
        L, {{RingElement::one(L), {}}, {nu_of(L, g[0]), {den_t()}}, {nu_of(L, g[1]), {den_t()}}});
    r.ideals.push_back(render(f, "fitt1[tensor]"));
    r.ideals.push_back(render(expect, "expected (1, nu1/T, nu2/T)"));
    r.check(frac_ideal_equal(f, expect), "tensor-route Fitt^[1] differs from (1, nu1/T, nu2/T)");
    return r;
}

inline TaskResult ex46(std::vector<std::uint64_t> orders = {3, 3, 3}, int N = 2) {
    auto r = example_result("ex-4.6");
    const int M = 6;
    r.N = N;
    r.M = M;
    auto R = make_context(PGroup(3, orders), N, 1);
    MonomialRing ring(R, all_factor_generators(R->group()));
    auto A = build_A(R, ring.gens);
    auto J = Ideal::generated(R, {ring.nu[0], ring.nu[1], ring.nu[2], ring.tau[0], ring.tau[1], ring.tau[2]});
    auto nus = Ideal::generated(R, {ring.nu[0], ring.nu[1], ring.nu[2]});
    auto pairs = Ideal::generated(R, {ring.nu[0] * ring.nu[1], ring.nu[1] * ring.nu[2], ring.nu[2] * ring.nu[0]});
    std::vector<Ideal> shown{Ideal::unit(R), J, ideal_product(nus, J), ideal_product(pairs, J)};
    auto mins = minor_ideals(A, {0, 1, 2, 3});
    for (std::size_t e = 0; e <= 3; ++e) {
        r.ideals.push_back(render(mins.at(e), "Min_" + std::to_string(e) + "(A)"));
        r.check(ideal_equal(mins.at(e), shown[e]), "Min_" + std::to_string(e) + "(A) differs from the displayed ideal");
    }
    auto L = make_context(R->group(), N, M);
    auto f = fitt_shift1_from_complex(tensor_construction(R, ring.gens, 3).D, L);
    auto T = RingElement::t_power(L, 1);
    // T^{-2} Min_3 + T^{-1} Min_2 + Min_1 + (T)
    IdealBuilder b(L);
    auto Tk = RingElement::one(L);
    for (std::size_t e = 3; e >= 1; --e, Tk *= T)
        for (const auto& g : shown[e].generators()) b.add(g.in_context(L) * Tk);
    b.add(Tk);
    FractionalIdeal expect(Ideal(b), {den_t(), den_t()});
    r.ideals.push_back(render(f, "fitt1[tensor]"));
    r.check(frac_ideal_equal(f, expect), "Fitt^[1] differs from the displayed four-term sum");
    return r;
}

inline TaskResult prop19() {
    auto r = example_result("prop-1.9");
    r.N = 2;
    r.M = 16;
    auto L = make_context(PGroup(3, {9}), r.N, r.M);
    // w totally ramified with trivial Frobenius dominates, so Z^0 = Z_v
    Scenario s(L, {{"w", {{1}}, {}, 0}, {"v", {{3}}, {1}, 0}});
    auto direct = fitt1_Z0(s, Method::Direct);
    auto formula = zv_fitt(s, 1);
    r.ideals.push_back(render(direct, "fitt1[direct]"));
    r.ideals.push_back(render(formula, "(1, nu_v/(sigma_v - 1))"));
    r.check(frac_ideal_equal(direct, formula), "Fitt^[1](Z_v) differs from the closed form");
    return r;
}

inline TaskResult s1(int N = 3, int M = 8) {
    auto r = example_result("s1");
    r.N = N;
    r.M = M;
    auto R = make_context(PGroup(3, {9}), N, 1);
    auto cone = cone_construction(R, {1}, {3}, 3);
    auto L = make_context(R->group(), N, M);
    auto f = fitt_shift1_from_complex(cone.D, L);
    auto nut = nu_of(L, 3) * minus_one(1, L);
    auto expect = FractionalIdeal::from_terms(L, {{RingElement::one(L), {}}, {nut, {den_t()}}});
    r.ideals.push_back(render(f, "fitt1[cone]"));
    r.check(frac_ideal_equal(f, expect), "cone-route Fitt^[1] differs from (1, nu~ tau / T)");
    return r;
}

/// The displayed 7 x 5 matrix for two factors C_9 > C_3. As printed, the
/// (2,2) entry reads nu~1 and the (5,4) entry nu2; the cone construction has
/// tau~1 and nu1 there, and only that version has vanishing 5-minors.
inline RingMatrix s2_matrix(const ContextPtr& R, bool as_printed = false) {
    const auto& G = R->group();
    auto s1 = G.factor_generator(0), s2 = G.factor_generator(1);
    const std::uint64_t m = 3;
    auto nut = [&](GroupIndex s) { return nu_of(R, G.power(s, m)); };
    auto taut = [&](GroupIndex s) { return minus_one(G.power(s, m), R); };
    auto nu = [&](GroupIndex s) { return nu_of(R, s); };
    auto tau = [&](GroupIndex s) { return minus_one(s, R); };
    auto mu = [&](GroupIndex s) { return geometric_sum(s, m, R); };
    auto z = RingElement::zero(R);
    auto one = RingElement::one(R);
    auto e22 = as_printed ? nut(s1) : taut(s1);
    auto e54 = as_printed ? nu(s2) : nu(s1);
    return RingMatrix::from_rows(R, {{nut(s1), z, one, z, z},
                                     {taut(s2), e22, z, mu(s1) * mu(s2), z},
                                     {z, nut(s2), z, z, one},
                                     {z, z, tau(s1), z, z},
                                     {z, z, tau(s2), e54, z},
                                     {z, z, z, nu(s2), tau(s1)},
                                     {z, z, z, z, tau(s2)}});
}

/// Number of 5 x 5 row-subset minors and how many are nonzero.
inline std::pair<std::size_t, std::size_t> row_subset_minors(const RingMatrix& B) {
    std::size_t count = 0, nonzero = 0;
    std::vector<std::size_t> rows(B.cols()), cols(B.cols());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    do {
        ++count;
        if (!determinant(B.submatrix(rows, cols)).is_zero()) ++nonzero;
    } while (detail::next_combination(rows, B.rows()));
    return {count, nonzero};
}

/// Cone-built d_3 with rows and columns put in the displayed order.
inline RingMatrix s2_cone_matrix(const ContextPtr& R) {
    auto cone = cone_construction(R, all_factor_generators(R->group()), {3, 3}, 3);
    const auto& D = cone.D;
    auto find = [](const std::vector<std::string>& ls, const std::string& l) {
        auto it = std::find(ls.begin(), ls.end(), l);
        if (it == ls.end()) throw Error("s2: cone basis lacks " + l);
        return static_cast<std::size_t>(it - ls.begin());
    };
    std::vector<std::size_t> rs, cs;
    for (auto l : {"s(u1^2)", "s(u1*u2)", "s(u2^2)", "x1^3", "x1^2*x2", "x1*x2^2", "x2^3"}) rs.push_back(find(D.labels(3), l));
    for (auto l : {"s(u1)", "s(u2)", "x1^2", "x1*x2", "x2^2"}) cs.push_back(find(D.labels(2), l));
    return D.d(3).submatrix(rs, cs);
}

inline bool equal_up_to_entry_signs(const RingMatrix& a, const RingMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (!(a.at(i, j) == b.at(i, j)) && !(a.at(i, j) == -b.at(i, j))) return false;
    return true;
}

inline TaskResult s2_5minors(int N = 2) {
    auto r = example_result("s2-5minors");
    r.N = N;
    r.M = 1;
    auto R = make_context(PGroup(3, {9, 9}), N, 1);
    auto B = s2_matrix(R);
    auto [count, nonzero] = row_subset_minors(B);
    r.check(count == 21, "expected 21 row subsets");
    r.check(nonzero == 0, std::to_string(nonzero) + " of the 5-minors are nonzero");
    if (nonzero == 0) r.notes.push_back("all " + std::to_string(count) + " 5-minors vanish");
    r.check(equal_up_to_entry_signs(B, s2_cone_matrix(R)), "matrix differs from the cone-built d_3 beyond signs");
    auto printed = row_subset_minors(s2_matrix(R, true));
    r.notes.push_back("as printed ((2,2) = nu~1, (5,4) = nu2): " + std::to_string(printed.second) + " of " +
                      std::to_string(printed.first) + " 5-minors nonzero; entries corrected from the cone construction");
    return r;
}

inline TaskResult thm46_minors(unsigned n, std::uint64_t order) {
    auto r = example_result("thm46-minors");
    std::uint64_t pn = 1;
    for (unsigned k = 0; k < n; ++k) pn *= 3;
    r.N = 2;
    r.M = static_cast<int>(2 * pn + 4);
    auto L = make_context(PGroup(3, {order}), r.N, r.M);
    auto A = thm51_stacked_matrix(L, 1, n);
    auto wn = gamma_power_poly(n, L);
    auto nuT = norm_element(Subgroup::whole(L->group()), L) * RingElement::t_power(L, 1);
    auto m2 = minors(A, 2);
    r.ideals.push_back(render(m2, "Min_2"));
    r.check(ideal_equal(m2, Ideal::generated(L, {wn, nuT})), "2-minors differ from (w_n, N_H T)");
    auto f = fitt_shift1_stacked(A, 0, 1, den_gamma(n, 3));
    auto expect = FractionalIdeal::from_terms(L, {{RingElement::one(L), {}}, {nuT, {den_gamma(n, 3)}}});
    r.ideals.push_back(render(f, "fitt1"));
    r.check(frac_ideal_equal(f, expect), "Fitt^[1] differs from (1, nu_H T / w_n)");
    Scenario s(L, {{"v", {{1}}, {}, n}});
    r.check(frac_ideal_equal(f, fitt1_Z0(s, Method::Direct)), "direct route disagrees with the stacked matrix");
    if (n >= 1) {
        const auto& m = s.model();
        auto t = thm46_complexes(m.R, m.embed[1], m.c);
        auto g = fitt_shift1_from_complex(t.D, L, m.lift_map(), m.w());
        r.check(frac_ideal_equal(f, g), "quotient complex disagrees with the stacked matrix");
    }
    return r;
}

inline TaskResult thm47_B(std::size_t r_places) {
    auto r = example_result("thm47-B");
    r.N = 2;
    r.M = 12;
    auto L = make_context(PGroup(3, {9}), r.N, r.M);
    std::vector<PlaceDatum> all{{"v1", {{3}}, {}, 0}, {"v2", {{1}}, {}, 1}, {"v3", {{3}}, {}, 1}};
    Scenario s(L, {all.begin(), all.begin() + static_cast<long>(r_places)});
    auto mins = minors(thm47_B_matrix(s), r_places + 1);
    r.ideals.push_back(render(mins, "Min_" + std::to_string(r_places + 1) + "(B)"));
    r.check(ideal_equal(mins, Ideal::generated(L, thm47_generators(s))), "Min_{r+1}(B) differs from the generator list");
    return r;
}

inline TaskResult independence(int M = 6, std::vector<std::vector<PlaceDatum>> extras = {}) {
    auto r = example_result("independence");
    r.N = 2;
    r.M = M;
    if (extras.empty()) extras = {{{"u1", {}, {}, 0}}, {{"u1", {}, {}, 0}, {"u2", {}, {}, 0}}};
    auto L = make_context(PGroup(3, {3, 3}), r.N, r.M);
    Scenario s(L, {{"v1", {{1, 0}}, {}, 0}, {"v2", {{0, 1}}, {}, 0}});
    for (const auto& e : extras) {
        auto rep = independence_check(s, e, Method::Tensor);
        r.ideals.push_back(render(rep.lhs, "fitt1 with " + std::to_string(e.size()) + " extra"));
        r.check(rep.pass, "adding " + std::to_string(e.size()) + " unramified places changed more than the Frobenius factor");
    }
    return r;
}

inline TaskResult by_id(const std::string& id) {
    if (id == "ex-4.5") return ex45();
    if (id == "ex-4.6") return ex46();
    if (id == "prop-1.9") return prop19();
    if (id == "s1") return s1();
    if (id == "s2-5minors") return s2_5minors();
    if (id == "thm46-minors") {
        auto all = example_result("thm46-minors");
        for (unsigned n : {0u, 1u})
            for (std::uint64_t o : {3u, 9u}) {
                auto one = thm46_minors(n, o);
                all.N = one.N;
                all.M = std::max(all.M, one.M);
                for (auto& i : one.ideals) {
                    i.role += " [n=" + std::to_string(n) + ", |H|=" + std::to_string(o) + "]";
                    all.ideals.push_back(i);
                }
                all.check(one.status == Status::Pass, one.witness);
            }
        return all;
    }
    if (id == "thm47-B") {
        auto all = example_result("thm47-B");
        for (std::size_t k = 1; k <= 3; ++k) {
            auto one = thm47_B(k);
            all.N = one.N;
            all.M = one.M;
            all.ideals.insert(all.ideals.end(), one.ideals.begin(), one.ideals.end());
            all.check(one.status == Status::Pass, one.witness);
        }
        return all;
    }
    if (id == "independence") return independence();
    throw Error("unknown example id '" + id + "'");
}

}  // namespace reproduce

// ---------------------------------------------------------------------------
// Task dispatch

namespace detail {

inline std::vector<std::size_t> sizes_param(const json& t, std::vector<std::size_t> fallback) {
    if (!t.contains("sizes")) return fallback;
    return t["sizes"].get<std::vector<std::size_t>>();
}

inline std::vector<PlaceDatum> extra_places(const json& t, std::size_t rank) {
    std::vector<PlaceDatum> out;
    if (!t.contains("extra_places")) return out;
    for (std::size_t k = 0; k < t["extra_places"].size(); ++k) out.push_back(parse_place(t["extra_places"][k], "", rank));
    return out;
}

inline void conjecture_rows(TaskResult& r, const std::vector<ConjectureRow>& rows) {
    for (const auto& row : rows) {
        std::ostringstream os;
        os << row.check << " e=" << row.e << " monomials=" << row.monomials << " log|lhs|=" << row.lhs_log
           << " log|rhs|=" << row.rhs_log << " " << (row.pass ? "equal" : "differ");
        r.notes.push_back(os.str());
        r.check(row.pass, row.witness.empty() ? "e=" + std::to_string(row.e) + " differs" : row.witness);
    }
}

}  // namespace detail

inline TaskResult run_task(const Config& c, const TaskSpec& spec, unsigned jobs = 1) {
    const auto& s = c.settings;
    const auto& t = spec.params;
    TaskResult r;
    r.id = spec.id;
    r.kind = spec.kind;
    r.N = s.coeff_precision;
    r.M = s.t_precision;
    auto start = std::chrono::steady_clock::now();
    try {
        PGroup H(s.p, s.group_orders);
        auto L = make_context(H, s.coeff_precision, s.t_precision, s.allow_even_p);
        auto R = make_context(H, s.coeff_precision, 1, s.allow_even_p);
        auto need_places = [&] {
            if (c.places.empty()) throw Error("task needs places in the config");
            return Scenario(L, c.places);
        };
        bool allow_r5 = t.value("allow_r5", false);
        if (spec.kind == "reproduce") {
            auto rep = reproduce::by_id(t["example"].get<std::string>());
            rep.id = r.id;
            rep.kind = r.kind;
            r = rep;
        } else if (spec.kind == "fitt1") {
            auto sc = need_places();
            std::vector<Method> methods;
            if (t.contains("methods"))
                for (const auto& m : t["methods"]) {
                    auto pm = parse_method(m.get<std::string>());
                    if (!pm) throw Error("unknown method '" + m.get<std::string>() + "'");
                    methods.push_back(*pm);
                }
            else if (t.contains("method"))
                methods.push_back(*parse_method(t["method"].get<std::string>()));
            else
                methods = applicable_methods(sc, s.budget);
            std::optional<FractionalIdeal> first;
            std::string first_name;
            for (auto m : methods) {
                auto f = fitt1_Z0(sc, m, jobs, s.budget);
                r.ideals.push_back(render(f, "fitt1[" + method_name(m) + "]"));
                if (!first) {
                    first = f;
                    first_name = method_name(m);
                } else {
                    r.check(frac_ideal_equal(*first, f), first_name + " and " + method_name(m) + " routes disagree");
                }
            }
        } else if (spec.kind == "minors") {
            auto which = t.value("matrix", std::string("A"));
            RingMatrix m;
            if (which == "A" || which == "Mtilde") {
                auto gens = all_factor_generators(H);
                m = which == "A" ? build_A(R, gens) : build_Mtilde(R, gens);
                r.M = 1;
            } else if (which == "thm47-B") {
                m = thm47_B_matrix(need_places());
            } else if (which == "zv") {
                m = build_Zv(need_places(), t.value("place", std::size_t{0}));
            } else if (which == "s2") {
                if (s.group_orders != std::vector<std::uint64_t>{9, 9}) throw Error("s2 matrix needs group_orders [9, 9]");
                m = reproduce::s2_matrix(R);
                r.M = 1;
            } else {
                throw Error("unknown matrix '" + which + "'");
            }
            std::vector<std::size_t> all(std::min(m.rows(), m.cols()) + 1);
            std::iota(all.begin(), all.end(), std::size_t{0});
            auto sizes = detail::sizes_param(t, all);
            auto mins = minor_ideals(m, sizes, jobs);
            auto expect = t.value("expect", std::string());
            for (auto e : sizes) {
                const auto& I = mins.at(e);
                r.ideals.push_back(render(I, "Min_" + std::to_string(e)));
                if (expect == "zero") r.check(I.is_zero(), "Min_" + std::to_string(e) + " is not zero");
                if (expect == "unit") r.check(I.is_unit_ideal(), "Min_" + std::to_string(e) + " is not the unit ideal");
            }
        } else if (spec.kind == "strong-conjecture") {
            r.M = 1;
            detail::conjecture_rows(r, strong_conjecture_check(MonomialRing(R, all_factor_generators(H)), jobs, allow_r5));
        } else if (spec.kind == "weak-conjecture") {
            auto row = weak_conjecture_check(MonomialRing(R, all_factor_generators(H)), L, jobs, allow_r5);
            detail::conjecture_rows(r, {row});
        } else if (spec.kind == "gkt-minors") {
            MonomialRing ring(R, all_factor_generators(H));
            r.M = 1;
            std::vector<std::size_t> sizes(mtilde_generic_rank(ring.r()) + 1);
            std::iota(sizes.begin(), sizes.end(), std::size_t{0});
            std::vector<ConjectureRow> rows;
            for (auto e : detail::sizes_param(t, sizes)) rows.push_back(gkt_minor_check(ring, e, jobs, allow_r5));
            detail::conjecture_rows(r, rows);
        } else if (spec.kind == "thm46" || spec.kind == "thm45") {
            auto sc = need_places();
            auto method = parse_method(t.value("method", std::string("direct")));
            std::vector<std::size_t> stars;
            if (t.contains("v_star")) {
                stars.push_back(t["v_star"].get<std::size_t>());
            } else {
                stars = minimal_layer_places(sc);
            }
            std::optional<FractionalIdeal> lhs;
            if (spec.kind == "thm46" || t.value("check_direct", false)) {
                lhs = fitt1_Z0(sc, *method, jobs, s.budget);
                r.ideals.push_back(render(*lhs, "fitt1[" + method_name(*method) + "]"));
            }
            std::optional<FractionalIdeal> sum;
            if (spec.kind == "thm45") {
                sum = thm45_rhs(sc);
                r.ideals.push_back(render(*sum, "sum form"));
                if (lhs) r.check(frac_ideal_equal(*lhs, *sum), "sum form differs from the computed Fitt^[1]");
            }
            std::optional<FractionalIdeal> prev;
            for (auto v : stars) {
                auto rhs = thm46_rhs(sc, v);
                r.ideals.push_back(render(rhs, "v*-form at " + sc.places().at(v).label));
                if (lhs) r.check(frac_ideal_equal(*lhs, rhs), "v*-form at " + sc.places()[v].label + " differs from Fitt^[1]");
                if (sum) r.check(frac_ideal_equal(*sum, rhs), "v*-form at " + sc.places()[v].label + " differs from the sum form");
                if (prev) r.check(frac_ideal_equal(*prev, rhs), "v*-forms disagree between minimal places");
                prev = rhs;
            }
        } else if (spec.kind == "thm47") {
            auto sc = need_places();
            auto mins = minors(thm47_B_matrix(sc), sc.size() + 1, jobs);
            r.ideals.push_back(render(mins, "Min_{r+1}(B)"));
            r.check(ideal_equal(mins, Ideal::generated(L, thm47_generators(sc))), "Min_{r+1}(B) differs from the generator list");
            if (t.value("check_direct", false)) {
                auto f = fitt1_Z0(sc, Method::Direct, jobs);
                r.ideals.push_back(render(f, "fitt1[direct]"));
                r.check(frac_ideal_equal(f, thm47_fitt(sc, jobs)), "B-matrix Fitt^[1] differs from the direct route");
            }
        } else if (spec.kind == "independence") {
            auto sc = need_places();
            auto extra = detail::extra_places(t, H.rank());
            if (extra.empty()) throw Error("independence needs extra_places");
            auto rep = independence_check(sc, extra, *parse_method(t.value("method", std::string("direct"))), jobs);
            r.ideals.push_back(render(rep.lhs, "with extra places"));
            r.ideals.push_back(render(rep.rhs, "base times Frobenius factors"));
            r.check(rep.pass, "Fitt^[1] changed by more than the Frobenius factors");
        } else if (spec.kind == "exactness") {
            auto which = t.value("complex", std::string("bar"));
            FreeComplex cx(R);
            std::set<int> allowed{0};
            if (which == "bar") {
                cx = bar_resolution(R, s.max_degree, s.budget);
            } else if (which == "cyclic") {
                cx = cyclic_complex(H.factor_generator(0), R, s.max_degree + 1);
            } else if (which == "tensor") {
                cx = tensor_complexes(cyclic_factors(R, all_factor_generators(H), s.max_degree + 1));
            } else if (which == "pruned") {
                cx = tensor_construction(R, all_factor_generators(H), s.max_degree + 1).D;
                allowed = {1};
            } else {
                throw Error("unknown complex '" + which + "'");
            }
            r.M = 1;
            r.check(cx.is_complex(), "boundaries do not compose to zero");
            auto rep = check_exactness(cx, allowed, jobs);
            for (const auto& p : rep.profiles) r.notes.push_back("H_" + std::to_string(p.degree) + ": " + p.to_string());
            if (!rep.pass) r.check(false, "homology outside the allowed degrees in degree " + std::to_string(rep.failing.at(0)));
        }
    } catch (const std::exception& e) {
        r.status = Status::Error;
        r.witness = e.what();
    }
    r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

struct Report {
    std::string version = tool_version;
    json config;
    std::vector<TaskResult> tasks;
};

/// Tasks run in parallel across up to `jobs` workers; minors inside a task
/// get the workers when there is a single task.
inline Report run(const Config& c) {
    Report rep;
    rep.config = c.echo;
    rep.tasks.resize(c.tasks.size());
    const unsigned jobs = c.settings.jobs;
    const unsigned inner = c.tasks.size() == 1 ? jobs : 1;
    parallel_for(c.tasks.size(), jobs, [&](std::size_t i) { rep.tasks[i] = run_task(c, c.tasks[i], inner); });
    return rep;
}

inline int exit_code(const Report& r) {
    bool fail = false;
    for (const auto& t : r.tasks) {
        if (t.status == Status::Error) return 3;
        if (t.status == Status::Fail) fail = true;
    }
    return fail ? 1 : 0;
}

inline std::string text_report(const Report& r) {
    std::ostringstream os;
    const auto& c = r.config;
    os << "fittcalc " << r.version << "\n";
    os << "config: p=" << c["p"].get<std::uint64_t>() << " N=" << c["coeff_precision"].get<int>()
       << " M=" << c["t_precision"].get<int>() << " group=(";
    const auto& g = c["group_orders"];
    for (std::size_t i = 0; i < g.size(); ++i) os << (i ? "," : "") << g[i].get<std::uint64_t>();
    os << ") places=" << c["places"].size() << " tasks=" << r.tasks.size() << "\n";
    std::size_t counts[3] = {0, 0, 0};
    for (std::size_t i = 0; i < r.tasks.size(); ++i) {
        const auto& t = r.tasks[i];
        ++counts[static_cast<int>(t.status)];
        os << "\n[" << (i + 1) << "] " << t.id << " (" << t.kind << ") " << status_name(t.status) << "  N=" << t.N
           << " M=" << t.M << "\n";
        for (const auto& id : t.ideals) {
            os << "  " << id.role << ": (";
            for (std::size_t k = 0; k < id.generators.size(); ++k) os << (k ? ", " : "") << id.generators[k];
            os << ")";
            if (!id.denominator.empty()) os << " / " << id.denominator;
            os << "\n";
        }
        for (const auto& n : t.notes) os << "  " << n << "\n";
        if (!t.witness.empty()) os << "  witness: " << t.witness << "\n";
    }
    os << "\nsummary: " << counts[0] << " PASS, " << counts[1] << " FAIL, " << counts[2] << " ERROR\n";
    os << "note: the Iwasawa-side ideal is not computed; only the algebraic Fitt^[1] side is.\n";
    return os.str();
}

inline json json_report(const Report& r) {
    json j;
    j["version"] = r.version;
    j["config"] = r.config;
    j["tasks"] = json::array();
    for (const auto& t : r.tasks) {
        json x;
        x["id"] = t.id;
        x["kind"] = t.kind;
        x["status"] = status_name(t.status);
        x["precision"] = {{"N", t.N}, {"M", t.M}};
        x["ideals"] = json::array();
        for (const auto& i : t.ideals) {
            json y;
            y["role"] = i.role;
            y["generators"] = i.generators;
            if (!i.denominator.empty()) y["denominator"] = i.denominator;
            x["ideals"].push_back(y);
        }
        x["witness"] = t.witness;
        x["notes"] = t.notes;
        x["millis"] = t.millis;
        j["tasks"].push_back(x);
    }
    return j;
}

}  // namespace fitt
