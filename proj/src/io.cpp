#include "fcr/io.hpp"

#include <algorithm>
#include <regex>

namespace fcr {

namespace {

// Line of the first occurrence of a key, for diagnostics; 0 when unknown.
int key_line(const std::string& text, const std::string& key) {
    if (text.empty()) return 0;
    size_t at = text.find("\"" + key + "\"");
    if (at == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(at), '\n'));
}

class Reader {
public:
    explicit Reader(std::string text) : text_(std::move(text)) {}

    [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
        std::string root = field.substr(0, field.find('['));
        int line = key_line(text_, root);
        std::string where = line > 0 ? "line " + std::to_string(line) + ", " : "";
        throw ArgumentError(where + "field " + field + ": " + msg);
    }

    Int integer(const Json& v, const std::string& field) const {
        static const std::regex digits("-?[0-9]+");
        if (v.is_number_integer()) return Int(std::to_string(v.get<long long>()));
        if (v.is_number_unsigned()) return Int(std::to_string(v.get<unsigned long long>()));
        if (!v.is_string()) fail(field, "expected an integer or a decimal string");
        const std::string s = v.get<std::string>();
        if (!std::regex_match(s, digits)) fail(field, "malformed number string \"" + s + "\"");
        return Int(s);
    }

    long small(const Json& v, const std::string& field, long lo, long hi) const {
        Int x = integer(v, field);
        if (x < lo || x > hi) fail(field, "value out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return x.get_si();
    }

    const Json& need(const Json& doc, const std::string& key) const {
        if (!doc.contains(key)) fail(key, "missing");
        return doc.at(key);
    }

private:
    std::string text_;
};

CrystalDocument parse_with(const Json& doc, const Reader& rd) {
    if (!doc.is_object()) rd.fail("document", "expected a JSON object");
    static const std::vector<std::string> known = {"kind", "p", "n", "precision", "rank", "phi", "e", "pi", "scale"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) rd.fail(it.key(), "unknown field");
    std::string kind = "matrix";
    if (doc.contains("kind")) {
        if (!doc["kind"].is_string()) rd.fail("kind", "expected a string");
        kind = doc["kind"].get<std::string>();
        if (kind != "matrix" && kind != "permutation") rd.fail("kind", "must be \"matrix\" or \"permutation\"");
    }
    long p = rd.small(rd.need(doc, "p"), "p", 2, 1L << 31);
    if (!is_prime(static_cast<unsigned long>(p))) rd.fail("p", std::to_string(p) + " is not prime");
    int n = static_cast<int>(rd.small(rd.need(doc, "n"), "n", 1, 64));
    int N = static_cast<int>(rd.small(rd.need(doc, "precision"), "precision", 1, 1 << 16));
    int scale = doc.contains("scale") ? static_cast<int>(rd.small(doc["scale"], "scale", 0, 1 << 16)) : 0;
    RingHandle R = make_ring(static_cast<unsigned long>(p), n, N);
    CrystalDocument out;
    if (kind == "permutation") {
        if (doc.contains("phi")) rd.fail("phi", "must be omitted for permutation documents");
        const Json& e = rd.need(doc, "e");
        const Json& pi = rd.need(doc, "pi");
        if (!e.is_array() || e.empty()) rd.fail("e", "expected a nonempty array");
        if (!pi.is_array()) rd.fail("pi", "expected an array");
        int r = static_cast<int>(e.size());
        if (doc.contains("rank") && rd.small(doc["rank"], "rank", 1, 4096) != r) rd.fail("rank", "does not match e");
        if (static_cast<int>(pi.size()) != r) rd.fail("pi", "length differs from e");
        PermInstance inst;
        std::vector<char> seen(r, 0);
        for (int i = 0; i < r; ++i) {
            inst.e.push_back(static_cast<int>(rd.small(e[i], "e[" + std::to_string(i) + "]", 0, 1 << 16)));
            int x = static_cast<int>(rd.small(pi[i], "pi[" + std::to_string(i) + "]", 1, r)) - 1;
            if (seen[x]) rd.fail("pi", "is not a permutation");
            seen[x] = 1;
            inst.pi.push_back(x);
        }
        try {
            out.crystal = permutation_crystal(static_cast<unsigned long>(p), n, N, inst.e, inst.pi);
        } catch (const PrecisionExhausted&) {
            rd.fail("e", "an exponent reaches the precision");
        }
        out.crystal.scale = scale;
        out.permutation = inst;
        return out;
    }
    if (doc.contains("e") || doc.contains("pi")) rd.fail(doc.contains("e") ? "e" : "pi", "only allowed for permutation documents");
    int r = static_cast<int>(rd.small(rd.need(doc, "rank"), "rank", 1, 4096));
    const Json& phi = rd.need(doc, "phi");
    if (!phi.is_array() || static_cast<int>(phi.size()) != r) rd.fail("phi", "expected " + std::to_string(r) + " rows");
    PMatrix A(R, r, r);
    for (int i = 0; i < r; ++i) {
        std::string fi = "phi[" + std::to_string(i) + "]";
        if (!phi[i].is_array() || static_cast<int>(phi[i].size()) != r)
            rd.fail(fi, "expected " + std::to_string(r) + " entries");
        for (int j = 0; j < r; ++j) {
            std::string fij = fi + "[" + std::to_string(j) + "]";
            const Json& ent = phi[i][j];
            if (!ent.is_array() || static_cast<int>(ent.size()) != n)
                rd.fail(fij, "expected a list of " + std::to_string(n) + " coefficients");
            std::vector<Int> c(n);
            for (int a = 0; a < n; ++a) {
                c[a] = rd.integer(ent[a], fij + "[" + std::to_string(a) + "]") % R->modulus();
                if (c[a] < 0) c[a] += R->modulus();
            }
            A(i, j) = Zq(R, c);
        }
    }
    try {
        out.crystal = make_crystal(A, scale);
    } catch (const PrecisionExhausted&) {
        rd.fail("phi", "determinant vanishes at precision " + std::to_string(N));
    }
    return out;
}

Json str(long v) { return std::to_string(v); }

}  // namespace

CrystalDocument parse_crystal(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        size_t at = std::min(e.byte > 0 ? e.byte - 1 : 0, text.size());
        int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(at), '\n'));
        throw ArgumentError("line " + std::to_string(line) + ": malformed JSON");
    }
    return parse_with(doc, Reader(text));
}

CrystalDocument parse_crystal_json(const Json& doc) { return parse_with(doc, Reader("")); }

Json serialize_crystal(const CrystalDocument& doc) {
    const Crystal& M = doc.crystal;
    Json j;
    j["kind"] = doc.permutation ? "permutation" : "matrix";
    j["p"] = str(static_cast<long>(M.p()));
    j["n"] = str(M.n());
    j["precision"] = str(M.precision());
    j["rank"] = str(M.rank());
    if (M.scale != 0) j["scale"] = str(M.scale);
    if (doc.permutation) {
        Json e = Json::array(), pi = Json::array();
        for (int x : doc.permutation->e) e.push_back(str(x));
        for (int x : doc.permutation->pi) pi.push_back(str(x + 1));
        j["e"] = e;
        j["pi"] = pi;
    } else {
        j["phi"] = to_json(M.A);
    }
    return j;
}

Json to_json(const Int& v) { return v.get_str(); }

Json to_json(const Zq& a) {
    Json j = Json::array();
    for (const auto& c : a.c) j.push_back(c.get_str());
    return j;
}

Json to_json(const PMatrix& m) {
    Json j = Json::array();
    for (int i = 0; i < m.rows; ++i) {
        Json row = Json::array();
        for (int k = 0; k < m.cols; ++k) row.push_back(to_json(m(i, k)));
        j.push_back(row);
    }
    return j;
}

Json to_json(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Json to_json(const std::vector<Slope>& s) {
    Json j = Json::array();
    for (const auto& x : s) j.push_back({{"slope", to_json(x.value)}, {"multiplicity", str(x.mult)}});
    return j;
}

Json to_json(const HodgeData& h) {
    Json e = Json::array(), f = Json::array(), m = Json::array();
    for (int x : h.e) e.push_back(str(x));
    for (int x : h.f) f.push_back(str(x));
    for (int x : h.h) m.push_back(str(x));
    return {{"hodge", e}, {"f", f}, {"h", m}};
}

Json to_json(const HomGroup& H) {
    Int order = 1;
    for (int i = 0; i < H.order_exponent; ++i) order *= static_cast<long>(H.R->p);
    Json gens = Json::array(), lifts = Json::array();
    for (const auto& g : H.generators) gens.push_back(to_json(g));
    for (const auto& g : H.lifts) lifts.push_back(to_json(g));
    return {{"s", str(H.s)},
            {"order", to_json(order)},
            {"order_exponent", str(H.order_exponent)},
            {"generators", gens},
            {"lifts", lifts},
            {"lift_precision", str(H.lift_ring->N)}};
}

Json to_json(const EndoNumberHat& e) {
    Json rows = Json::array();
    for (const auto& r : e.rows) {
        Json orders = Json::array();
        for (int o : r.image_orders) orders.push_back(str(o));
        rows.push_back({{"degree", str(r.degree)},
                        {"onset", r.onset >= 0 ? Json(str(r.onset)) : Json(nullptr)},
                        {"image_order_exponents", orders}});
    }
    return {{"e_hat", e.conclusive ? Json(str(e.e_hat)) : Json(nullptr)},
            {"conclusive", e.conclusive},
            {"tower", rows},
            {"caveat", e.caveat}};
}

Json to_json(const ExactSequenceReport& r) {
    return {{"s", str(r.s)},
            {"order_exponent_s", str(r.order_s)},
            {"order_exponent_s_plus_1", str(r.order_s1)},
            {"order_exponent_1", str(r.order_1)},
            {"kernel_order_exponent", str(r.kernel_order)},
            {"image_order_exponent", str(r.image_order)},
            {"injective", r.injective},
            {"exact", r.exact_middle},
            {"ok", r.ok()}};
}

Json to_json(const Gamma1Data& g) {
    auto pairs = [](const std::vector<IndexPair>& v) {
        Json j = Json::array();
        for (auto [a, b] : v) j.push_back(Json::array({str(a + 1), str(b + 1)}));
        return j;
    };
    Json nu = Json::array();
    for (int x : g.nu) nu.push_back(str(x));
    return {{"gamma1", str(g.gamma1)},
            {"orbit_dim", str(g.orbit_dim)},
            {"I_plus", pairs(g.plus)},
            {"I_zero", pairs(g.zero)},
            {"I_minus", pairs(g.minus)},
            {"nu", nu},
            {"I_minus_pi", pairs(g.minus_pi)}};
}

Json to_json(const IsomNumber& n) { return {{"n", str(n.n)}, {"provenance", n.provenance}}; }

Json to_json(const LevelModule& L) {
    return {{"level_torsion", str(L.ell)},
            {"precision", str(L.precision)},
            {"dims", {{"plus", str(L.plus.dim())}, {"zero", str(L.zero.dim())}, {"minus", str(L.minus.dim())}}},
            {"iterations",
             {{"plus", str(L.plus.iterations)},
              {"zero", str(L.zero.iterations)},
              {"zero_forward", str(L.zero_forward_iterations)},
              {"zero_backward", str(L.zero_backward_iterations)},
              {"minus", str(L.minus.iterations)}}},
            {"iteration_cap", str(L.iteration_cap)},
            {"zero_sides_agree", L.zero_sides_agree}};
}

Json to_json(const InvariantReport& r) {
    Json j;
    if (r.hodge) j["hodge"] = to_json(*r.hodge)["hodge"];
    if (r.newton) j["newton"] = to_json(*r.newton);
    if (r.ordinary) j["ordinary"] = *r.ordinary;
    if (r.ell) j["level_torsion"] = str(*r.ell);
    if (r.n) j["isom_number"] = to_json(*r.n);
    if (r.e_hat) j["e_hat"] = to_json(*r.e_hat);
    if (r.gamma1) j["gamma1"] = to_json(*r.gamma1);
    if (r.closed_form) j["rank2_closed_form"] = str(*r.closed_form);
    Json checks = Json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = checks;
    Json errors = Json::array();
    for (const auto& [f, m] : r.errors) errors.push_back({{"field", f}, {"message", m}});
    j["errors"] = errors;
    j["all_pass"] = r.all_pass();
    return j;
}

}  // namespace fcr
