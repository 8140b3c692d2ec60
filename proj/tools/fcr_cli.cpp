#include <omp.h>

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fcr/io.hpp"
#include "fcr/witt.hpp"

using namespace fcr;

namespace {

enum Exit { kOk = 0, kOther = 1, kArgs = 2, kPrecision = 3, kBudget = 4 };

int exit_code(const std::exception_ptr& ep, std::string& msg) {
    try {
        std::rethrow_exception(ep);
    } catch (const ArgumentError& e) {
        msg = e.what();
        return kArgs;
    } catch (const PrecisionExhausted& e) {
        msg = e.what();
        return kPrecision;
    } catch (const NonConvergence& e) {
        msg = e.what();
        return kPrecision;
    } catch (const BaseFieldTooSmall& e) {
        msg = e.what();
        return kPrecision;
    } catch (const BudgetExceeded& e) {
        msg = e.what();
        return kBudget;
    } catch (const ResourceError& e) {
        msg = e.what();
        return kBudget;
    } catch (const std::exception& e) {
        msg = e.what();
        return kOther;
    }
}

std::string read_input(const std::string& path) {
    std::ostringstream out;
    if (path == "-") {
        out << std::cin.rdbuf();
    } else {
        std::ifstream in(path);
        if (!in) throw ArgumentError("cannot read " + path);
        out << in.rdbuf();
    }
    return out.str();
}

// Batch errors already name the input; with_path adds it for secondary inputs.
CrystalDocument load(const std::string& path, bool with_path = false) {
    try {
        return parse_crystal(read_input(path));
    } catch (const ArgumentError& e) {
        if (!with_path) throw;
        throw ArgumentError(path + ": " + e.what());
    }
}

// Runs fn on (M1, M2), doubling the precision of both on PrecisionExhausted.
template <class Fn>
auto with_auto_precision2(const Crystal& M1, const Crystal& M2, Fn&& fn) {
    int N = std::max(M1.precision(), M2.precision());
    for (;;) {
        try {
            return fn(with_precision(M1, N), with_precision(M2, N));
        } catch (const PrecisionExhausted&) {
            if (N * 2 > max_auto_precision()) throw;
            N *= 2;
        }
    }
}

struct Options {
    int max_precision = 4096;
    int jobs = 1;
    std::vector<std::string> files;
    std::string pair;
    int s = 1;
    int cap = -1;
    std::vector<int> tower = {1, 2, 3, 4};
    std::string checks = "all";
    bool oracle = false;
    std::uint64_t budget = 0;
    double timeout = 0;
    bool serial = false;
    std::string twist;
    unsigned long witt_p = 2;
    int witt_len = 2;
};

// An r x r grid of coefficient lists, as in the phi field of a crystal document.
PMatrix load_twist(const std::string& path, RingHandle R, int r) {
    std::string text = read_input(path);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error&) {
        throw ArgumentError(path + ": malformed JSON");
    }
    Json doc = {{"p", std::to_string(R->p)}, {"n", std::to_string(R->n)}, {"precision", std::to_string(R->N)},
                {"rank", std::to_string(r)}, {"phi", j}};
    try {
        return parse_crystal_json(doc).crystal.A;
    } catch (const ArgumentError& e) {
        throw ArgumentError(path + ": " + e.what());
    }
}

Json run_one(const std::string& cmd, const std::string& file, const Options& o) {
    CrystalDocument doc = load(file);
    const Crystal& M = doc.crystal;
    auto second = [&] { return o.pair.empty() ? M : load(o.pair, true).crystal; };
    if (cmd == "hodge")
        return with_auto_precision(M, [](const Crystal& C) { return Json{{"hodge", to_json(hodge_slopes(C))["hodge"]}}; });
    if (cmd == "newton")
        return with_auto_precision(M, [](const Crystal& C) { return Json{{"newton", to_json(newton_slopes(C))}}; });
    if (cmd == "ordinary")
        return with_auto_precision(M, [](const Crystal& C) {
            return Json{{"ordinary", is_ordinary(C)}, {"isoclinic", is_isoclinic(C)}};
        });
    if (cmd == "fbasis")
        return with_auto_precision(M, [](const Crystal& C) {
            return Json{{"hodge", to_json(hodge_slopes(C))["hodge"]}, {"f_basis", to_json(f_basis(C))}};
        });
    if (cmd == "level-torsion") {
        LevelOptions lo;
        lo.max_precision = o.max_precision;
        LevelModule L = level_module(M, second(), lo);
        Json j = to_json(L);
        j["O_basis"] = to_json(L.O_basis);
        j["O"] = {{"basis", to_json(L.O.basis)}, {"scale", std::to_string(L.O.scale)}};
        return j;
    }
    if (cmd == "isom-number") return with_auto_precision(M, [](const Crystal& C) { return to_json(isom_number(C)); });
    if (cmd == "hom-s")
        return with_auto_precision2(M, second(), [&](const Crystal& A, const Crystal& B) {
            return to_json(hom_s(A, B, o.s));
        });
    if (cmd == "endo-number") {
        Crystal M2 = second();
        int cap = o.cap;
        if (cap < 0) {
            LevelOptions lo;
            lo.max_precision = o.max_precision;
            cap = level_torsion(M, M2, lo) + 3;
        }
        return with_auto_precision2(M, M2, [&](const Crystal& A, const Crystal& B) {
            Json j = to_json(endo_number_hat(A, B, cap, o.tower));
            j["cap"] = std::to_string(cap);
            return j;
        });
    }
    if (cmd == "gamma1") {
        if (!doc.permutation) throw ArgumentError("gamma1 needs a permutation document");
        return to_json(gamma1_permutation(doc.permutation->e, doc.permutation->pi));
    }
    if (cmd == "report") {
        ReportOptions ro;
        ro.tower_sweep = o.checks == "all";
        ro.cap = o.cap;
        ro.tower = o.tower;
        ro.oracle = o.oracle;
        ro.oracle_s = o.s;
        ro.budget.max_candidates = o.budget ? o.budget : ro.budget.max_candidates;
        ro.budget.timeout_seconds = o.timeout;
        ro.permutation = doc.permutation;
        return to_json(report(M, ro));
    }
    throw ArgumentError("unknown subcommand " + cmd);
}

Json run_oracle(const std::string& cmd, const Options& o) {
    if (o.files.size() != 1) throw ArgumentError("oracle commands take exactly one input");
    Crystal M = load(o.files[0], true).crystal;
    SearchBudget budget{o.budget, o.timeout};
    Exec exec = o.serial ? Exec::serial : Exec::parallel;
    if (cmd == "hom-s") {
        Crystal M2 = o.pair.empty() ? M : load(o.pair, true).crystal;
        BruteHomResult B = brute_hom_s(M, M2, o.s, budget, exec);
        Json sols = Json::array();
        for (const auto& X : B.solutions) sols.push_back(to_json(X));
        return {{"s", std::to_string(o.s)},
                {"count", std::to_string(B.solutions.size())},
                {"solutions", sols},
                {"nominal_candidates", std::to_string(B.stats.nominal)},
                {"evaluated_nodes", std::to_string(B.stats.evaluated)}};
    }
    PMatrix g = load_twist(o.twist, M.ring(), M.rank());
    SearchStats stats;
    bool iso = is_isomorphic_truncation(M, PMatrix::identity(M.ring(), M.rank()), g, o.s, budget, exec, &stats);
    return {{"s", std::to_string(o.s)},
            {"isomorphic", iso},
            {"nominal_candidates", std::to_string(stats.nominal)},
            {"evaluated_nodes", std::to_string(stats.evaluated)}};
}

// One result per input; a list when several inputs are given.
int run_batch(const std::string& cmd, const Options& o) {
    const int count = static_cast<int>(o.files.size());
    std::vector<Json> out(count);
    std::vector<int> codes(count, kOk);
    std::vector<std::string> msgs(count);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, std::min(o.jobs, count)))
    for (int k = 0; k < count; ++k) {
        try {
            out[k] = run_one(cmd, o.files[k], o);
        } catch (...) {
            codes[k] = exit_code(std::current_exception(), msgs[k]);
        }
    }
    int code = kOk;
    for (int k = 0; k < count; ++k)
        if (codes[k] != kOk) {
            std::cerr << "fcr: " << o.files[k] << ": " << msgs[k] << "\n";
            if (code == kOk) code = codes[k];
        }
    if (count == 1) {
        if (codes[0] == kOk) std::cout << out[0].dump(2) << "\n";
        return code;
    }
    Json all = Json::array();
    for (int k = 0; k < count; ++k) {
        if (codes[k] == kOk)
            all.push_back({{"input", o.files[k]}, {"result", out[k]}});
        else
            all.push_back({{"input", o.files[k]}, {"error", {{"code", std::to_string(codes[k])}, {"message", msgs[k]}}}});
    }
    std::cout << all.dump(2) << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Invariants of F-crystals over truncated Witt vectors"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--max-precision", o.max_precision, "Largest precision the automatic raise may reach")
        ->check(CLI::Range(1, 1 << 16));
    app.add_option("--jobs,-j", o.jobs, "Inputs processed in parallel")->check(CLI::PositiveNumber);

    auto inputs = [&](CLI::App* sub) { sub->add_option("inputs", o.files, "Crystal documents")->required(); };
    auto pair = [&](CLI::App* sub) { sub->add_option("--pair", o.pair, "Second crystal document"); };
    auto tower = [&](CLI::App* sub) {
        sub->add_option("--cap", o.cap, "Largest level in the image chain (default: level torsion + 3)");
        sub->add_option("--tower", o.tower, "Field degrees of the tower")->delimiter(',');
    };

    std::vector<std::pair<std::string, std::string>> simple = {
        {"hodge", "Hodge slopes"},
        {"newton", "Newton slopes"},
        {"ordinary", "Ordinariness and isoclinicity"},
        {"fbasis", "A basis adapted to the Hodge slopes"},
        {"isom-number", "Isomorphism number"},
        {"gamma1", "gamma(1) of a permutation crystal"},
    };
    for (const auto& [name, help] : simple) inputs(app.add_subcommand(name, help));
    CLI::App* lt = app.add_subcommand("level-torsion", "Level module and level torsion");
    inputs(lt);
    pair(lt);
    CLI::App* hs = app.add_subcommand("hom-s", "Homomorphisms of F-truncations mod p^s");
    inputs(hs);
    pair(hs);
    hs->add_option("--s", o.s, "Truncation level")->required()->check(CLI::PositiveNumber);
    CLI::App* en = app.add_subcommand("endo-number", "Image-chain stabilization over a field tower");
    inputs(en);
    pair(en);
    tower(en);
    CLI::App* rp = app.add_subcommand("report", "Every invariant with consistency checks");
    inputs(rp);
    tower(rp);
    rp->add_option("--checks", o.checks, "all or none")->check(CLI::IsMember({"all", "none"}));
    rp->add_flag("--oracle", o.oracle, "Compare hom-s with brute force");
    rp->add_option("--s", o.s, "Truncation level for the oracle")->check(CLI::PositiveNumber);
    rp->add_option("--budget", o.budget, "Oracle candidate budget");

    CLI::App* witt = app.add_subcommand("witt", "Witt vector polynomial tables");
    witt->require_subcommand(1);
    CLI::App* table = witt->add_subcommand("table", "Sum and product polynomials");
    table->add_option("--p", o.witt_p, "Prime")->required();
    table->add_option("--len", o.witt_len, "Length")->required()->check(CLI::PositiveNumber);

    CLI::App* orc = app.add_subcommand("oracle", "Brute-force searches");
    orc->require_subcommand(1);
    CLI::App* ohs = orc->add_subcommand("hom-s", "Enumerate Hom_s by brute force");
    CLI::App* oiso = orc->add_subcommand("isom", "Is M(g) truncation-isomorphic to M?");
    for (CLI::App* sub : {ohs, oiso}) {
        inputs(sub);
        sub->add_option("--s", o.s, "Truncation level")->required()->check(CLI::PositiveNumber);
        sub->add_option("--budget", o.budget, "Candidate budget")->required()->check(CLI::PositiveNumber);
        sub->add_option("--timeout", o.timeout, "Seconds before giving up");
        sub->add_flag("--serial", o.serial, "Use the serial reference search");
    }
    pair(ohs);
    oiso->add_option("--twist", o.twist, "r x r matrix g as a JSON grid")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kArgs;
    }
    max_auto_precision() = o.max_precision;

    try {
        if (witt->parsed()) {
            if (!is_prime(o.witt_p)) throw ArgumentError("p must be prime");
            std::cout << table_text(witt_poly_table(o.witt_p, o.witt_len));
            return kOk;
        }
        if (orc->parsed()) {
            std::cout << run_oracle(ohs->parsed() ? "hom-s" : "isom", o).dump(2) << "\n";
            return kOk;
        }
        return run_batch(app.get_subcommands().front()->get_name(), o);
    } catch (...) {
        std::string msg;
        int code = exit_code(std::current_exception(), msg);
        std::cerr << "fcr: " << msg << "\n";
        return code;
    }
}
