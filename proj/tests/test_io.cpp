#include "doctest.h"
#include "fcr/io.hpp"
#include "support.hpp"

using namespace fcr;

namespace {

const char* kUpper = R"({"p":2,"n":1,"precision":8,"rank":2,"phi":[[["2"],["1"]],[["0"],["4"]]]})";

std::string error_of(const std::string& text) {
    try {
        parse_crystal(text);
    } catch (const ArgumentError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("matrix documents parse under the column convention") {
    CrystalDocument d = parse_crystal(kUpper);
    const Crystal& M = d.crystal;
    CHECK_FALSE(d.permutation);
    CHECK(M.p() == 2);
    CHECK(M.precision() == 8);
    CHECK(M.A(0, 0) == Zq(M.ring(), 2));
    CHECK(M.A(0, 1) == Zq(M.ring(), 1));
    CHECK(M.A(1, 0).is_zero());
    CHECK(M.A(1, 1) == Zq(M.ring(), 4));
    CHECK(hodge_slopes(M).e == std::vector<int>{0, 3});
    CHECK(expand_slopes(newton_slopes(M)) == std::vector<Rational>{1, 2});
}

TEST_CASE("permutation documents") {
    CrystalDocument d = parse_crystal(R"({"kind":"permutation","p":2,"e":[0,1],"pi":[2,1],"n":1,"precision":8})");
    REQUIRE(d.permutation);
    CHECK(d.permutation->pi == std::vector<int>{1, 0});
    CHECK(d.crystal.rank() == 2);
    CHECK(is_isoclinic(d.crystal));
    CHECK_FALSE(is_ordinary(d.crystal));
}

TEST_CASE("entries reduce canonically and the round trip is the identity") {
    CrystalDocument d = parse_crystal(R"({"p":3,"n":2,"precision":3,"rank":1,"phi":[[["30","-1"]]]})");
    CHECK(d.crystal.A(0, 0).c == std::vector<Int>{3, 26});
    Json j = serialize_crystal(d);
    CHECK(j["phi"][0][0][0] == "3");
    CHECK(j["p"] == "3");
    CHECK(serialize_crystal(parse_crystal(j.dump())) == j);

    std::mt19937_64 rng(9);
    for (int it = 0; it < 10; ++it) {
        RingHandle R = make_ring(it % 2 ? 3 : 2, 1 + it % 3, 6);
        CrystalDocument doc{test::random_crystal(R, {0, 1 + it % 3}, rng), std::nullopt};
        Json a = serialize_crystal(doc);
        CrystalDocument back = parse_crystal(a.dump(2));
        CHECK(back.crystal.A == doc.crystal.A);
        CHECK(serialize_crystal(back) == a);
    }
    CrystalDocument perm = parse_crystal(R"({"kind":"permutation","p":5,"e":["0","2","1"],"pi":[3,1,2],"n":2,"precision":6})");
    Json pj = serialize_crystal(perm);
    CHECK(pj["pi"] == Json::array({"3", "1", "2"}));
    CHECK(serialize_crystal(parse_crystal(pj.dump())) == pj);
}

TEST_CASE("schema violations are rejected with diagnostics") {
    CHECK(error_of(R"({"p":2,"n":1,"precision":8,"rank":3,"phi":[[["2"],["1"]],[["0"],["4"]]]})").find("phi") !=
          std::string::npos);
    CHECK(error_of(R"({"p":4,"n":1,"precision":8,"rank":1,"phi":[[["1"]]]})").find("not prime") != std::string::npos);
    CHECK(error_of(R"({"p":2,"n":1,"precision":8,"rank":1,"phi":[[["1x"]]]})").find("malformed") != std::string::npos);
    CHECK(error_of(R"({"p":2,"n":1,"precision":3,"rank":1,"phi":[[["8"]]]})").find("determinant") != std::string::npos);
    CHECK(error_of(R"({"p":2,"n":2,"precision":3,"rank":1,"phi":[[["1"]]]})").find("coefficients") != std::string::npos);
    CHECK(error_of(R"({"kind":"permutation","p":2,"e":[0,1],"pi":[1,1],"n":1,"precision":8})").find("permutation") !=
          std::string::npos);
    CHECK(error_of(R"({"kind":"permutation","p":2,"e":[0,1],"pi":[2,1],"n":1,"precision":8,"phi":[]})") != "");
    CHECK(error_of(R"({"p":2,"n":1,"precision":8,"rank":1,"phi":[[["1"]]],"extra":1})").find("unknown") !=
          std::string::npos);
    CHECK(error_of(R"({"p":2,"n":1,"precision":8,"rank":1,"phi":[[["1"]]]})") == "");

    std::string bad = "{\n  \"p\": 2,\n  \"n\": 1,\n  \"precision\": 8 oops\n}";
    CHECK(error_of(bad).find("line 4") != std::string::npos);
    std::string nonprime = "{\n  \"n\": 1,\n  \"p\": 9,\n  \"precision\": 8,\n  \"rank\": 1,\n  \"phi\": [[[\"1\"]]]\n}";
    CHECK(error_of(nonprime).find("line 3") != std::string::npos);
}

TEST_CASE("result emitters use decimal strings") {
    Crystal M = parse_crystal(kUpper).crystal;
    CHECK(to_json(hodge_slopes(M))["hodge"] == Json::array({"0", "3"}));
    CHECK(to_json(Rational(3, 2)) == "3/2");
    Json n = to_json(isom_number(M));
    CHECK(n.dump() == R"({"n":"2","provenance":"main-theorem"})");
    Json h = to_json(hom_s(M, M, 1));
    CHECK(h["order"].is_string());
    Json g = to_json(gamma1_permutation({0, 3}, {1, 0}));
    CHECK(g["gamma1"] == "1");
    CHECK(g["I_minus"] == Json::array({Json::array({"2", "1"})}));
}
