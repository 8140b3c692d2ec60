#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "fcr/hom.hpp"
#include "fcr/invariants.hpp"
#include "fcr/level.hpp"

namespace fcr {

using Json = nlohmann::ordered_json;

// A parsed crystal document; permutation documents keep their (e, pi) data.
struct CrystalDocument {
    Crystal crystal;
    std::optional<PermInstance> permutation;  // pi 0-based here, 1-based in JSON
};

// Throws ArgumentError naming the line and field at fault.
CrystalDocument parse_crystal(const std::string& text);
CrystalDocument parse_crystal_json(const Json& doc);
// Canonical form: numbers as decimal strings, entries reduced mod p^N.
Json serialize_crystal(const CrystalDocument& doc);

Json to_json(const Int& v);
Json to_json(const Zq& a);
Json to_json(const PMatrix& m);
Json to_json(const Rational& r);
Json to_json(const std::vector<Slope>& s);
Json to_json(const HodgeData& h);
Json to_json(const HomGroup& H);
Json to_json(const EndoNumberHat& e);
Json to_json(const ExactSequenceReport& r);
Json to_json(const Gamma1Data& g);
Json to_json(const IsomNumber& n);
Json to_json(const LevelModule& L);
Json to_json(const InvariantReport& r);

}  // namespace fcr
