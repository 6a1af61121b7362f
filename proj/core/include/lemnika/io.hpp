#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lemnika/classical1d.hpp"
#include "lemnika/equipartition.hpp"
#include "lemnika/homlift.hpp"
#include "lemnika/mamass.hpp"

namespace lemnika {

// JSON text for every artifact. Output is deterministic: fixed key order,
// shortest round-trip doubles, non-finite values as null. Parsers throw
// Error(Io) on malformed input.

std::string to_json(const PlanarMeasure& mu);
PlanarMeasure measure_from_json(const std::string& text);

std::string to_json(const Partition& p);
std::string to_json(const FactoredPoly& f);
std::string to_json(const AtomizedPolynomial& f);
std::string to_json(const ErrorReport& r);
std::string to_json(const ApproximantPair& pair);
ApproximantPair pair_from_json(const std::string& text);

std::string to_json(const HomogeneousPair& pq);
HomogeneousPair homogeneous_pair_from_json(const std::string& text);

std::string to_json(const SandwichReport& r);
std::string to_json(const LevelSetSolutions& s);
std::string to_json(const MomentReport& r);
/// Columns re_z,im_z,re_w,im_w,weight.
std::string atoms_csv(const DiscreteMAMeasure& mu);

std::string to_json(const FeketeResult& f);
std::string to_json(const LemniscateReport& r);

/// builtin:ball | builtin:bidisk | builtin:ellipsoid:<c> | path to a
/// measure JSON file.
PlanarMeasure load_measure(const std::string& spec);
/// builtin:ball | builtin:bidisk | builtin:ellipsoid:<c>.
CircledSetModel parse_model(const std::string& spec);
/// interval[:a,b] | disk[:r].
CompactSet1D parse_set(const std::string& spec, int n_grid = 0);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string sha256_hex(const std::string& bytes);

}  // namespace lemnika
