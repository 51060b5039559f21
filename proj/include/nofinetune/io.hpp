#pragma once

#include <string>

#include <json.hpp>

#include "nofinetune/dag.hpp"
#include "nofinetune/distribution.hpp"
#include "nofinetune/faithfulness.hpp"
#include "nofinetune/polytope.hpp"
#include "nofinetune/scenario.hpp"
#include "nofinetune/theorem_verifier.hpp"

namespace nft::io {

using Json = nlohmann::ordered_json;

// Readers throw ParseError on malformed documents; semantic validation errors
// from the library (cycles, bad distributions, ...) propagate unchanged.

Json read_file(const std::string& path);
void write_file(const std::string& path, const Json& j);

/// "num/den" for exact values; a JSON number in float mode.
Json rational_to_json(const Rational& q, Mode mode = Mode::exact);
Rational rational_from_json(const Json& j);

Json to_json(const Dag& g);
Dag dag_from_json(const Json& j);

Json to_json(const JointDistribution& p);
JointDistribution distribution_from_json(const Json& j);

Json to_json(const MeasurementScenario& s);
MeasurementScenario scenario_from_json(const Json& j);

Json to_json(const Phenomenon& p);
Phenomenon phenomenon_from_json(const Json& j);

/// {"graph": ..., "distribution": ...}; latents are the graph's latent nodes.
Json to_json(const CausalModel& m);
CausalModel model_from_json(const Json& j);

Json to_json(const Inequality& i);
Inequality inequality_from_json(const Json& j);

Json to_json(const CIStatement& ci);
CIStatement ci_from_json(const Json& j);
Json to_json(const std::vector<CIStatement>& cis);

Json to_json(const FaithfulnessReport& r);
Json to_json(const NoDisturbanceReport& r);
Json to_json(const MembershipResult& r, const VertexSet& v, Mode mode);
Json to_json(const InequalityValue& v, Mode mode);

Json to_json(const VerifierConfig& c);
/// Missing keys keep their defaults.
VerifierConfig verifier_config_from_json(const Json& j);
Json to_json(const VerificationReport& r);
/// Human-readable summary following the step structure.
std::string report_table(const VerificationReport& r);

}  // namespace nft::io
