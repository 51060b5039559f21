#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nofinetune/dag.hpp"

namespace nft {

/// Unordered pairs of the observed nodes A, B, X, Y in canonical order.
inline constexpr std::array<std::array<const char*, 2>, 6> kPairs{
    {{"A", "B"}, {"A", "X"}, {"A", "Y"}, {"B", "X"}, {"B", "Y"}, {"X", "Y"}}};

/// Latent common causes: six pairs, four triples, one quadruple.
inline constexpr std::size_t kLatentSlots = 11;
extern const std::array<std::vector<std::string>, kLatentSlots> kLatentChildren;

enum class PairLink : std::uint8_t { none, forward, backward };

struct CandidateSpace {
  bool pair_latents = true;
  bool higher_latents = true;
  /// No X-Y edge and no latent over both X and Y (independent settings).
  bool bell_only = false;
};

/// Position in the raw parameter space: edge_code is base 3 over kPairs
/// (first pair most significant), latent_code a bit mask over kLatentChildren.
struct Candidate {
  std::uint32_t edge_code = 0;
  std::uint32_t latent_code = 0;

  std::uint64_t index() const { return std::uint64_t{edge_code} << kLatentSlots | latent_code; }
  PairLink link(std::size_t pair) const;
};

inline constexpr std::uint32_t kEdgePatterns = 729;
inline constexpr std::uint32_t kLatentPatterns = 1u << kLatentSlots;

bool in_space(const CandidateSpace& space, const Candidate& c);
bool edge_pattern_acyclic(std::uint32_t edge_code);

/// Nodes A, B, X, Y, then one latent "L_<members>" per activated subset.
Dag candidate_dag(const Candidate& c);

/// Streams the acyclic candidates of the space in canonical order.
void enumerate_candidates(const CandidateSpace& space,
                          const std::function<void(const Candidate&, const Dag&)>& visit);
std::vector<Candidate> candidate_list(const CandidateSpace& space);

/// Both required d-separations hold.
bool filter_by_nd(const Dag& g);

enum class ExclusionStep { step1, step2a, step2b, step3, step4, unattributed };
std::string to_string(ExclusionStep s);

/// First matching step in order 1, 2a, 2b, 3, 4 for an excluded candidate.
ExclusionStep attribute_exclusion(const Dag& g);

enum class ProofClass { step2c, step3, step5_i, step5_ii, step5_iii, other };
std::string to_string(ProofClass c);

/// Requires filter_by_nd(g).
ProofClass classify_survivor(const Dag& g);

struct SurvivorRecord {
  Candidate candidate;
  Dag dag;
  ProofClass proof_class = ProofClass::other;
  std::size_t numeric_trials = 0;
  std::size_t inside = 0;
  std::size_t nd_failures = 0;
  bool all_factorisable = false;
};

struct NumericConfig {
  std::size_t trials = 50;
  std::uint64_t seed = 1;
  std::size_t latent_card = 4;
  std::uint32_t grid = 8;
};

/// Random compatible joints on g (binary outcomes, settings x0/x1 and y0/y1),
/// each tested for no-disturbance and pair-vertex factorisability.
SurvivorRecord verify_survivor_numeric(const Dag& g, const NumericConfig& config);

struct VerifierConfig {
  CandidateSpace space;
  NumericConfig numeric;
  /// false skips the numeric cross-check.
  bool numeric_enabled = true;
  std::size_t jobs = 1;
};

struct VerificationReport {
  VerifierConfig config;
  std::uint64_t raw_combinations = 0;
  std::uint64_t acyclic_edge_patterns = 0;
  std::uint64_t total_candidates = 0;
  std::map<ExclusionStep, std::uint64_t> excluded_per_step;
  /// Excluded candidates failing (A _||_ Y | X), (B _||_ X | Y), or both.
  std::uint64_t fails_a_y = 0;
  std::uint64_t fails_b_x = 0;
  std::uint64_t fails_both = 0;
  std::vector<SurvivorRecord> survivors;
  std::map<ProofClass, std::uint64_t> survivors_per_class;
  bool theorem_holds = false;

  std::uint64_t excluded_total() const;
};

VerificationReport verify_theorem1(const VerifierConfig& config);

/// splitmix64 finalizer, used to derive per-candidate seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace nft
