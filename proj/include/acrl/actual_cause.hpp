#pragma once

#include <optional>
#include <vector>

#include "acrl/scm.hpp"

namespace acrl {

/// Conjunction of primitive events over distinct endogenous variables.
struct CandidateCause {
  std::vector<PrimitiveEvent> conjuncts;
};

/// Certificate for the counterfactual clauses: the contingency W <- w under
/// which flipping the candidate to `alternative` falsifies the effect, while
/// restoring the candidate keeps the effect over every sub-restoration of Z.
struct Witness {
  std::vector<Intervention> contingency;  // (W, w)
  std::vector<int> alternative;           // x', aligned with the candidate's conjuncts
};

enum class AcClause { AC1, AC2a, AC2b, AC3 };
const char* to_string(AcClause c);

struct CauseVerdict {
  bool holds = false;
  std::optional<Witness> witness;        // present iff holds
  std::optional<AcClause> failed_clause; // present iff !holds
};

/// AC1: the candidate conjunction and the effect both hold with no
/// interventions.
bool check_ac1(const CausalModel& model, const Context& context,
               const CandidateCause& candidate, const Formula& phi);

/// Exhaustive search for a witness satisfying both counterfactual clauses.
/// Partitions are scanned by |W| ascending, then declaration order; the first
/// witness found is returned. Assumes AC1 already holds.
std::optional<Witness> find_witness(const CausalModel& model, const Context& context,
                                    const CandidateCause& candidate, const Formula& phi);

/// Full Definition-1 check including minimality over strict sub-conjunctions.
CauseVerdict is_actual_cause(const CausalModel& model, const Context& context,
                             const CandidateCause& candidate, const Formula& phi);

struct EnumeratedCause {
  CandidateCause cause;
  Witness witness;
};

/// All actual causes of phi with values fixed to their actual ones, up to
/// max_conjuncts conjuncts, in deterministic order (size ascending, then
/// variable declaration order). Returns empty when phi does not hold.
/// Candidates sharing a variable with phi are skipped: an event is trivially
/// a cause of any formula that mentions it, which says nothing useful.
std::vector<EnumeratedCause> enumerate_actual_causes(const CausalModel& model,
                                                     const Context& context,
                                                     const Formula& phi, int max_conjuncts);

/// Endogenous variables outside the candidate (the Z side minus W is implied).
std::vector<int> witness_z_side(const CausalModel& model, const CandidateCause& candidate,
                                const Witness& witness);

}  // namespace acrl
