#pragma once

#include "acrl/actual_cause.hpp"
#include "acrl/scm.hpp"

namespace acrl::testing {

// Unoptimized transcription of the actual-cause definition, kept deliberately
// separate from the library's search (recursive enumeration instead of
// combination/odometer walks) so the two can cross-check each other.
bool oracle_is_actual_cause(const CausalModel& model, const Context& context,
                            const CandidateCause& candidate, const Formula& phi);

}  // namespace acrl::testing
