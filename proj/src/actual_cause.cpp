#include "acrl/actual_cause.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace acrl {

namespace {

void validate_candidate(const CausalModel& model, const CandidateCause& candidate) {
  if (candidate.conjuncts.empty())
    throw std::invalid_argument("candidate cause must have at least one conjunct");
  for (size_t a = 0; a < candidate.conjuncts.size(); ++a) {
    const PrimitiveEvent& e = candidate.conjuncts[a];
    if (e.var < 0 || e.var >= static_cast<int>(model.variables().size()))
      throw std::invalid_argument("candidate references unknown variable");
    const Variable& v = model.variables()[e.var];
    if (v.kind != VarKind::Endogenous)
      throw std::invalid_argument("candidate variable '" + v.name + "' is not endogenous");
    if (!v.admits(e.value))
      throw std::invalid_argument("candidate value outside range of '" + v.name + "'");
    for (size_t b = a + 1; b < candidate.conjuncts.size(); ++b)
      if (candidate.conjuncts[b].var == e.var)
        throw std::invalid_argument("candidate repeats variable '" + v.name + "'");
  }
}

bool contains(const std::vector<int>& xs, int x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

// Advances a mixed-radix counter over the ranges of `vars`; false on wrap.
bool next_setting(const CausalModel& model, const std::vector<int>& vars,
                  std::vector<size_t>& odo) {
  for (size_t k = 0; k < vars.size(); ++k) {
    if (++odo[k] < model.variables()[vars[k]].range.size()) return true;
    odo[k] = 0;
  }
  return false;
}

// Advances a k-combination of indices over [0, n); false when exhausted.
bool next_combination(std::vector<size_t>& comb, size_t n) {
  const size_t k = comb.size();
  size_t i = k;
  while (i > 0) {
    --i;
    if (comb[i] + (k - i) < n) {
      ++comb[i];
      for (size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Both counterfactual clauses for one (W, w, x') triple. `actual` is the
// untouched evaluation of (M, u); z values are read from it.
bool check_ac2_pair(const CausalModel& model, const Context& context,
                    const CandidateCause& candidate, const Formula& phi,
                    const Valuation& actual, const std::vector<int>& w_vars,
                    const std::vector<int>& w_values, const std::vector<int>& x_prime,
                    bool* ac2a_passed) {
  // AC2a: [X <- x', W <- w] not-phi
  std::vector<Intervention> flip;
  flip.reserve(candidate.conjuncts.size() + w_vars.size());
  for (size_t c = 0; c < candidate.conjuncts.size(); ++c)
    flip.push_back({candidate.conjuncts[c].var, x_prime[c]});
  for (size_t k = 0; k < w_vars.size(); ++k) flip.push_back({w_vars[k], w_values[k]});
  if (phi.eval(model.intervene(flip).evaluate(context))) return false;
  if (ac2a_passed) *ac2a_passed = true;

  // AC2b: for every subset Z' of Z restored to its actual values,
  // [X <- x, W <- w, Z' <- z'] phi. X is a subset of Z; restoring one of the
  // candidate's own variables coincides with X <- x, so it is skipped.
  std::vector<int> z_free;  // Z minus X
  for (int var : model.endogenous())
    if (!contains(w_vars, var)) {
      bool in_candidate = false;
      for (const auto& e : candidate.conjuncts) in_candidate |= (e.var == var);
      if (!in_candidate) z_free.push_back(var);
    }
  std::vector<Intervention> restore;
  const size_t fixed = candidate.conjuncts.size() + w_vars.size();
  restore.reserve(fixed + z_free.size());
  for (const auto& e : candidate.conjuncts) restore.push_back({e.var, e.value});
  for (size_t k = 0; k < w_vars.size(); ++k) restore.push_back({w_vars[k], w_values[k]});

  const size_t subsets = size_t{1} << z_free.size();
  for (size_t mask = 0; mask < subsets; ++mask) {
    restore.resize(fixed);
    for (size_t k = 0; k < z_free.size(); ++k)
      if (mask & (size_t{1} << k)) restore.push_back({z_free[k], actual[z_free[k]]});
    if (!phi.eval(model.intervene(restore).evaluate(context))) return false;
  }
  return true;
}

std::optional<Witness> find_witness_impl(const CausalModel& model, const Context& context,
                                         const CandidateCause& candidate, const Formula& phi,
                                         bool* ac2a_passed) {
  const Valuation actual = model.evaluate(context);

  std::vector<int> others;  // endogenous variables eligible for W
  for (int var : model.endogenous()) {
    bool in_candidate = false;
    for (const auto& e : candidate.conjuncts) in_candidate |= (e.var == var);
    if (!in_candidate) others.push_back(var);
  }
  std::vector<int> cand_vars;
  for (const auto& e : candidate.conjuncts) cand_vars.push_back(e.var);

  // Subsets of `others` by size ascending, then lexicographic in declaration
  // order, via the classic combination walk.
  for (size_t wsize = 0; wsize <= others.size(); ++wsize) {
    std::vector<size_t> comb(wsize);
    for (size_t k = 0; k < wsize; ++k) comb[k] = k;
    while (true) {
      std::vector<int> w_vars(wsize);
      for (size_t k = 0; k < wsize; ++k) w_vars[k] = others[comb[k]];

      std::vector<size_t> w_odo(wsize, 0);
      do {
        std::vector<int> w_values(wsize);
        for (size_t k = 0; k < wsize; ++k)
          w_values[k] = model.variables()[w_vars[k]].range[w_odo[k]];

        std::vector<size_t> x_odo(cand_vars.size(), 0);
        do {
          std::vector<int> x_prime(cand_vars.size());
          bool differs = false;
          for (size_t c = 0; c < cand_vars.size(); ++c) {
            x_prime[c] = model.variables()[cand_vars[c]].range[x_odo[c]];
            differs |= (x_prime[c] != candidate.conjuncts[c].value);
          }
          if (!differs) continue;
          if (check_ac2_pair(model, context, candidate, phi, actual, w_vars, w_values,
                             x_prime, ac2a_passed)) {
            Witness w;
            for (size_t k = 0; k < wsize; ++k) w.contingency.push_back({w_vars[k], w_values[k]});
            w.alternative = std::move(x_prime);
            return w;
          }
        } while (next_setting(model, cand_vars, x_odo));
      } while (next_setting(model, w_vars, w_odo));

      if (!next_combination(comb, others.size())) break;
    }
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(AcClause c) {
  switch (c) {
    case AcClause::AC1: return "AC1";
    case AcClause::AC2a: return "AC2a";
    case AcClause::AC2b: return "AC2b";
    case AcClause::AC3: return "AC3";
  }
  return "?";
}

bool check_ac1(const CausalModel& model, const Context& context,
               const CandidateCause& candidate, const Formula& phi) {
  validate_candidate(model, candidate);
  const Valuation actual = model.evaluate(context);
  for (const auto& e : candidate.conjuncts)
    if (!event_holds(actual, e)) return false;
  return phi.eval(actual);
}

std::optional<Witness> find_witness(const CausalModel& model, const Context& context,
                                    const CandidateCause& candidate, const Formula& phi) {
  validate_candidate(model, candidate);
  return find_witness_impl(model, context, candidate, phi, nullptr);
}

CauseVerdict is_actual_cause(const CausalModel& model, const Context& context,
                             const CandidateCause& candidate, const Formula& phi) {
  validate_candidate(model, candidate);
  CauseVerdict verdict;
  if (!check_ac1(model, context, candidate, phi)) {
    verdict.failed_clause = AcClause::AC1;
    return verdict;
  }
  bool ac2a = false;
  auto witness = find_witness_impl(model, context, candidate, phi, &ac2a);
  if (!witness) {
    verdict.failed_clause = ac2a ? AcClause::AC2b : AcClause::AC2a;
    return verdict;
  }
  // AC3: no strict non-empty sub-conjunction may itself satisfy AC1 and AC2.
  const size_t n = candidate.conjuncts.size();
  if (n > 1) {
    for (size_t mask = 1; mask + 1 < (size_t{1} << n); ++mask) {
      CandidateCause sub;
      for (size_t c = 0; c < n; ++c)
        if (mask & (size_t{1} << c)) sub.conjuncts.push_back(candidate.conjuncts[c]);
      if (!check_ac1(model, context, sub, phi)) continue;
      if (find_witness_impl(model, context, sub, phi, nullptr)) {
        verdict.failed_clause = AcClause::AC3;
        return verdict;
      }
    }
  }
  verdict.holds = true;
  verdict.witness = std::move(witness);
  return verdict;
}

std::vector<EnumeratedCause> enumerate_actual_causes(const CausalModel& model,
                                                     const Context& context,
                                                     const Formula& phi, int max_conjuncts) {
  if (max_conjuncts < 1) throw std::invalid_argument("max_conjuncts must be positive");
  std::vector<EnumeratedCause> result;
  const Valuation actual = model.evaluate(context);
  if (!phi.eval(actual)) return result;

  std::vector<int> phi_vars;
  phi.collect_vars(phi_vars);
  std::vector<int> eligible;
  for (int var : model.endogenous())
    if (!contains(phi_vars, var)) eligible.push_back(var);

  // Variable sets already known to satisfy AC1 and AC2; any superset fails AC3.
  std::vector<std::vector<int>> passing_sets;

  const size_t limit = std::min<size_t>(static_cast<size_t>(max_conjuncts), eligible.size());
  for (size_t size = 1; size <= limit; ++size) {
    std::vector<size_t> comb(size);
    for (size_t k = 0; k < size; ++k) comb[k] = k;
    while (true) {
      std::vector<int> vars(size);
      for (size_t k = 0; k < size; ++k) vars[k] = eligible[comb[k]];

      bool minimal = true;
      for (const auto& s : passing_sets) {
        bool subset = true;
        for (int v : s) subset &= contains(vars, v);
        if (subset) {
          minimal = false;
          break;
        }
      }
      if (minimal) {
        CandidateCause cand;
        for (int v : vars) cand.conjuncts.push_back({v, actual[v]});
        if (check_ac1(model, context, cand, phi)) {
          if (auto w = find_witness_impl(model, context, cand, phi, nullptr)) {
            passing_sets.push_back(vars);
            result.push_back({std::move(cand), std::move(*w)});
          }
        }
      }

      if (!next_combination(comb, eligible.size())) break;
    }
  }
  return result;
}

std::vector<int> witness_z_side(const CausalModel& model, const CandidateCause& candidate,
                                const Witness& witness) {
  std::vector<int> z;
  for (int var : model.endogenous()) {
    bool in_w = false;
    for (const auto& iv : witness.contingency) in_w |= (iv.var == var);
    if (!in_w) z.push_back(var);
  }
  (void)candidate;
  return z;
}

}  // namespace acrl
