#include "hp_oracle.hpp"

#include <algorithm>
#include <functional>

namespace acrl::testing {

namespace {

bool in_candidate(const CandidateCause& cand, int var) {
  for (const auto& e : cand.conjuncts)
    if (e.var == var) return true;
  return false;
}

bool oracle_ac1(const CausalModel& model, const Context& context,
                const CandidateCause& cand, const Formula& phi) {
  // Build "X = x and phi" and ask satisfies() with no interventions.
  Formula conj = Formula::event(cand.conjuncts[0]);
  for (size_t c = 1; c < cand.conjuncts.size(); ++c)
    conj = Formula::conjunction(std::move(conj), Formula::event(cand.conjuncts[c]));
  conj = Formula::conjunction(std::move(conj), phi);
  return model.satisfies(context, CausalFormula{{}, std::move(conj)});
}

// All assignments over `vars` by recursion; calls fn(values) until it returns
// true, and reports whether any call did.
bool for_some_setting(const CausalModel& model, const std::vector<int>& vars, size_t k,
                      std::vector<int>& values,
                      const std::function<bool(const std::vector<int>&)>& fn) {
  if (k == vars.size()) return fn(values);
  for (int v : model.variables()[vars[k]].range) {
    values[k] = v;
    if (for_some_setting(model, vars, k + 1, values, fn)) return true;
  }
  return false;
}

// All subsets of `pool` by recursion; calls fn(subset) for each and reports
// whether every call returned true.
bool for_all_subsets(const std::vector<int>& pool, size_t k, std::vector<int>& subset,
                     const std::function<bool(const std::vector<int>&)>& fn) {
  if (k == pool.size()) return fn(subset);
  if (!for_all_subsets(pool, k + 1, subset, fn)) return false;  // without pool[k]
  subset.push_back(pool[k]);
  const bool with = for_all_subsets(pool, k + 1, subset, fn);
  subset.pop_back();
  return with;
}

bool oracle_ac2_exists(const CausalModel& model, const Context& context,
                       const CandidateCause& cand, const Formula& phi) {
  const Valuation actual = model.evaluate(context);
  const Formula not_phi = Formula::negation(phi);

  std::vector<int> free_vars;  // endogenous variables outside the candidate
  for (int var : model.endogenous())
    if (!in_candidate(cand, var)) free_vars.push_back(var);

  std::vector<int> cand_vars;
  for (const auto& e : cand.conjuncts) cand_vars.push_back(e.var);

  // Each subset of free_vars plays W; the rest joins the candidate in Z.
  std::vector<int> w_subset;
  bool found = false;
  std::function<void(size_t)> try_partitions = [&](size_t k) {
    if (found) return;
    if (k == free_vars.size()) {
      std::vector<int> z_free;
      for (int var : free_vars)
        if (std::find(w_subset.begin(), w_subset.end(), var) == w_subset.end())
          z_free.push_back(var);

      std::vector<int> w_values(w_subset.size());
      for_some_setting(model, w_subset, 0, w_values, [&](const std::vector<int>& wv) {
        std::vector<int> x_values(cand_vars.size());
        return for_some_setting(model, cand_vars, 0, x_values, [&](const std::vector<int>& xv) {
          bool differs = false;
          for (size_t c = 0; c < cand_vars.size(); ++c)
            differs |= (xv[c] != cand.conjuncts[c].value);
          if (!differs) return false;

          CausalFormula flip;
          for (size_t c = 0; c < cand_vars.size(); ++c)
            flip.interventions.push_back({cand_vars[c], xv[c]});
          for (size_t k2 = 0; k2 < w_subset.size(); ++k2)
            flip.interventions.push_back({w_subset[k2], wv[k2]});
          flip.body = not_phi;
          if (!model.satisfies(context, flip)) return false;

          std::vector<int> z_prime;
          const bool ac2b = for_all_subsets(z_free, 0, z_prime, [&](const std::vector<int>& zp) {
            CausalFormula restore;
            for (const auto& e : cand.conjuncts)
              restore.interventions.push_back({e.var, e.value});
            for (size_t k2 = 0; k2 < w_subset.size(); ++k2)
              restore.interventions.push_back({w_subset[k2], wv[k2]});
            for (int var : zp) restore.interventions.push_back({var, actual[var]});
            restore.body = phi;
            return model.satisfies(context, restore);
          });
          if (ac2b) {
            found = true;
            return true;
          }
          return false;
        });
      });
      return;
    }
    try_partitions(k + 1);  // free_vars[k] joins Z
    if (found) return;
    w_subset.push_back(free_vars[k]);
    try_partitions(k + 1);  // free_vars[k] joins W
    w_subset.pop_back();
  };
  try_partitions(0);
  return found;
}

}  // namespace

bool oracle_is_actual_cause(const CausalModel& model, const Context& context,
                            const CandidateCause& candidate, const Formula& phi) {
  if (!oracle_ac1(model, context, candidate, phi)) return false;
  if (!oracle_ac2_exists(model, context, candidate, phi)) return false;

  // AC3: no strict non-empty sub-conjunction may satisfy AC1 and AC2.
  const size_t n = candidate.conjuncts.size();
  std::vector<size_t> picks;
  std::function<bool(size_t)> any_subset_holds = [&](size_t k) -> bool {
    if (k == n) {
      if (picks.empty() || picks.size() == n) return false;
      CandidateCause sub;
      for (size_t i : picks) sub.conjuncts.push_back(candidate.conjuncts[i]);
      return oracle_ac1(model, context, sub, phi) &&
             oracle_ac2_exists(model, context, sub, phi);
    }
    if (any_subset_holds(k + 1)) return true;
    picks.push_back(k);
    const bool with = any_subset_holds(k + 1);
    picks.pop_back();
    return with;
  };
  if (any_subset_holds(0)) return false;
  return true;
}

}  // namespace acrl::testing
