#pragma once

// Operational Monte Carlo interpreter: an independent statistical oracle
// for sanity-checking verified bounds. Sampling draws 64-bit dyadic
// rationals so state updates stay in exact arithmetic; summary statistics
// are reported as doubles.

#include <cstdint>

#include "pwv/ast.hpp"
#include "pwv/semantics.hpp"

namespace pwv {

struct RunOutcome {
  enum class Kind { Terminated, ObserveViolated, BudgetExhausted };
  Kind kind = Kind::Terminated;
  State final_state;  // Terminated: the final state
};

// Executes C from s0, deterministic in `seed`; every statement execution
// costs one step against `max_steps`.
RunOutcome simulate(const ProgramPtr& C, const State& s0, std::uint64_t seed,
                    std::uint64_t max_steps = 1000000);

struct WpEstimate {
  double mean = 0.0;            // average of f over runs; violated runs count 0
  double std_error = 0.0;
  double violated_fraction = 0.0;
  bool partial = false;         // some run hit the step cap: unsound to compare
  std::size_t samples = 0;
};

// Runs `samples` independent simulations (run i is seeded with seed + i)
// and averages eval_expr(f, final state); f must be quantifier-free.
WpEstimate estimate_wp(const ProgramPtr& C, const ExprPtr& f, const State& s0,
                       std::size_t samples, std::uint64_t seed,
                       std::uint64_t max_steps = 1000000);

}  // namespace pwv
