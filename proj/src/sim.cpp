#include "pwv/sim.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pwv {

namespace {

Rational draw_unit(std::mt19937_64& rng) {
  // 64-bit dyadic rational in [0, 1).
  Rational denom = Rational(std::uint64_t(1) << 32) * Rational(std::uint64_t(1) << 32);
  return Rational(rng()) / denom;
}

enum class StepResult { Ok, Violated, Budget };

StepResult exec(const ProgramPtr& C, State& s, std::mt19937_64& rng,
                std::uint64_t& steps, std::uint64_t max_steps) {
  if (++steps > max_steps) return StepResult::Budget;
  switch (C->kind) {
    case Program::Kind::Skip:
      return StepResult::Ok;
    case Program::Kind::Diverge:
      return StepResult::Budget;
    case Program::Kind::Assign:
      s[C->var] = eval_term(C->term, s);
      return StepResult::Ok;
    case Program::Kind::Unif:
      s[C->var] = draw_unit(rng);
      return StepResult::Ok;
    case Program::Kind::Observe:
      return eval_guard(C->guard, s) ? StepResult::Ok : StepResult::Violated;
    case Program::Kind::Ite:
      return exec(eval_guard(C->guard, s) ? C->a : C->b, s, rng, steps, max_steps);
    case Program::Kind::PChoice:
      return exec(draw_unit(rng) < C->p ? C->a : C->b, s, rng, steps, max_steps);
    case Program::Kind::Seq: {
      StepResult r = exec(C->a, s, rng, steps, max_steps);
      if (r != StepResult::Ok) return r;
      --steps;  // sequencing itself is free; the children were charged
      return exec(C->b, s, rng, steps, max_steps);
    }
    case Program::Kind::While:
      while (eval_guard(C->guard, s)) {
        StepResult r = exec(C->a, s, rng, steps, max_steps);
        if (r != StepResult::Ok) return r;
        if (++steps > max_steps) return StepResult::Budget;
      }
      return StepResult::Ok;
  }
  throw std::logic_error("unreachable");
}

}  // namespace

RunOutcome simulate(const ProgramPtr& C, const State& s0, std::uint64_t seed,
                    std::uint64_t max_steps) {
  std::mt19937_64 rng(seed);
  State s = s0;
  std::uint64_t steps = 0;
  RunOutcome out;
  switch (exec(C, s, rng, steps, max_steps)) {
    case StepResult::Ok:
      out.kind = RunOutcome::Kind::Terminated;
      break;
    case StepResult::Violated:
      out.kind = RunOutcome::Kind::ObserveViolated;
      break;
    case StepResult::Budget:
      out.kind = RunOutcome::Kind::BudgetExhausted;
      break;
  }
  out.final_state = std::move(s);
  return out;
}

WpEstimate estimate_wp(const ProgramPtr& C, const ExprPtr& f, const State& s0,
                       std::size_t samples, std::uint64_t seed,
                       std::uint64_t max_steps) {
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  if (classify(f) != Classification::QuantifierFree)
    throw std::invalid_argument("estimate_wp needs a quantifier-free expectation");
  Rational sum = 0, sum_sq = 0;
  std::size_t violated = 0;
  WpEstimate est;
  est.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    RunOutcome r = simulate(C, s0, seed + i, max_steps);
    switch (r.kind) {
      case RunOutcome::Kind::Terminated: {
        Rational v = eval_expr(f, r.final_state).lo;
        sum += v;
        sum_sq += v * v;
        break;
      }
      case RunOutcome::Kind::ObserveViolated:
        ++violated;  // contributes 0
        break;
      case RunOutcome::Kind::BudgetExhausted:
        est.partial = true;  // contributes 0 but poisons comparisons
        break;
    }
  }
  Rational n(samples);
  Rational mean = sum / n;
  Rational var = sum_sq / n - mean * mean;
  est.mean = rational_to_double(mean);
  double v = rational_to_double(var);
  est.std_error = std::sqrt(std::max(v, 0.0) / static_cast<double>(samples));
  est.violated_fraction =
      static_cast<double>(violated) / static_cast<double>(samples);
  return est;
}

}  // namespace pwv
