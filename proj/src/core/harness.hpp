#pragma once

// Experiment plans: schedules of height bounds, counts, reference curves,
// leading-constant fits. Output is deterministic for a given plan.

#include "constants.hpp"
#include "sieve.hpp"
#include "torsor.hpp"

#include <optional>
#include <string>
#include <vector>

namespace toric {

enum class ExperimentKind { Manin, Equidist, FlatComplement, GeomSieve, Subvariety, PrimeSection };

struct ResidueClass {
  u64 l = 1;
  std::vector<u64> xi;
};

struct ExperimentPlan {
  std::string fan_path; // resolved against the plan file's directory
  ExperimentKind kind = ExperimentKind::Manin;
  std::vector<u64> schedule;
  unsigned threads = 1;
  std::string output; // path prefix; empty means no files are written
  // manin / equidist
  std::optional<std::size_t> cone; // per-cone count with box lambda; whole A(B) otherwise
  std::vector<Rat> lambda;
  std::vector<ResidueClass> classes;
  bool fit = true;
  u64 p_max = 100000;
  // flat_complement
  double A = 1;
  FlatMode flat_mode = FlatMode::AllCones;
  // geom_sieve / subvariety / prime_section
  std::string f, g;
  std::vector<u64> N;
  std::vector<std::string> phi;
  std::string s;
  double theta = 1;
  bool coprime_only = false;
};

struct ExperimentRow {
  u64 B = 0;
  std::string param;
  u64 count = 0;
  double reference = 0;
  double ratio = 0; // NaN when the reference vanishes
};

struct FitReport {
  double c1 = 0, c2 = 0;
  double predicted = 0;
  double deviation = 0; // |c1 - predicted| / predicted
  double residual = 0;  // RMS of count/B - model
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::optional<FitReport> fit;
  std::string csv;
  std::string summary_json;
};

ExperimentPlan parse_plan(const std::string& text, const std::string& base_dir = ".");
ExperimentResult run_experiment(const ToricFan& fan, const ExperimentPlan& plan);
// Loads the fan, runs, and writes <output>.csv / <output>.json when requested.
ExperimentResult run_plan_file(const std::string& path);
ExperimentResult run_plan_text(const std::string& text, const std::string& base_dir);

// Least squares of count/B against (log B)^(r-1), (log B)^(r-2).
FitReport fit_leading_constant(const std::vector<std::pair<u64, u64>>& counts, std::size_t r, double predicted);

// Per-class leading constant kappa_(l) * prod lambda * alpha, or 0 when the
// class contains no point of X_0(Z/l).
double equidist_constant(const ToricFan& fan, const ResidueClass& cls, const std::vector<Rat>& lambda, u64 p_max);
bool class_is_admissible(const ToricFan& fan, const ResidueClass& cls);

// Fixed-format decimal used in every experiment output.
std::string format_double(double v);

} // namespace toric
