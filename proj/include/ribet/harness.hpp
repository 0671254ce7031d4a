#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "ribet/cm_endomorphism.hpp"
#include "ribet/divisor.hpp"
#include "ribet/ribet_section.hpp"

namespace ribet {

enum class RunMode { suite, fiber, scan, witness, pairing_table };
enum class OutputFormat { json, csv };

struct ExperimentConfig {
  std::string field = "13";
  std::string curve = "1,0";  // "a4,a6", integers embedded in the prime field
  CMKind cm = CMKind::gaussian;
  std::string endo = "i";
  RunMode mode = RunMode::suite;
  std::uint64_t n = 5;
  std::uint64_t n_max = 50;
  OutputFormat out = OutputFormat::json;
  unsigned workers = 1;
  std::uint64_t max_size = FieldSpec::kDefaultMaxSize;
  /// Replace the field by the smallest extension of its prime field meeting
  /// the mode's torsion requirement.
  bool auto_extend = false;
};

RunMode parse_mode(const std::string& s);
CMKind parse_cm_kind(const std::string& s);
OutputFormat parse_output(const std::string& s);
std::string to_string(RunMode m);

struct RunResult {
  int exit_code = 0;
  nlohmann::json report;
};

/// Dispatches on cfg.mode.  Exit 0 when every assertion holds, 1 on an
/// assertion failure (report["error"] names the first failing fiber), 2 on a
/// configuration error.
RunResult run(const ExperimentConfig& cfg);

/// report as JSON text, or one CSV row per fiber.
std::string render(const nlohmann::json& report, OutputFormat fmt);

/// The report without its timings block.
nlohmann::json comparable_section(const nlohmann::json& report);

enum class TorsionRequirement { point_of_order_n, full_n_torsion };

/// Smallest m >= 1 such that y^2 = x^3 + a4 x + a6 over F_{p^m} meets the
/// requirement (and, if `cm` is set, F_{p^m} holds the CM root).
/// Throws DeskScaleExceeded once p^m passes max_size.
std::shared_ptr<const FieldSpec> auto_extend_field(std::uint64_t p, std::int64_t a4, std::int64_t a6,
                                                   TorsionRequirement req, std::uint64_t n,
                                                   std::optional<CMKind> cm = std::nullopt,
                                                   std::uint64_t max_size = FieldSpec::kDefaultMaxSize);

/// p^1, p^2, ... for each prime while p^m <= max_size, with default moduli.
std::vector<std::shared_ptr<const FieldSpec>> field_ladder(const std::vector<std::uint64_t>& primes,
                                                           std::uint64_t max_size = FieldSpec::kDefaultMaxSize);

/// lifting_property_scan on y^2 = x^3 + x with a = iota over every field of
/// the ladder; one report section per field, timings quarantined.
nlohmann::json ladder_report(const std::vector<std::shared_ptr<const FieldSpec>>& ladder, std::uint64_t n_max,
                             unsigned workers);

nlohmann::json field_element_json(const FieldElement& x);
nlohmann::json point_json(const CurvePoint& P);
nlohmann::json fiber_json(const FiberReport& r);
/// {fibers_total, fibers_skipped, fibers_ord_n2, fibers_ord_lt_n2, failures}
nlohmann::json fiber_summary(const std::vector<FiberReport>& fibers);

// Deterministic sampling for the invariant suites.

CurvePoint random_point(const Curve& E, std::mt19937_64& rng, bool allow_infinity = false);

/// A principal divisor with `terms` random affine points of multiplicity in
/// [-max_mult, max_mult] plus one closing point, avoiding O and `avoid`.
Divisor random_principal_divisor(const Curve& E, std::mt19937_64& rng, int terms, int max_mult,
                                 const Divisor* avoid = nullptr);

struct CheckResult {
  std::string name;
  bool passed = true;
  std::uint64_t cases = 0;
  std::string detail;
};

/// Module invariant checks on the configuration's curve, seeded.
std::vector<CheckResult> invariant_suite(const RibetConfig& cfg, std::uint64_t seed = 1);

}  // namespace ribet
