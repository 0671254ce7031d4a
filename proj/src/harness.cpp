#include "ribet/harness.hpp"

#include <chrono>
#include <deque>
#include <numeric>
#include <sstream>

#include "ribet/errors.hpp"
#include "ribet/function_eval.hpp"
#include "ribet/numtheory.hpp"

namespace ribet {

using nlohmann::json;

RunMode parse_mode(const std::string& s) {
  if (s == "suite") return RunMode::suite;
  if (s == "fiber") return RunMode::fiber;
  if (s == "scan") return RunMode::scan;
  if (s == "witness") return RunMode::witness;
  if (s == "pairing-table") return RunMode::pairing_table;
  throw ConfigError("unknown mode '" + s + "'");
}

CMKind parse_cm_kind(const std::string& s) {
  if (s == "i") return CMKind::gaussian;
  if (s == "zeta") return CMKind::eisenstein;
  throw ConfigError("unknown CM kind '" + s + "' (expected i or zeta)");
}

OutputFormat parse_output(const std::string& s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  throw ConfigError("unknown output format '" + s + "'");
}

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::suite: return "suite";
    case RunMode::fiber: return "fiber";
    case RunMode::scan: return "scan";
    case RunMode::witness: return "witness";
    case RunMode::pairing_table: return "pairing-table";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Serialization

json field_element_json(const FieldElement& x) { return x.coeffs(); }

json point_json(const CurvePoint& P) {
  if (P.is_infinity()) return nullptr;
  return {{"x", field_element_json(P.x())}, {"y", field_element_json(P.y())}};
}

json fiber_json(const FiberReport& r) {
  json j = {
      {"field", r.field},
      {"q", point_json(r.q)},
      {"n", r.n},
      {"degree_condition", r.degree_condition},
      {"status", to_string(r.status)},
      {"message", r.message},
  };
  if (r.status == FiberReport::Status::skipped) return j;
  j["projection"] = point_json(r.projection);
  j["lambda"] = r.lambda ? field_element_json(*r.lambda) : json(nullptr);
  j["ord_lambda"] = r.ord_lambda;
  j["ord_beta_j"] = r.ord_beta_j;
  if (r.pairing_value) j["pairing_value"] = field_element_json(*r.pairing_value);
  if (r.sigma) j["sigma"] = *r.sigma;
  return j;
}

json fiber_summary(const std::vector<FiberReport>& fibers) {
  std::uint64_t skipped = 0, n2 = 0, lt = 0, failures = 0;
  for (const auto& r : fibers) {
    switch (r.status) {
      case FiberReport::Status::skipped: ++skipped; break;
      case FiberReport::Status::failed: ++failures; break;
      case FiberReport::Status::passed: (r.ord_beta_j == r.n * r.n ? n2 : lt)++; break;
    }
  }
  return {{"fibers_total", fibers.size()},
          {"fibers_skipped", skipped},
          {"fibers_ord_n2", n2},
          {"fibers_ord_lt_n2", lt},
          {"failures", failures}};
}

json comparable_section(const json& report) {
  json out = report;
  out.erase("timings");
  return out;
}

namespace {

std::string csv_cell(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.is_null() ? "" : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void collect_fibers(const json& report, std::vector<const json*>& out) {
  if (report.contains("fibers"))
    for (const auto& f : report["fibers"]) out.push_back(&f);
  if (report.contains("fields"))
    for (const auto& sec : report["fields"]) collect_fibers(sec, out);
}

}  // namespace

std::string render(const json& report, OutputFormat fmt) {
  if (fmt == OutputFormat::json) return report.dump(2) + "\n";
  static const std::vector<std::string> cols = {"field",     "q",         "n",           "degree_condition",
                                                "status",    "message",   "projection",  "lambda",
                                                "ord_lambda", "ord_beta_j", "pairing_value", "sigma"};
  std::ostringstream os;
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  std::vector<const json*> fibers;
  collect_fibers(report, fibers);
  for (const auto* f : fibers) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      os << (i ? "," : "");
      if (f->contains(cols[i])) os << csv_cell((*f)[cols[i]]);
    }
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Fields

std::shared_ptr<const FieldSpec> auto_extend_field(std::uint64_t p, std::int64_t a4, std::int64_t a6,
                                                   TorsionRequirement req, std::uint64_t n, std::optional<CMKind> cm,
                                                   std::uint64_t max_size) {
  if (n == 0) throw ConfigError("n must be positive");
  auto base = FieldSpec::create(p, 1, {}, max_size);
  auto Ep = Curve::create(base, a4, a6);
  // #E(F_{p^m}) = p^m + 1 - t_m with t_m = t_1 t_{m-1} - p t_{m-2}, t_0 = 2.
  const auto P = static_cast<std::int64_t>(p);
  const std::int64_t t1 = P + 1 - static_cast<std::int64_t>(Ep->group_order());
  std::int64_t t_prev = 2, t = t1;
  std::uint64_t q = p;
  for (unsigned m = 1; q <= max_size; ++m) {
    const auto N = static_cast<std::uint64_t>(static_cast<std::int64_t>(q) + 1 - t);
    bool plausible = true;
    if (cm == CMKind::gaussian) plausible = q % 4 == 1;
    if (cm == CMKind::eisenstein) plausible = plausible && q % 3 == 1;
    if (req == TorsionRequirement::point_of_order_n)
      plausible = plausible && N % n == 0;
    else
      plausible = plausible && N % (n * n) == 0 && (q - 1) % n == 0;
    if (plausible) {
      auto F = m == 1 ? base : FieldSpec::create(p, m, {}, max_size);
      auto E = Curve::create(F, a4, a6);
      const bool met = req == TorsionRequirement::point_of_order_n ? !E->find_points_of_order(n).empty()
                                                                   : E->has_full_torsion(n);
      if (met) return F;
    }
    const auto t_next = t1 * t - P * t_prev;
    t_prev = t;
    t = t_next;
    if (q > max_size / p) break;
    q *= p;
  }
  throw DeskScaleExceeded("no extension of F_" + std::to_string(p) + " up to size " + std::to_string(max_size) +
                          " meets the requirement for n = " + std::to_string(n));
}

std::vector<std::shared_ptr<const FieldSpec>> field_ladder(const std::vector<std::uint64_t>& primes,
                                                           std::uint64_t max_size) {
  std::vector<std::shared_ptr<const FieldSpec>> out;
  for (auto p : primes) {
    std::uint64_t q = p;
    for (unsigned m = 1; q <= max_size; ++m) {
      out.push_back(FieldSpec::create(p, m, {}, max_size));
      if (q > max_size / p) break;
      q *= p;
    }
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

json fiber_timings(const std::vector<FiberReport>& fibers) {
  double sum = 0, worst = 0;
  for (const auto& r : fibers) {
    sum += r.elapsed_ms;
    worst = std::max(worst, r.elapsed_ms);
  }
  return {{"fiber_ms_sum", sum}, {"fiber_ms_max", worst}};
}

}  // namespace

json ladder_report(const std::vector<std::shared_ptr<const FieldSpec>>& ladder, std::uint64_t n_max,
                   unsigned workers) {
  const auto start = Clock::now();
  json sections = json::array();
  json timing_sections = json::array();
  std::vector<FiberReport> all;
  for (const auto& F : ladder) {
    const auto t0 = Clock::now();
    auto E = Curve::create(F, 1, 0);
    auto cm = CMStructure::create(E, CMKind::gaussian);
    auto cfg = RibetConfig::create(cm, cm->iota_endo());
    auto fibers = lifting_property_scan(cfg, n_max, workers);
    json rows = json::array();
    for (const auto& r : fibers) rows.push_back(fiber_json(r));
    sections.push_back({{"field", F->literal()},
                        {"group_order", E->group_order()},
                        {"fibers", std::move(rows)},
                        {"summary", fiber_summary(fibers)}});
    auto t = fiber_timings(fibers);
    t["field"] = F->literal();
    t["elapsed_ms"] = ms_since(t0);
    timing_sections.push_back(std::move(t));
    all.insert(all.end(), std::make_move_iterator(fibers.begin()), std::make_move_iterator(fibers.end()));
  }
  return {{"config", {{"curve", "1,0"}, {"cm", "i"}, {"endo", "i"}, {"mode", "ladder"}, {"n_max", n_max}}},
          {"fields", std::move(sections)},
          {"summary", fiber_summary(all)},
          {"timings", {{"total_ms", ms_since(start)}, {"workers", workers}, {"fields", std::move(timing_sections)}}}};
}

// ---------------------------------------------------------------------------
// Sampling

CurvePoint random_point(const Curve& E, std::mt19937_64& rng, bool allow_infinity) {
  const auto N = E.group_order();
  if (!allow_infinity && N < 2) throw InvalidCurve("no affine points on " + E.describe());
  std::uniform_int_distribution<std::uint64_t> pick(allow_infinity ? 0 : 1, N - 1);
  return E.point_at(pick(rng));
}

Divisor random_principal_divisor(const Curve& E, std::mt19937_64& rng, int terms, int max_mult, const Divisor* avoid) {
  std::uniform_int_distribution<int> mult(-max_mult, max_mult);
  auto usable = [&](const CurvePoint& P, const Divisor& D) {
    return !P.is_infinity() && (!avoid || avoid->multiplicity(P) == 0) && D.multiplicity(P) == 0;
  };
  for (;;) {
    Divisor D(E);
    for (int i = 0; i < terms; ++i) {
      auto P = random_point(E, rng);
      if (!usable(P, D)) continue;
      int c = mult(rng);
      D.add_point(P, c == 0 ? 1 : c);
    }
    // (R) cancels the group sum; a pair (S) + (-S) then cancels the degree
    // without moving the sum.
    const auto R = E.neg(D.sum_point());
    if (!usable(R, D)) continue;
    D.add_point(R, 1);
    const auto deg = D.degree();
    if (deg != 0) {
      if (deg % 2 != 0) continue;
      auto S = random_point(E, rng);
      if (!usable(S, D) || !usable(E.neg(S), D) || S == E.neg(S)) continue;
      D.add_point(S, -deg / 2);
      D.add_point(E.neg(S), -deg / 2);
    }
    if (D.empty() || !is_principal(D)) continue;
    return D;
  }
}

// ---------------------------------------------------------------------------
// Invariant suite

namespace {

class Checks {
 public:
  CheckResult& open(std::string name) {
    results_.push_back({std::move(name), true, 0, {}});
    return results_.back();
  }
  // Keeps the detail of the first failing case.
  static void expect(CheckResult& c, bool ok, const std::string& what) {
    ++c.cases;
    if (ok) return;
    if (c.passed) c.detail = what;
    c.passed = false;
  }
  std::vector<CheckResult> take() { return {results_.begin(), results_.end()}; }

 private:
  std::deque<CheckResult> results_;  // stable references across open()
};

FieldElement random_element(const FieldSpec& F, std::mt19937_64& rng, bool nonzero = false) {
  std::uniform_int_distribution<std::uint64_t> pick(nonzero ? 1 : 0, F.size() - 1);
  return F.from_packed(pick(rng));
}

// Packed values enumerate F in some fixed order, so from_packed of a uniform
// integer is a uniform element.
void field_checks(const FieldSpec& F, std::mt19937_64& rng, Checks& out) {
  auto& ring = out.open("field.ring_axioms");
  for (int i = 0; i < 200; ++i) {
    auto a = random_element(F, rng), b = random_element(F, rng), c = random_element(F, rng);
    const bool ok = (a + b) + c == a + (b + c) && (a * b) * c == a * (b * c) && a * (b + c) == a * b + a * c &&
                    (a - a).is_zero() && (a.is_zero() || (a * a.inverse()).is_one());
    Checks::expect(ring, ok, "a=" + a.to_string() + " b=" + b.to_string() + " c=" + c.to_string());
  }
  auto& frob = out.open("field.frobenius_additive");
  const auto p = static_cast<std::int64_t>(F.characteristic());
  for (int i = 0; i < 100; ++i) {
    auto a = random_element(F, rng), b = random_element(F, rng);
    Checks::expect(frob, (a + b).pow(p) == a.pow(p) + b.pow(p), "a=" + a.to_string() + " b=" + b.to_string());
  }
  auto& fix = out.open("field.frobenius_fixes_field");
  for (int i = 0; i < 100; ++i) {
    auto a = random_element(F, rng);
    Checks::expect(fix, a.pow(static_cast<std::int64_t>(F.size())) == a, "a=" + a.to_string());
  }
  auto& ord = out.open("field.mult_order");
  for (int i = 0; i < 100; ++i) {
    auto a = random_element(F, rng, true);
    const auto d = F.mult_order(a);
    bool ok = (F.size() - 1) % d == 0 && a.pow(static_cast<std::int64_t>(d)).is_one();
    for (auto l : prime_divisors(d)) ok = ok && !a.pow(static_cast<std::int64_t>(d / l)).is_one();
    Checks::expect(ord, ok, "a=" + a.to_string());
  }
}

void curve_checks(const Curve& E, std::mt19937_64& rng, Checks& out) {
  const auto N = E.group_order();
  auto& law = out.open("curve.group_law");
  auto assoc = [&](const CurvePoint& P, const CurvePoint& Q, const CurvePoint& R) {
    Checks::expect(law, E.add(E.add(P, Q), R) == E.add(P, E.add(Q, R)) && E.add(P, Q) == E.add(Q, P),
                   P.to_string() + " " + Q.to_string() + " " + R.to_string());
  };
  if (N <= 300) {
    const auto pts = E.enumerate_points();
    for (const auto& P : pts)
      for (const auto& Q : pts)
        for (const auto& R : pts) assoc(P, Q, R);
  } else {
    for (int i = 0; i < 2000; ++i) assoc(random_point(E, rng, true), random_point(E, rng, true), random_point(E, rng, true));
  }
  for (int i = 0; i < 50; ++i) {
    auto P = random_point(E, rng, true);
    Checks::expect(law, E.add(P, {}) == P && E.add(P, E.neg(P)).is_infinity() && E.is_on_curve(P), P.to_string());
  }

  auto& mul = out.open("curve.scalar_mul");
  for (int i = 0; i < 20; ++i) {
    auto P = random_point(E, rng, true);
    CurvePoint acc;
    for (std::int64_t k = 0; k <= 30; ++k) {
      Checks::expect(mul, E.scalar_mul(k, P) == acc && E.scalar_mul(-k, P) == E.neg(acc),
                     std::to_string(k) + "*" + P.to_string());
      acc = E.add(acc, P);
    }
    Checks::expect(mul, E.scalar_mul(static_cast<std::int64_t>(N), P).is_infinity(), "#E*" + P.to_string());
  }

  auto& tors = out.open("curve.torsion_counts");
  for (std::uint64_t n = 2; n <= 12; ++n) {
    if (n % E.field().characteristic() == 0) continue;
    const auto pts = E.torsion_points(n);
    bool ok = (n * n) % pts.size() == 0;
    for (const auto& P : pts) ok = ok && E.scalar_mul(static_cast<std::int64_t>(n), P).is_infinity();
    Checks::expect(tors, ok, "n=" + std::to_string(n) + " |E[n]|=" + std::to_string(pts.size()));
  }
}

std::vector<Endo> sample_endos(CMKind kind) {
  return {{kind, 0, 1}, {kind, 1, 1}, {kind, 2, 1}, {kind, 1, -2}, {kind, 3, 2}, {kind, -2, 3}, {kind, 2, 0}};
}

void cm_checks(const CMStructure& cm, std::mt19937_64& rng, Checks& out) {
  const auto& E = cm.curve();
  auto& ros = out.open("cm.rosati_norm_trace");
  for (const auto& u : sample_endos(cm.kind())) {
    for (int i = 0; i < 50; ++i) {
      auto P = random_point(E, rng, true);
      const auto uP = cm.apply(u, P);
      const auto vP = cm.apply(u.rosati_dual(), P);
      Checks::expect(ros,
                     cm.apply(u.rosati_dual(), uP) == E.scalar_mul(u.degree(), P) &&
                         E.add(uP, vP) == E.scalar_mul(u.trace(), P),
                     "u=" + u.to_string() + " P=" + P.to_string());
    }
  }
  auto& ker = out.open("cm.kernel_size");
  for (const auto& u : sample_endos(cm.kind())) {
    const auto d = static_cast<std::uint64_t>(u.degree());
    if (d % E.field().characteristic() == 0 || !E.has_full_torsion(d)) continue;
    Checks::expect(ker, cm.kernel(u).size() == d, "u=" + u.to_string());
  }
}

void divisor_checks(const Curve& E, std::mt19937_64& rng, Checks& out) {
  auto& hom = out.open("divisor.sum_and_degree_additive");
  std::uniform_int_distribution<int> mult(-4, 4);
  for (int i = 0; i < 50; ++i) {
    Divisor A(E), B(E);
    for (int k = 0; k < 4; ++k) {
      A.add_point(random_point(E, rng, true), mult(rng));
      B.add_point(random_point(E, rng, true), mult(rng));
    }
    Checks::expect(hom,
                   (A + B).sum_point() == E.add(A.sum_point(), B.sum_point()) &&
                       (A + B).degree() == A.degree() + B.degree() && (A - A).empty(),
                   A.to_string() + " | " + B.to_string());
  }
}

void function_checks(const Curve& E, std::mt19937_64& rng, Checks& out) {
  auto& div = out.open("function.divisor_of_program");
  auto& scale = out.open("function.reduction_invariance");
  for (int i = 0; i < 30; ++i) {
    auto D = random_principal_divisor(E, rng, 3, 5);
    auto P = random_point(E, rng), Q = random_point(E, rng);
    if (D.multiplicity(P) != 0 || D.multiplicity(Q) != 0) continue;
    std::optional<FieldElement> first;
    for (unsigned attempt = 0; attempt < 5; ++attempt) {
      auto f = function_with_divisor(D, attempt);
      Checks::expect(div, f.formal_divisor() == D, D.to_string() + " attempt " + std::to_string(attempt));
      auto ratio = eval_program(f, P) / eval_program(f, Q);
      if (!first) first = ratio;
      Checks::expect(scale, ratio == *first, D.to_string() + " attempt " + std::to_string(attempt));
    }
  }

  auto& rec = out.open("function.weil_reciprocity");
  for (int i = 0; i < 50; ++i) {
    auto Df = random_principal_divisor(E, rng, 3, 4);
    auto Dg = random_principal_divisor(E, rng, 3, 4, &Df);
    Checks::expect(rec, weil_reciprocity_check(function_with_divisor(Df), function_with_divisor(Dg)),
                   Df.to_string() + " | " + Dg.to_string());
  }
}

void pairing_checks(const Curve& E, Checks& out) {
  auto& laws = out.open("pairing.laws");
  const auto& F = E.field();
  for (std::uint64_t n : {3u, 5u, 7u}) {
    if (n % F.characteristic() == 0 || !E.has_full_torsion(n)) continue;
    const auto [P, Q] = torsion_basis(E, n);
    const auto k = static_cast<std::int64_t>(n);
    const auto ePQ = weil_pairing(n, P, Q, E);
    const auto P2Q = E.add(E.dbl(P), Q);
    const bool ok = ePQ.pow(k).is_one() && F.mult_order(ePQ) == n && weil_pairing(n, P, P, E).is_one() &&
                    (weil_pairing(n, Q, P, E) * ePQ).is_one() &&
                    weil_pairing(n, P2Q, Q, E) == ePQ.pow(2) * weil_pairing(n, Q, Q, E) &&
                    weil_pairing(n, P, E.add(Q, P2Q), E) == ePQ * weil_pairing(n, P, P2Q, E);
    Checks::expect(laws, ok, "n=" + std::to_string(n));
  }
}

void section_checks(const RibetConfig& cfg, Checks& out) {
  const auto& E = cfg.curve();
  const auto& cm = cfg.cm();
  auto& jac = out.open("jacobian.order_matches_kernel_value");
  auto& ctrl = out.open("section.integer_endo_projects_to_zero");
  std::optional<CurvePoint> q;
  for (std::uint64_t n = 3; n <= 50 && !q; ++n) {
    auto pts = E.find_points_of_order(n);
    if (!pts.empty()) q = pts.front();
  }
  if (!q) return;

  NodalFiber fiber(E, *q);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    Divisor avoid = Divisor::point(E, *q) + Divisor::point(E, E.neg(*q));
    auto D = random_principal_divisor(E, rng, 3, 3, &avoid);
    JacClass z(fiber, D);
    Checks::expect(jac, jac_order(z) == E.field().mult_order(jac_kernel_value(z)), D.to_string());
  }

  for (std::int64_t m : {2, 3, -2}) {
    auto deg_cfg = RibetConfig::unchecked(cfg.cm_ptr(), cm.integer(m));
    for (std::uint64_t n = 3; n <= 50; ++n) {
      for (const auto& p : E.find_points_of_order(n)) {
        try {
          Checks::expect(ctrl, beta_a_divisor(deg_cfg, p).sum_point().is_infinity(),
                         "a=" + std::to_string(m) + " q=" + p.to_string());
        } catch (const PreimageNotRational&) {
        } catch (const QInBadLocus&) {
        }
      }
    }
  }
}

}  // namespace

std::vector<CheckResult> invariant_suite(const RibetConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Checks out;
  const auto& E = cfg.curve();
  field_checks(E.field(), rng, out);
  curve_checks(E, rng, out);
  cm_checks(cfg.cm(), rng, out);
  divisor_checks(E, rng, out);
  function_checks(E, rng, out);
  pairing_checks(E, out);
  section_checks(cfg, out);
  return out.take();
}

// ---------------------------------------------------------------------------
// run

namespace {

std::pair<std::int64_t, std::int64_t> parse_curve(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("curve must be 'a4,a6', got '" + s + "'");
  try {
    std::size_t used1 = 0, used2 = 0;
    const auto a4 = std::stoll(s.substr(0, comma), &used1);
    const auto a6 = std::stoll(s.substr(comma + 1), &used2);
    if (used1 != comma || used2 != s.size() - comma - 1) throw std::invalid_argument("trailing characters");
    return {a4, a6};
  } catch (const std::logic_error&) {
    throw ConfigError("curve must be 'a4,a6', got '" + s + "'");
  }
}

std::uint64_t literal_characteristic(const std::string& s) {
  try {
    std::size_t used = 0;
    const auto p = std::stoull(s, &used);
    if (used == 0) throw std::invalid_argument("empty");
    return p;
  } catch (const std::logic_error&) {
    throw ConfigError("field literal must start with the characteristic, got '" + s + "'");
  }
}

struct Context {
  std::shared_ptr<const FieldSpec> field;
  std::shared_ptr<const Curve> curve;
  std::shared_ptr<const CMStructure> cm;
  std::optional<RibetConfig> section;
};

Context build_context(const ExperimentConfig& cfg) {
  const auto [a4, a6] = parse_curve(cfg.curve);
  Context ctx;
  if (cfg.auto_extend) {
    const auto req = cfg.mode == RunMode::witness || cfg.mode == RunMode::pairing_table
                         ? TorsionRequirement::full_n_torsion
                         : TorsionRequirement::point_of_order_n;
    ctx.field = auto_extend_field(literal_characteristic(cfg.field), a4, a6, req, cfg.n, cfg.cm, cfg.max_size);
  } else {
    ctx.field = FieldSpec::parse(cfg.field, cfg.max_size);
  }
  ctx.curve = Curve::create(ctx.field, a4, a6);
  ctx.cm = CMStructure::create(ctx.curve, cfg.cm);
  ctx.section = RibetConfig::create(ctx.cm, Endo::parse(cfg.endo, cfg.cm));
  return ctx;
}

json config_json(const ExperimentConfig& cfg, const Context& ctx) {
  return {{"field", ctx.field->literal()},
          {"field_requested", cfg.field},
          {"auto_extend", cfg.auto_extend},
          {"curve", cfg.curve},
          {"group_order", ctx.curve->group_order()},
          {"cm", cfg.cm == CMKind::gaussian ? "i" : "zeta"},
          {"endo", ctx.section->a().to_string()},
          {"mode", to_string(cfg.mode)},
          {"n", cfg.n},
          {"n_max", cfg.n_max}};
}

std::optional<std::string> first_failure(const std::vector<FiberReport>& fibers) {
  for (const auto& r : fibers)
    if (r.status == FiberReport::Status::failed)
      return "fiber q=" + r.q.to_string() + " n=" + std::to_string(r.n) + ": " + r.message;
  return std::nullopt;
}

void attach_fibers(json& report, const std::vector<FiberReport>& fibers) {
  json rows = json::array();
  for (const auto& r : fibers) rows.push_back(fiber_json(r));
  report["fibers"] = std::move(rows);
  report["summary"] = fiber_summary(fibers);
  report["timings"].update(fiber_timings(fibers));
}

int finish(json& report, const std::vector<FiberReport>& fibers, std::optional<std::string> failure = {}) {
  if (!failure) failure = first_failure(fibers);
  if (failure) report["error"] = *failure;
  return failure ? 1 : 0;
}

RunResult run_mode(const ExperimentConfig& cfg, const Context& ctx) {
  RunResult res;
  auto& report = res.report;
  const auto& section = *ctx.section;
  const auto& E = *ctx.curve;
  report["config"] = config_json(cfg, ctx);
  report["timings"] = {{"workers", cfg.workers}};

  switch (cfg.mode) {
    case RunMode::suite: {
      const auto t0 = Clock::now();
      auto checks = invariant_suite(section);
      json rows = json::array();
      std::optional<std::string> failure;
      for (const auto& c : checks) {
        rows.push_back({{"name", c.name}, {"passed", c.passed}, {"cases", c.cases}, {"detail", c.detail}});
        if (!c.passed && !failure) failure = "check " + c.name + ": " + c.detail;
      }
      report["checks"] = std::move(rows);
      report["timings"]["checks_ms"] = ms_since(t0);
      auto fibers = lifting_property_scan(section, cfg.n_max, cfg.workers);
      attach_fibers(report, fibers);
      res.exit_code = finish(report, fibers, failure);
      break;
    }
    case RunMode::fiber: {
      auto pts = E.find_points_of_order(cfg.n);
      if (pts.empty()) throw ConfigError("no point of order " + std::to_string(cfg.n) + " on " + E.describe());
      std::vector<FiberReport> fibers;
      try {
        fibers.push_back(verify_fiber(section, pts.front()));
      } catch (const QInBadLocus& e) {
        throw ConfigError(e.what());
      } catch (const Error& e) {
        FiberReport r;
        r.field = E.field().literal();
        r.q = pts.front();
        r.n = cfg.n;
        r.degree_condition = degree_condition(section, cfg.n);
        r.status = FiberReport::Status::failed;
        r.message = e.what();
        fibers.push_back(std::move(r));
      }
      attach_fibers(report, fibers);
      res.exit_code = finish(report, fibers);
      break;
    }
    case RunMode::scan: {
      auto fibers = lifting_property_scan(section, cfg.n_max, cfg.workers);
      attach_fibers(report, fibers);
      res.exit_code = finish(report, fibers);
      break;
    }
    case RunMode::witness: {
      PairingSign sign;
      std::vector<FiberReport> fibers;
      std::optional<std::string> failure;
      try {
        fibers.push_back(find_full_order_fiber(section, cfg.n, sign));
      } catch (const NoWitnessFound& e) {
        report["witness"] = nullptr;
        report["note"] = e.what();
      } catch (const FullTorsionNotRational& e) {
        throw ConfigError(e.what());
      } catch (const InvalidEndomorphism& e) {
        throw ConfigError(e.what());
      } catch (const Error& e) {
        failure = e.what();
      }
      report["sigma"] = sign.value() ? json(*sign.value()) : json(nullptr);
      attach_fibers(report, fibers);
      res.exit_code = finish(report, fibers, failure);
      break;
    }
    case RunMode::pairing_table: {
      std::pair<CurvePoint, CurvePoint> basis;
      try {
        basis = torsion_basis(E, cfg.n);
      } catch (const FullTorsionNotRational& e) {
        throw ConfigError(e.what());
      } catch (const CharacteristicDividesN& e) {
        throw ConfigError(e.what());
      }
      const std::vector<CurvePoint> b = {basis.first, basis.second};
      json table = json::array();
      for (const auto& P : b) {
        json row = json::array();
        for (const auto& Q : b) row.push_back(field_element_json(weil_pairing(cfg.n, P, Q, E)));
        table.push_back(std::move(row));
      }
      const auto e12 = weil_pairing(cfg.n, b[0], b[1], E);
      report["basis"] = {point_json(b[0]), point_json(b[1])};
      report["table"] = std::move(table);
      report["pairing_order"] = E.field().mult_order(e12);
      res.exit_code = E.field().mult_order(e12) == cfg.n ? 0 : 1;
      if (res.exit_code) report["error"] = "basis pairing is not a primitive n-th root of unity";
      break;
    }
  }
  return res;
}

bool is_config_error(const Error& e) {
  return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidField*>(&e) ||
         dynamic_cast<const FieldTooLarge*>(&e) || dynamic_cast<const InvalidCurve*>(&e) ||
         dynamic_cast<const InvalidCM*>(&e) || dynamic_cast<const InvalidEndomorphism*>(&e) ||
         dynamic_cast<const DeskScaleExceeded*>(&e);
}

}  // namespace

RunResult run(const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  RunResult res;
  try {
    if (cfg.workers == 0) throw ConfigError("workers must be at least 1");
    const auto ctx = build_context(cfg);
    res = run_mode(cfg, ctx);
  } catch (const Error& e) {
    res.report["error"] = e.what();
    res.exit_code = is_config_error(e) ? 2 : 1;
  }
  res.report["timings"]["total_ms"] = ms_since(start);
  return res;
}

}  // namespace ribet
