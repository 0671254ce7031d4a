#include <doctest.h>

#include <sstream>

#include "ribet/errors.hpp"
#include "ribet/harness.hpp"

using namespace ribet;

namespace {

ExperimentConfig config(RunMode mode, const char* field) {
  ExperimentConfig c;
  c.mode = mode;
  c.field = field;
  return c;
}

// Smallest m with the requirement met, by building every F_{p^m} in turn.
std::uint64_t smallest_degree(std::uint64_t p, TorsionRequirement req, std::uint64_t n, std::uint64_t max_size) {
  std::uint64_t size = p;
  for (unsigned m = 1; size <= max_size; ++m, size *= p) {
    auto E = Curve::create(FieldSpec::create(p, m), 1, 0);
    const bool has_i = (size - 1) % 4 == 0;
    const bool ok = req == TorsionRequirement::full_n_torsion ? E->has_full_torsion(n)
                                                              : !E->find_points_of_order(n).empty();
    if (ok && has_i) return m;
  }
  return 0;
}

}  // namespace

TEST_CASE("suite mode over F_13") {
  auto c = config(RunMode::suite, "13");
  c.n_max = 20;
  const auto r = run(c);
  CHECK(r.exit_code == 0);
  for (const auto& chk : r.report["checks"]) {
    CAPTURE(chk.dump());
    CHECK(chk["passed"].get<bool>());
  }
  CHECK(r.report["summary"]["failures"] == 0);
  CHECK(r.report.contains("timings"));
}

TEST_CASE("fiber mode labels a skipped fiber") {
  auto c = config(RunMode::fiber, "13^2");
  c.n = 4;
  const auto r = run(c);
  CHECK(r.exit_code == 0);
  REQUIRE(r.report["fibers"].size() == 1);
  CHECK(r.report["fibers"][0]["status"] == "skipped");
  CHECK(r.report["fibers"][0]["degree_condition"] == false);
}

TEST_CASE("witness mode with automatic extension") {
  auto c = config(RunMode::witness, "13");
  c.auto_extend = true;
  const auto r = run(c);
  CHECK(r.exit_code == 0);
  CHECK(r.report["config"]["field"] == "13^4:1,0,0,0,2");
  REQUIRE(r.report["fibers"].size() == 1);
  CHECK(r.report["fibers"][0]["ord_beta_j"] == 25);
  CHECK(r.report["fibers"][0]["status"] == "passed");
}

TEST_CASE("automatic extension picks the smallest degree") {
  const auto max = std::uint64_t{1} << 21;
  for (auto req : {TorsionRequirement::point_of_order_n, TorsionRequirement::full_n_torsion}) {
    for (std::uint64_t n : {3u, 5u, 7u}) {
      CAPTURE(n);
      const auto m = smallest_degree(13, req, n, max);
      if (m == 0) {
        CHECK_THROWS_AS(auto_extend_field(13, 1, 0, req, n, CMKind::gaussian, max), DeskScaleExceeded);
        continue;
      }
      const auto F = auto_extend_field(13, 1, 0, req, n, CMKind::gaussian, max);
      CHECK(F->degree() == m);
      CHECK(F->characteristic() == 13);
    }
  }
  // met already at m = 1: the base field comes back
  CHECK(auto_extend_field(13, 1, 0, TorsionRequirement::point_of_order_n, 5, CMKind::gaussian)->degree() == 1);
  CHECK_THROWS_AS(auto_extend_field(13, 1, 0, TorsionRequirement::full_n_torsion, 11, CMKind::gaussian, 100000),
                  DeskScaleExceeded);
}

TEST_CASE("field ladder") {
  const auto ladder = field_ladder({13, 17}, 100000);
  std::vector<std::string> sizes;
  for (const auto& F : ladder) sizes.push_back(std::to_string(F->characteristic()) + "^" + std::to_string(F->degree()));
  CHECK(sizes == std::vector<std::string>{"13^1", "13^2", "13^3", "13^4", "17^1", "17^2", "17^3", "17^4"});
}

TEST_CASE("reports are deterministic and independent of the worker count") {
  auto c = config(RunMode::scan, "13^2");
  c.n_max = 30;
  const auto a = run(c), b = run(c);
  c.workers = 4;
  const auto par = run(c);
  CHECK(a.exit_code == 0);
  CHECK(comparable_section(a.report) == comparable_section(b.report));
  CHECK(comparable_section(a.report) == comparable_section(par.report));
  CHECK_FALSE(comparable_section(a.report).contains("timings"));

  auto s = config(RunMode::suite, "13");
  s.n_max = 15;
  CHECK(comparable_section(run(s).report) == comparable_section(run(s).report));
}

TEST_CASE("CSV rendering") {
  auto c = config(RunMode::scan, "13^2");
  c.n_max = 10;
  const auto r = run(c);
  const auto text = render(r.report, OutputFormat::csv);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "field,q,n,degree_condition,status,message,projection,lambda,ord_lambda,ord_beta_j,pairing_value,sigma");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == r.report["fibers"].size());
  CHECK(nlohmann::json::parse(render(r.report, OutputFormat::json)) == r.report);
}

TEST_CASE("configuration errors exit with 2") {
  CHECK_THROWS_AS(parse_mode("nonsense"), ConfigError);
  CHECK_THROWS_AS(parse_cm_kind("j"), ConfigError);
  CHECK_THROWS_AS(parse_output("xml"), ConfigError);
  CHECK(parse_mode("pairing-table") == RunMode::pairing_table);
  CHECK(to_string(RunMode::witness) == "witness");

  auto bad_field = config(RunMode::suite, "13^2:1,0,1");
  CHECK(run(bad_field).exit_code == 2);
  auto wrong_cm = config(RunMode::suite, "13");
  wrong_cm.curve = "0,1";
  CHECK(run(wrong_cm).exit_code == 2);
  auto degenerate = config(RunMode::suite, "13");
  degenerate.endo = "2";
  CHECK(run(degenerate).exit_code == 2);
  auto too_big = config(RunMode::witness, "13");
  too_big.n = 11;
  too_big.auto_extend = true;
  too_big.max_size = 100000;
  const auto r = run(too_big);
  CHECK(r.exit_code == 2);
  CHECK(r.report["error"].get<std::string>().find("DeskScaleExceeded") != std::string::npos);
}

TEST_CASE("sampling helpers") {
  auto E = Curve::create(FieldSpec::parse("13^2"), 1, 0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    CHECK_FALSE(random_point(*E, rng).is_infinity());
    const auto D = random_principal_divisor(*E, rng, 3, 4);
    CHECK(is_principal(D));
    CHECK(D.multiplicity(CurvePoint::infinity()) == 0);
    const auto D2 = random_principal_divisor(*E, rng, 2, 2, &D);
    CHECK(supports_disjoint(D, D2));
  }
}
