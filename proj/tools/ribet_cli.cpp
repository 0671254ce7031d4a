#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ribet/errors.hpp"
#include "ribet/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Torsion experiments for a CM section on nodal degenerations of an elliptic curve"};
  ribet::ExperimentConfig cfg;
  std::string cm = "i", mode = "suite", out = "json", out_file;

  app.add_option("--field", cfg.field, "field literal: p, p^m or p^m:c_m,...,c_0")->capture_default_str();
  app.add_option("--curve", cfg.curve, "a4,a6 for y^2 = x^3 + a4 x + a6")->capture_default_str();
  app.add_option("--cm", cm, "CM order: i or zeta")->capture_default_str();
  app.add_option("--endo", cfg.endo, "endomorphism a, e.g. i, 1+i, 2-zeta")->capture_default_str();
  app.add_option("--mode", mode, "suite | fiber | scan | witness | pairing-table")->capture_default_str();
  app.add_option("--n", cfg.n, "point order for fiber, witness and pairing-table")->capture_default_str();
  app.add_option("--n-max", cfg.n_max, "largest fiber order for suite and scan")->capture_default_str();
  app.add_option("--out", out, "json | csv")->capture_default_str();
  app.add_option("--out-file", out_file, "write the report here instead of stdout");
  app.add_option("--workers", cfg.workers, "fiber worker threads")->capture_default_str();
  app.add_option("--max-size", cfg.max_size, "largest field size p^m")->capture_default_str();
  app.add_flag("--auto-extend", cfg.auto_extend, "use the smallest extension of the prime field meeting the mode's torsion requirement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    cfg.cm = ribet::parse_cm_kind(cm);
    cfg.mode = ribet::parse_mode(mode);
    cfg.out = ribet::parse_output(out);
  } catch (const ribet::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  auto result = ribet::run(cfg);
  const auto text = ribet::render(result.report, cfg.out);
  if (out_file.empty()) {
    std::cout << text;
  } else {
    std::ofstream os(out_file);
    if (!os) {
      std::cerr << "cannot open " << out_file << "\n";
      return 2;
    }
    os << text;
  }
  if (result.report.contains("error")) std::cerr << result.report["error"].get<std::string>() << "\n";
  return result.exit_code;
}
