#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "qclab/scenario.hpp"

namespace fs = std::filesystem;

namespace {

int suite_exit_code(const qclab::SuiteReport& report) {
  return report.overall_pass ? 0 : 1;
}

void print_summary(const qclab::SuiteReport& report) {
  int pass = 0, fail = 0, reported = 0;
  for (const auto& c : report.checks) {
    if (!c.report.pass_fail_mode)
      ++reported;
    else if (c.report.verdict == qclab::Verdict::Pass)
      ++pass;
    else
      ++fail;
  }
  std::cout << report.scenario << ": " << (report.overall_pass ? "PASS" : "FAIL") << " ("
            << pass << " passed, " << fail << " failed, " << reported
            << " reported-only)\n";
  for (const auto& c : report.checks) {
    if (c.report.pass_fail_mode && c.report.verdict == qclab::Verdict::Fail)
      std::cout << "  FAIL " << c.identity << " [" << c.convention << ", " << c.state
                << "] relative=" << c.report.relative
                << " tolerance=" << c.report.tolerance << "\n";
  }
}

void write_reports(const qclab::SuiteReport& report, const std::string& out_dir,
                   const std::string& format) {
  fs::create_directories(out_dir);
  if (format == "json" || format == "both")
    qclab::emit_report(report, qclab::ReportFormat::Json,
                       (fs::path(out_dir) / (report.scenario + ".json")).string());
  if (format == "csv" || format == "both")
    qclab::emit_report(report, qclab::ReportFormat::Csv,
                       (fs::path(out_dir) / (report.scenario + ".csv")).string());
}

void apply_overrides(qclab::Scenario& s, double tol, std::uint64_t seed, bool seed_set) {
  if (tol > 0.0) {
    s.tolerances.continuity = tol;
    s.tolerances.integral = tol;
  }
  if (seed_set && !s.explicit_samples) {
    s.seed = seed;
    s.sample_points = qclab::generate_sample_points(seed, s.sample_count, s.box_length);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qclab - conservation-law verification lab for second-order "
               "field correlation tensors"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "reports", format = "json";
  double tol = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto* run = app.add_subcommand("run", "run a scenario file and emit a report");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory (default: reports)");
  run->add_option("--format", format, "json, csv or both")
      ->check(CLI::IsMember({"json", "csv", "both"}));
  run->add_option("--tol", tol, "override the analytic continuity/integral tolerance");
  run->add_option("--seed", seed, "override the sample-point seed")
      ->each([&](const std::string&) { seed_set = true; });

  auto* demo = app.add_subcommand("demo", "run every bundled scenario");
  demo->add_option("--out", out_dir, "output directory (default: reports)");
  demo->add_option("--format", format, "json, csv or both")
      ->check(CLI::IsMember({"json", "csv", "both"}));

  auto* list = app.add_subcommand("list-identities", "print the identity catalog");
  (void)list;

  std::string dump_dir;
  auto* dump = app.add_subcommand("dump-scenarios", "write the bundled scenario files");
  dump->add_option("dir", dump_dir, "target directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      qclab::Scenario s = qclab::load_scenario(scenario_path);
      apply_overrides(s, tol, seed, seed_set);
      const qclab::SuiteReport report = qclab::run_suite(s);
      write_reports(report, out_dir, format);
      print_summary(report);
      return suite_exit_code(report);
    }
    if (demo->parsed()) {
      int exit_code = 0;
      for (const auto& [name, text] : qclab::bundled_scenarios()) {
        qclab::Scenario s = qclab::parse_scenario(text);
        const qclab::SuiteReport report = qclab::run_suite(s);
        write_reports(report, out_dir, "both");
        // editable copies of the bundled scenarios next to the reports
        fs::create_directories(fs::path(out_dir) / "scenarios");
        std::ofstream sf(fs::path(out_dir) / "scenarios" / (name + ".json"),
                         std::ios::binary);
        if (!sf) throw qclab::ScenarioError("cannot write scenario copy for " + name);
        sf << text << "\n";
        print_summary(report);
        exit_code = std::max(exit_code, suite_exit_code(report));
      }
      return exit_code;
    }
    if (list->parsed()) {
      for (const auto& [name, desc] : qclab::identity_catalog())
        std::cout << name << "  -  " << desc << "\n";
      return 0;
    }
    if (dump->parsed()) {
      fs::create_directories(dump_dir);
      for (const auto& [name, text] : qclab::bundled_scenarios()) {
        std::ofstream sf(fs::path(dump_dir) / (name + ".json"), std::ios::binary);
        if (!sf) throw qclab::ScenarioError("cannot write " + name);
        sf << text << "\n";
      }
      return 0;
    }
  } catch (const qclab::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
