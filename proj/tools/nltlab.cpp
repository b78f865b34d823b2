// nltlab: runs the catalogued experiments from a JSON config.
//
//   nltlab --config cfg.json [--label name] [--jobs N] [--quiet]
//   nltlab list [--json]
//
// Exit status: 0 when every verdict matches its expectation, 2 when some
// verdict does not, 1 on configuration or runtime errors.

#include <CLI11.hpp>

#include <iostream>

#include "nlt/errors.hpp"
#include "nlt/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nonlocal traffic experiments"};
  app.require_subcommand(0, 1);

  std::string config;
  std::string label;
  int jobs = 1;
  bool quiet = false;
  app.add_option("-c,--config", config, "experiment config (JSON, or a previous manifest.json)");
  app.add_option("-l,--label", label, "output label (default: hash of the normalized config)");
  app.add_option("-j,--jobs", jobs, "runs to execute in parallel")->check(CLI::Range(1, 256));
  app.add_flag("-q,--quiet", quiet, "only print the verdict table");

  auto* list = app.add_subcommand("list", "show the experiment catalog");
  bool as_json = false;
  list->add_flag("--json", as_json, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (list->parsed()) {
    if (as_json) {
      std::cout << nlt::catalog_to_json().dump(2) << '\n';
    } else {
      nlt::print_catalog(std::cout);
    }
    return 0;
  }
  if (config.empty()) {
    std::cerr << "error: --config is required\n" << app.help();
    return 1;
  }

  try {
    const nlt::ExperimentConfig cfg = nlt::load_config(config);
    nlt::RunOptions opts;
    opts.label = label;
    opts.jobs = jobs;
    opts.log = quiet ? nullptr : &std::cerr;
    const nlt::ExperimentResult r = nlt::run_experiment(cfg, opts);
    for (const auto& v : r.verdicts) {
      std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "  value=" << v.value
                << "  threshold=" << v.threshold;
      if (!v.expected_pass) std::cout << "  (expected FAIL)";
      if (!v.as_expected()) std::cout << "  UNEXPECTED";
      std::cout << '\n';
    }
    std::cout << "artifacts: " << r.dir.string() << '\n';
    return r.all_as_expected() ? 0 : 2;
  } catch (const nlt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 1;
}
