#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ghostsim/runner.hpp"
#include "ghostsim/validation.hpp"
#include "ghostsim/version.hpp"

namespace {

using namespace ghostsim;

struct CommonArgs {
  std::string scenario;
  std::string out_dir = "out";
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_scenario = true) {
  if (needs_scenario)
    cmd->add_option("--scenario", args.scenario, "Scenario file")->required();
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--threads", args.threads, "Worker threads (0 = auto / GHOSTSIM_THREADS)");
}

int dispatch(const CommonArgs& args, const RunOverrides& ov) {
  const Scenario sc = parse_scenario_file(args.scenario);
  const RunResult result = run_scenario(sc, args.out_dir, ov, args.threads);
  std::cout << result.summary.dump(2) << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ghostsim: correlated-photon imaging simulator"};
  app.set_version_flag("--version", std::string(ghostsim::kVersion));
  app.require_subcommand(1);

  CommonArgs image_args, interfere_args, correlate_args, lens_args, validate_args;
  RunOverrides image_ov, interfere_ov, correlate_ov, lens_ov;

  CLI::App* image = app.add_subcommand("image", "Coincidence-rate image of the two masks");
  add_common(image, image_args);
  std::string image_path;
  std::string b1, b2;
  image->add_option("--path", image_path, "analytic|bruteforce|both");
  image->add_option("--branch1-lens", b1, "on|off");
  image->add_option("--branch2-lens", b2, "on|off");

  CLI::App* interfere = app.add_subcommand("interfere", "Coincidence dip R(tau) scan");
  add_common(interfere, interfere_args);
  double tau_min = 0, tau_max = 0;
  int steps = 0;
  interfere->add_option("--tau-min", tau_min, "Scan start (s)");
  interfere->add_option("--tau-max", tau_max, "Scan end (s)");
  interfere->add_option("--steps", steps, "Scan points");

  CLI::App* correlate = app.add_subcommand("correlate", "Bucket-bucket correlator g(r)");
  add_common(correlate, correlate_args);
  std::string scan_spec;
  bool deinvert = false;
  correlate->add_option("--scan", scan_spec, "rmax_px,steps");
  correlate->add_flag("--deinvert", deinvert, "Apply the inversion-correcting lens");

  CLI::App* lens_study = app.add_subcommand("lens-study", "Detection-lens ablation study");
  add_common(lens_study, lens_args);

  CLI::App* validate = app.add_subcommand("validate", "Run the built-in validation suite");
  validate->add_option("--threads", validate_args.threads, "Worker threads");
  std::string report_path;
  validate->add_option("--report", report_path, "Write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (image->parsed()) {
      image_ov.experiment = ExperimentType::image;
      if (image->count("--path")) image_ov.image_path = image_path;
      auto lens = [](const std::string& v) {
        if (v == "on") return LensMode::with_lens;
        if (v == "off") return LensMode::without_lens;
        throw ConfigError("lens flags are on|off");
      };
      if (image->count("--branch1-lens")) image_ov.branch1 = lens(b1);
      if (image->count("--branch2-lens")) image_ov.branch2 = lens(b2);
      return dispatch(image_args, image_ov);
    }
    if (interfere->parsed()) {
      interfere_ov.experiment = ExperimentType::interfere;
      if (interfere->count("--tau-min")) interfere_ov.tau_min = tau_min;
      if (interfere->count("--tau-max")) interfere_ov.tau_max = tau_max;
      if (interfere->count("--steps")) interfere_ov.tau_steps = steps;
      return dispatch(interfere_args, interfere_ov);
    }
    if (correlate->parsed()) {
      correlate_ov.experiment = ExperimentType::correlate;
      if (!scan_spec.empty()) {
        const auto comma = scan_spec.find(',');
        if (comma == std::string::npos)
          throw ConfigError("--scan expects rmax_px,steps");
        correlate_ov.rmax_px = std::stoi(scan_spec.substr(0, comma));
        correlate_ov.rsteps = std::stoi(scan_spec.substr(comma + 1));
      }
      if (correlate->count("--deinvert")) correlate_ov.deinvert = deinvert;
      return dispatch(correlate_args, correlate_ov);
    }
    if (lens_study->parsed()) {
      lens_ov.experiment = ExperimentType::lens_study;
      return dispatch(lens_args, lens_ov);
    }
    if (validate->parsed()) {
      const auto results = run_acceptance({}, {}, validate_args.threads);
      bool all = true;
      for (const CriterionResult& r : results) {
        std::printf("[%s] %2d %-32s %s\n", r.passed ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.details.c_str());
        all = all && r.passed;
      }
      const auto report = acceptance_report(results);
      if (!report_path.empty()) {
        std::ofstream out(report_path);
        out << report.dump(2) << "\n";
      } else {
        std::cout << report.dump(2) << "\n";
      }
      return all ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PhysicsError& e) {
    std::cerr << "physics error: " << e.what() << "\n";
    return 3;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
