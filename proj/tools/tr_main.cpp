#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "trqd/scenario.hpp"

namespace {

std::vector<double> parse_a_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size())
      throw std::invalid_argument("sweep: bad contraction value '" + item + "'");
    values.push_back(value);
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-rescaled quantum dynamics runner"};
  app.require_subcommand(1);

  // validate
  std::string family_name = "sin";
  double a = 2.0, t_f = 1.0;
  CLI::App* validate = app.add_subcommand(
      "validate", "check the shortcut requirements of a rescaling function");
  validate->add_option("--family", family_name, "sin | poly")->capture_default_str();
  validate->add_option("--a", a, "contraction parameter")->capture_default_str();
  validate->add_option("--tf", t_f, "reference duration")->capture_default_str();

  // run
  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run a scenario and write its report");
  run->add_option("--config", config_path, "scenario config file")->required();

  // sweep
  std::string sweep_config_path, a_list_text;
  CLI::App* sweep = app.add_subcommand("sweep", "run a scenario for several contractions");
  sweep->add_option("--config", sweep_config_path, "scenario config file")->required();
  sweep->add_option("--a", a_list_text, "comma-separated contraction values")->required();

  // schedules
  std::string sched_config_path;
  int rows = 0;
  CLI::App* schedules = app.add_subcommand("schedules", "emit the scenario waveform tables");
  schedules->add_option("--config", sched_config_path, "scenario config file")->required();
  schedules->add_option("--rows", rows, "rows per table (overrides config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      return trqd::validate_command(trqd::rescaling_family_from_string(family_name), a, t_f,
                                    std::cout);
    }
    if (run->parsed()) {
      const trqd::ScenarioConfig config = trqd::load_scenario_config(config_path);
      const trqd::ScenarioRun result = trqd::run_scenario(config);
      for (const std::string& file : result.files_written)
        std::cout << "wrote " << file << "\n";
      std::cout << "fidelity " << result.report.fidelity << " ("
                << (result.passed ? "pass" : "below threshold") << ")\n";
      return result.passed ? 0 : 1;
    }
    if (sweep->parsed()) {
      const trqd::ScenarioConfig config = trqd::load_scenario_config(sweep_config_path);
      return trqd::sweep_command(config, parse_a_list(a_list_text), std::cout);
    }
    if (schedules->parsed()) {
      trqd::ScenarioConfig config = trqd::load_scenario_config(sched_config_path);
      if (rows > 0) config.waveform_rows = rows;
      return trqd::schedules_command(config, std::cout);
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
