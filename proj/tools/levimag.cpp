#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "levimag/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNumericalError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levimag: levitated-magnet libration and spin-coupling scenarios"};
  app.require_subcommand(1);

  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out_dir;

  auto* run = app.add_subcommand("run", "run a scenario file (or a bundled scenario name)");
  run->add_option("scenario", scenario, "scenario .cfg file or bundled name")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--out", out_dir, std::string("output root (default: $") + levimag::kOutputDirEnv +
                                        " or ./levimag-output)");

  auto* list = app.add_subcommand("list", "list bundled reproduction scenarios");

  auto* validate = app.add_subcommand("validate", "check a scenario against the schema without running it");
  validate->add_option("scenario", scenario, "scenario .cfg file or bundled name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  if (list->parsed()) {
    for (const auto& e : levimag::scenario_catalog())
      std::cout << e.name << "\t" << e.figure << "\t" << e.description << "\n";
    return kOk;
  }

  try {
    const auto path = levimag::resolve_scenario(scenario);
    if (validate->parsed()) {
      const auto info = levimag::validate_scenario(path);
      std::cout << path.string() << ": ok (" << info.kind << "/" << info.mode << ", seed " << info.seed << ")\n";
      return kOk;
    }
    levimag::RunOptions opts;
    opts.seed = seed;
    opts.output_root = out_dir.empty() ? levimag::default_output_root() : std::filesystem::path(out_dir);
    const auto result = levimag::run_scenario(path, opts);
    std::cout << result.info.name << ": wrote " << result.files.size() << " files to " << result.output_dir.string()
              << "\n"
              << result.results.dump(2) << "\n";
    return kOk;
  } catch (const levimag::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const levimag::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  }
}
