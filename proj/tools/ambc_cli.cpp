// Command-line front end for the experiment harness. Each subcommand runs one
// experiment and writes its CSV to --out. Options mirror the configuration
// file grammar: --config is applied first, then any flags override it, and
// grids an experiment needs that are still empty fall back to its presets.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ambc/harness.hpp"
#include "ambc/mathkit.hpp"

namespace {

struct FlagBinding {
  std::string flag;
  std::string key;
  std::string value;
  CLI::Option* option = nullptr;
  bool required_without_config = false;
};

struct Invocation {
  std::string experiment;
  std::string config_path;
  CLI::Option* config_option = nullptr;
  std::vector<FlagBinding> flags;
};

void add_common_flags(CLI::App* cmd, Invocation& inv) {
  inv.config_option =
      cmd->add_option("--config", inv.config_path,
                      "key = value configuration file, applied before flag overrides");

  struct FlagSpec {
    const char* flag;
    const char* key;
    const char* help;
    bool required;
  };
  static const FlagSpec kSpecs[] = {
      {"--seed", "seed", "master RNG seed (required unless --config supplies it)", true},
      {"--trials", "trials",
       "payload symbols per grid point, >= 10000 for BER runs (required unless "
       "--config supplies it)",
       true},
      {"--out", "out", "output CSV path (required unless --config supplies it)", true},
      {"--n", "n", "samples per symbol (N)", false},
      {"--k", "k", "payload symbols per block (K, multiple of 4)", false},
      {"--noise-power", "noise_power", "per-sample noise power", false},
      {"--source", "source", "source waveform: gaussian or psk", false},
      {"--psk-order", "psk_order", "PSK constellation order (M >= 2)", false},
      {"--rtse-sign", "rtse_sign", "misalignment direction: negative or positive", false},
      {"--snr-db", "snr_db", "source SNR in dB", false},
      {"--eta-db", "eta_db", "tag attenuation in dB", false},
      {"--snr-db-grid", "snr_db_grid", "comma list of SNR points", false},
      {"--n-a-grid", "n_a_grid", "comma list of misalignment sample counts", false},
      {"--n-grid", "n_grid", "comma list of N values", false},
      {"--k-grid", "k_grid", "comma list of K values", false},
      {"--eta-db-grid", "eta_db_grid", "comma list of attenuation points", false},
      {"--channel-mode", "channel_mode", "fixed or random_per_trial", false},
      {"--channel-h", "h", "source-to-reader channel 're,im'", false},
      {"--channel-f", "f", "source-to-tag channel 're,im'", false},
      {"--channel-g", "g", "tag-to-reader channel 're,im'", false},
      {"--policy", "policy",
       "threshold policy: perfect-opt, near-opt, estimated, ml, manual", false},
      {"--manual-threshold", "manual_threshold", "threshold for the manual policy", false},
      {"--workers", "workers", "worker thread count (output is identical for any value)",
       false},
      {"--pdf-adjacent-bit", "pdf_adjacent_bit", "forced adjacent bit for pdf", false},
      {"--pdf-current-bit", "pdf_current_bit", "forced current bit for pdf", false},
      {"--pdf-bins", "pdf_bins", "histogram bin count for pdf", false},
      {"--pdf-windows", "pdf_windows", "window count for pdf", false},
      {"--grid-points", "grid_points", "threshold grid size for threshold-table", false},
      {"--estimator-seeds", "estimator_seeds", "blocks per estimator-accuracy row", false},
  };
  inv.flags.reserve(std::size(kSpecs));
  for (const FlagSpec& spec : kSpecs) {
    FlagBinding& binding = inv.flags.emplace_back();
    binding.flag = spec.flag;
    binding.key = spec.key;
    binding.option = cmd->add_option(spec.flag, binding.value, spec.help);
    binding.required_without_config = spec.required;
  }
}

void fill_default_grids(ambc::ExperimentConfig& config, const std::string& experiment) {
  const auto fill_d = [](std::vector<double>& grid, std::initializer_list<double> values) {
    if (grid.empty()) grid = values;
  };
  const auto fill_i = [](std::vector<int>& grid, std::initializer_list<int> values) {
    if (grid.empty()) grid = values;
  };
  if (experiment == "ber-sweep") {
    fill_d(config.snr_db_grid, {0, 5, 10, 15, 20, 25, 30});
    fill_i(config.n_a_grid, {0, 10, 20});
  } else if (experiment == "n-sweep") {
    fill_i(config.n_grid, {50, 100, 150, 200, 300, 400});
    fill_i(config.n_a_grid, {0, 10, 20});
  } else if (experiment == "eta-sweep") {
    fill_d(config.eta_db_grid, {0, 1.1, 2, 3, 4, 5, 6});
    fill_i(config.n_a_grid, {0, 10, 20});
  } else if (experiment == "threshold-table") {
    fill_i(config.n_a_grid, {0, 10, 20});
  } else if (experiment == "estimator-accuracy") {
    fill_i(config.n_grid, {50, 100, 200});
    fill_i(config.k_grid, {100, 200, 400});
    fill_i(config.n_a_grid, {10, 20});
  } else if (experiment == "balance") {
    fill_i(config.n_a_grid, {10});
  } else if (experiment == "floor") {
    fill_i(config.n_a_grid, {0, 10});
  } else if (experiment == "pdf") {
    fill_i(config.n_a_grid, {10});
  }
}

std::string run_experiment(const std::string& experiment,
                           const ambc::ExperimentConfig& config) {
  if (experiment == "ber-sweep") return ambc::run_ber_sweep(config);
  if (experiment == "n-sweep") return ambc::run_n_sweep(config);
  if (experiment == "eta-sweep") return ambc::run_eta_sweep(config);
  if (experiment == "pdf") return ambc::run_pdf_experiment(config);
  if (experiment == "threshold-table") return ambc::run_threshold_table(config);
  if (experiment == "estimator-accuracy") return ambc::run_estimator_accuracy(config);
  if (experiment == "balance") return ambc::run_balance_experiment(config);
  if (experiment == "floor") return ambc::run_floor_experiment(config);
  throw ambc::config_error("unknown experiment: " + experiment);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ambc: energy-detection simulator for ambient backscatter links"};
  app.require_subcommand(1);

  struct SubcommandSpec {
    const char* name;
    const char* help;
  };
  static const SubcommandSpec kSubcommands[] = {
      {"ber-sweep", "BER versus SNR over an (snr, n_a) grid"},
      {"n-sweep", "BER versus samples-per-symbol over an (N, n_a) grid"},
      {"eta-sweep", "BER versus tag attenuation over an (eta, n_a) grid"},
      {"pdf", "window-energy histogram for one forced bit case"},
      {"threshold-table", "threshold grid search per misalignment"},
      {"estimator-accuracy", "blind estimator error over (N, K, n_a)"},
      {"balance", "conditional error rates under forced adjacent bits"},
      {"floor", "high-SNR BER floor check"},
  };
  std::vector<Invocation> invocations(std::size(kSubcommands));
  for (std::size_t s = 0; s < std::size(kSubcommands); ++s) {
    CLI::App* cmd = app.add_subcommand(kSubcommands[s].name, kSubcommands[s].help);
    invocations[s].experiment = kSubcommands[s].name;
    add_common_flags(cmd, invocations[s]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 1;
  }

  const Invocation* inv = nullptr;
  for (std::size_t s = 0; s < std::size(kSubcommands); ++s) {
    if (app.get_subcommand(kSubcommands[s].name)->parsed()) {
      inv = &invocations[s];
      break;
    }
  }
  if (inv == nullptr) {
    std::fprintf(stderr, "error: no experiment selected\n");
    return 1;
  }

  if (inv->config_option->count() == 0) {
    for (const FlagBinding& binding : inv->flags) {
      if (binding.required_without_config && binding.option->count() == 0) {
        std::fprintf(stderr, "error: %s is required (or supply it via --config)\n",
                     binding.flag.c_str());
        return 1;
      }
    }
  }

  try {
    ambc::ExperimentConfig config;
    if (inv->config_option->count() > 0) {
      config = ambc::parse_config_file(inv->config_path);
    }
    for (const FlagBinding& binding : inv->flags) {
      if (binding.option->count() > 0) {
        ambc::apply_config_entry(config, binding.key, binding.value);
      }
    }
    fill_default_grids(config, inv->experiment);
    if (config.out_path.empty()) {
      throw ambc::config_error("output path is required: pass --out or config key 'out'");
    }

    const std::string csv = run_experiment(inv->experiment, config);
    ambc::write_text_file(config.out_path, csv);
    std::fprintf(stdout, "wrote %s\n", config.out_path.c_str());
    return 0;
  } catch (const ambc::convergence_error& error) {
    std::fprintf(stderr, "convergence error: %s\n", error.what());
    return 2;
  } catch (const ambc::config_error& error) {
    std::fprintf(stderr, "configuration error: %s\n", error.what());
    return 1;
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 1;
  }
}
