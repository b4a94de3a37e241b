#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "pds/experiment.hpp"
#include "pds/filters.hpp"
#include "pds/grid_io.hpp"

namespace fs = std::filesystem;

namespace {

// Sorted .pdsgrid files under dir, loaded as fields. limit <= 0 means all.
std::vector<pds::Field> load_samples(const std::string& dir, int limit) {
  std::vector<fs::path> files;
  try {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".pdsgrid") files.push_back(entry.path());
    }
  } catch (const fs::filesystem_error& e) {
    throw pds::ConfigError("cannot read samples directory '" + dir + "': " + e.what());
  }
  if (files.empty()) {
    throw pds::ConfigError("no .pdsgrid files in '" + dir + "'");
  }
  std::sort(files.begin(), files.end());
  if (limit > 0 && static_cast<int>(files.size()) > limit) {
    files.resize(static_cast<std::size_t>(limit));
  }
  std::vector<pds::Field> out;
  out.reserve(files.size());
  for (const fs::path& f : files) out.push_back(pds::read_grid(f.string()));
  return out;
}

void write_filter(const std::string& out_path, const pds::Field& filter) {
  pds::write_grid(out_path, filter);
  std::cout << out_path << ": " << pds::describe_grid(filter) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preconditioned diffusion sampling experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* sample_cmd =
      app.add_subcommand("sample", "Run the configured samplers and write metrics CSVs");
  sample_cmd->add_option("--config", config_path, "Experiment config file")->required();
  sample_cmd->add_option("--out-dir", out_dir, "Directory for output files")->required();

  auto* bench_cmd = app.add_subcommand(
      "benchmark", "Scan iteration counts until each sampler meets the error threshold");
  bench_cmd->add_option("--config", config_path, "Experiment config file")->required();
  bench_cmd->add_option("--out-dir", out_dir, "Directory for output files")->required();

  auto* filter_cmd = app.add_subcommand("build-filter", "Construct a filter and save it");
  filter_cmd->require_subcommand(1);

  int channels = 1;
  int height = 0;
  int width = 0;
  double radius = 0.0;
  double outer_gain = 1.0;
  std::string filter_out;
  auto* parametric_cmd =
      filter_cmd->add_subcommand("parametric", "Circular low-frequency mask");
  parametric_cmd->add_option("--channels", channels, "Channels")->capture_default_str();
  parametric_cmd->add_option("--height", height, "Grid height")->required();
  parametric_cmd->add_option("--width", width, "Grid width")->required();
  parametric_cmd->add_option("--r", radius, "Mask radius")->required();
  parametric_cmd->add_option("--lambda", outer_gain, "Gain outside the mask")->required();
  parametric_cmd->add_option("--out", filter_out, "Output .pdsgrid path")->required();

  std::string samples_dir;
  double alpha = 5.0;
  int count = 200;
  auto* statistical_cmd =
      filter_cmd->add_subcommand("statistical", "Frequency filter from sample statistics");
  statistical_cmd->add_option("--samples-dir", samples_dir, "Directory of .pdsgrid samples")
      ->required();
  statistical_cmd->add_option("--alpha", alpha, "Normalization strength")->capture_default_str();
  statistical_cmd->add_option("--count", count, "Max samples to use")->capture_default_str();
  statistical_cmd->add_option("--out", filter_out, "Output .pdsgrid path")->required();

  auto* space_cmd =
      filter_cmd->add_subcommand("space", "Space filter from mean pixel intensities");
  space_cmd->add_option("--samples-dir", samples_dir, "Directory of .pdsgrid samples")
      ->required();
  space_cmd->add_option("--out", filter_out, "Output .pdsgrid path")->required();

  std::string info_path;
  auto* info_cmd = app.add_subcommand("info", "Print a grid file's shape and value range");
  info_cmd->add_option("file", info_path, "A .pdsgrid file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sample_cmd) {
      pds::run_sample(pds::load_experiment_config(config_path), out_dir);
    } else if (*bench_cmd) {
      pds::run_benchmark(pds::load_experiment_config(config_path), out_dir);
    } else if (*info_cmd) {
      try {
        std::cout << pds::describe_grid(pds::read_grid(info_path)) << "\n";
      } catch (const std::exception& e) {
        throw pds::ConfigError(e.what());
      }
    } else if (*parametric_cmd) {
      try {
        const pds::GridShape shape{channels, height, width};
        write_filter(filter_out, pds::build_parametric_r(shape, {radius, outer_gain}));
      } catch (const std::exception& e) {
        throw pds::ConfigError(e.what());
      }
    } else if (*statistical_cmd) {
      try {
        write_filter(filter_out,
                     pds::build_statistical_r(load_samples(samples_dir, count), {alpha}));
      } catch (const std::exception& e) {
        throw pds::ConfigError(e.what());
      }
    } else if (*space_cmd) {
      try {
        write_filter(filter_out, pds::build_space_a(load_samples(samples_dir, 0)));
      } catch (const std::exception& e) {
        throw pds::ConfigError(e.what());
      }
    }
  } catch (const pds::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pds::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
