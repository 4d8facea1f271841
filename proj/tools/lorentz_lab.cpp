// lorentz_lab: run scenario files or built-in recipes and write CSV + report.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lorentz/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct Job {
  std::string arg;
  std::string text;
  std::string origin;
  lorentz::ScenarioOutcome outcome;
};

bool load(Job& job) {
  std::error_code ec;
  if (fs::is_regular_file(job.arg, ec)) {
    std::ifstream in(job.arg, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in && !in.eof()) return false;
    job.text = ss.str();
    job.origin = fs::path(job.arg).stem().string();
    return true;
  }
  if (const auto* r = lorentz::find_recipe(job.arg)) {
    job.text = r->text;
    job.origin = r->name;
    return true;
  }
  return false;
}

void write_file(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  out << data;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

int run(const std::vector<std::string>& args, const std::string& out_dir, std::optional<std::uint64_t> seed,
        double tol_scale, int jobs, bool quiet) {
  std::vector<Job> work(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    work[i].arg = args[i];
    if (!load(work[i])) {
      std::cerr << "lorentz_lab: '" << args[i] << "' is neither a readable file nor a built-in recipe\n";
      return lorentz::exit_code::config_error;
    }
  }

  lorentz::RunOptions opt;
  opt.seed = seed;
  opt.tol_scale = tol_scale;
  // With one scenario the workers go to the twin trials; otherwise to the batch.
  opt.jobs = work.size() == 1 ? jobs : 1;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < work.size();)
      work[i].outcome = lorentz::run_scenario_text(work[i].text, work[i].origin, opt);
  };
  {
    std::vector<std::jthread> pool;
    const int n = std::clamp<int>(jobs, 1, static_cast<int>(work.size()));
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "lorentz_lab: cannot create " << out_dir << ": " << ec.message() << "\n";
    return lorentz::exit_code::config_error;
  }
  int worst = 0;
  for (const Job& j : work) {
    const auto& o = j.outcome;
    try {
      if (!o.csv.empty()) write_file(fs::path(out_dir) / o.csv_name, o.csv);
      write_file(fs::path(out_dir) / (o.name + ".report"), o.report());
    } catch (const std::exception& e) {
      std::cerr << "lorentz_lab: " << e.what() << "\n";
      return lorentz::exit_code::config_error;
    }
    if (!quiet) {
      if (work.size() > 1) std::cout << "[" << o.name << "]\n";
      std::cout << o.report();
    }
    if (!o.error.empty()) std::cerr << "lorentz_lab: " << o.name << ": " << o.error << "\n";
    worst = std::max(worst, o.exit_code);
  }
  return worst;
}

int recipes(const std::string& write_dir) {
  const auto& all = lorentz::builtin_recipes();
  std::size_t width = 0;
  for (const auto& r : all) width = std::max(width, r.name.size());
  for (const auto& r : all) std::cout << r.name << std::string(width + 2 - r.name.size(), ' ') << r.about << "\n";
  if (!write_dir.empty()) {
    std::error_code ec;
    fs::create_directories(write_dir, ec);
    for (const auto& r : all) write_file(fs::path(write_dir) / (r.name + ".scn"), r.text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical Lorentzian geometry lab"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run scenario files or built-in recipes");
  std::vector<std::string> inputs;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  double tol_scale = 1.0;
  int jobs = 1;
  bool quiet = false;
  run_cmd->add_option("scenarios", inputs, "Scenario files or recipe names")->required();
  run_cmd->add_option("--out", out_dir, "Directory for CSV and report files");
  run_cmd->add_option("--seed", seed, "Seed, overriding the file and LORENTZ_LAB_SEED");
  run_cmd->add_option("--tol-scale", tol_scale, "Factor applied to the integrator tolerances")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1, 256));
  run_cmd->add_flag("-q,--quiet", quiet, "Do not print reports");

  auto* rec_cmd = app.add_subcommand("recipes", "List the built-in recipes");
  std::string write_dir;
  rec_cmd->add_option("--write", write_dir, "Also write them as .scn files into this directory");

  app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return lorentz::exit_code::config_error;
  }

  try {
    if (*run_cmd) return run(inputs, out_dir, seed, tol_scale, jobs, quiet);
    if (*rec_cmd) return recipes(write_dir);
    std::cout << "lorentz_lab " << lorentz::version() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "lorentz_lab: " << e.what() << "\n";
    return lorentz::exit_code::config_error;
  }
}
