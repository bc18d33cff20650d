// Command-line driver: runs a sweep and writes the CSV and summary.
#include <fstream>
#include <iostream>

#include "eddy/errors.hpp"
#include "eddy/experiment.hpp"

int main(int argc, char** argv) {
  using namespace eddy;
  ExperimentConfig cfg;
  try {
    cfg = parse_config(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const HelpRequested& h) {
    std::cout << h.what();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  const auto rows = run_sweep(cfg, cfg.quiet ? nullptr : &std::cerr);
  try {
    if (cfg.out.empty())
      std::cout << format_csv(rows);
    else
      write_csv(rows, cfg.out);
    const Summary summary = summarize(rows);
    if (!cfg.summary.empty()) {
      std::ofstream f(cfg.summary, std::ios::binary);
      if (!f) throw InputError("cannot open '" + cfg.summary + "' for writing");
      f << summary.text() << '\n' << summary.tsv();
    } else if (!cfg.out.empty()) {
      std::cout << summary.text();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& r : rows)
    if (!r.ok()) return 1;
  return 0;
}
