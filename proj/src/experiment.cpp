#include "eddy/experiment.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "eddy/errors.hpp"

namespace eddy {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_number(const std::string& field, const char* what) {
  T v{};
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw InputError(std::string("bad ") + what + " field '" + field + "'");
  return v;
}

std::array<int, 3> parse_patches(const std::string& text) {
  std::array<int, 3> out{};
  std::stringstream in(text);
  std::string part;
  int k = 0;
  while (std::getline(in, part, 'x')) {
    if (k == 3) throw UsageError("--patches expects PxQxR");
    try {
      out[k++] = parse_number<int>(part, "patch count");
    } catch (const InputError&) {
      throw UsageError("--patches expects PxQxR, got '" + text + "'");
    }
  }
  if (k != 3) throw UsageError("--patches expects PxQxR, got '" + text + "'");
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (degrees.empty() || divs.empty() || steps.empty()) throw UsageError("deg, divs and steps must be nonempty");
  for (int p : degrees)
    if (p < 1 || p > 3) throw UsageError("degree " + std::to_string(p) + " outside {1,2,3}");
  for (int c : patches)
    if (c < 1) throw UsageError("patch counts must be positive");
  for (int d : divs) {
    if (d < 1) throw UsageError("divs must be positive");
    for (int c : patches)
      if (d % c != 0)
        throw UsageError("divs " + std::to_string(d) + " is not divisible by the patch count " + std::to_string(c));
  }
  for (int n : steps)
    if (n < 1) throw UsageError("steps must be positive");
  if (!(tol > 0.0)) throw UsageError("tol must be positive");
  if (max_iter < 1) throw UsageError("max-iter must be positive");
  if (workers < 1) throw UsageError("workers must be positive");
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  ExperimentConfig cfg;
  std::string patches = "2x1x1", mode = "ieti", order = "lex";
  CLI::App app{"Implicit Euler eddy current sweeps with a tree-cotree gauged IETI-DP solver"};
  app.set_config("--sweep", "", "key = value file; flags override its entries");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.add_option("--deg", cfg.degrees, "spline degrees")->delimiter(',');
  app.add_option("--divs", cfg.divs, "global elements per direction")->delimiter(',');
  app.add_option("--steps", cfg.steps, "time steps n_t")->delimiter(',');
  app.add_option("--patches", patches, "patch layout PxQxR");
  app.add_option("--tol", cfg.tol, "PCG tolerance");
  app.add_option("--max-iter", cfg.max_iter, "PCG iteration limit");
  app.add_option("--mode", mode, "ieti or monolithic");
  app.add_option("--tree-order", order, "lex or reversed");
  app.add_option("--out", cfg.out, "CSV output path");
  app.add_option("--summary", cfg.summary, "summary output path");
  app.add_option("--workers", cfg.workers, "threads per solve");
  app.add_flag("--quiet", cfg.quiet, "no progress log");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  cfg.patches = parse_patches(patches);
  try {
    cfg.mode = parse_solver_mode(mode);
    cfg.tree_order = parse_tree_order(order);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentRecord ExperimentRecord::failed(int deg, int divs, int steps) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {deg, divs, steps, nan, nan, nan, -1};
}

std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  std::vector<int> degrees = config.degrees, divs = config.divs, steps = config.steps;
  for (auto* v : {&degrees, &divs, &steps}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  std::vector<ExperimentRecord> rows;
  for (int p : degrees)
    for (int d : divs) {
      std::optional<Discretization> disc;
      std::string setup_error;
      try {
        DiscretizationConfig dc;
        dc.degree = p;
        dc.divs = d;
        dc.patches = config.patches;
        dc.tree_order = config.tree_order;
        disc = build_discretization(dc);
      } catch (const std::exception& e) {
        setup_error = e.what();
      }
      for (int n : steps) {
        if (!disc) {
          if (log) *log << "deg=" << p << " divs=" << d << " steps=" << n << " failed: " << setup_error << '\n';
          rows.push_back(ExperimentRecord::failed(p, d, n));
          continue;
        }
        MarchOptions opt;
        opt.steps = n;
        opt.tol = config.tol;
        opt.max_iter = config.max_iter;
        opt.mode = config.mode;
        opt.workers = config.workers;
        try {
          const MarchResult res = march(*disc, manufactured_fields(disc->material), opt);
          const ErrorReport& r = res.report;
          rows.push_back({p, d, n, r.errBa, r.errEa, r.iter, r.pri});
          if (log)
            *log << "deg=" << p << " divs=" << d << " steps=" << n << " errBa=" << r.errBa << " errEa=" << r.errEa
                 << " iter=" << r.iter << " pri=" << r.pri << '\n';
        } catch (const std::exception& e) {
          if (log) *log << "deg=" << p << " divs=" << d << " steps=" << n << " failed: " << e.what() << '\n';
          rows.push_back(ExperimentRecord::failed(p, d, n));
        }
      }
    }
  return rows;
}

std::string format_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = "deg,divs,steps,errBa,errEa,iter,pri\n";
  for (const auto& r : records) {
    out += std::to_string(r.deg) + ',' + std::to_string(r.divs) + ',' + std::to_string(r.steps) + ',' +
           shortest(r.errBa) + ',' + shortest(r.errEa) + ',' + shortest(r.iter) + ',' + std::to_string(r.pri) + '\n';
  }
  return out;
}

std::vector<ExperimentRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "deg,divs,steps,errBa,errEa,iter,pri")
    throw InputError("CSV header does not match deg,divs,steps,errBa,errEa,iter,pri");
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw InputError("CSV row with " + std::to_string(f.size()) + " fields");
    ExperimentRecord r;
    r.deg = parse_number<int>(f[0], "deg");
    r.divs = parse_number<int>(f[1], "divs");
    r.steps = parse_number<int>(f[2], "steps");
    r.errBa = parse_number<double>(f[3], "errBa");
    r.errEa = parse_number<double>(f[4], "errEa");
    r.iter = parse_number<double>(f[5], "iter");
    r.pri = parse_number<int>(f[6], "pri");
    out.push_back(r);
  }
  return out;
}

void write_csv(const std::vector<ExperimentRecord>& records, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "' for writing");
  f << format_csv(records);
  if (!f) throw InputError("writing '" + path + "' failed");
}

std::vector<ExperimentRecord> read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

Summary summarize(const std::vector<ExperimentRecord>& records) {
  Summary s;
  std::vector<ExperimentRecord> ok;
  for (const auto& r : records) {
    if (r.ok())
      ok.push_back(r);
    else
      s.notes.push_back("failed run deg=" + std::to_string(r.deg) + " divs=" + std::to_string(r.divs) +
                        " steps=" + std::to_string(r.steps) + " left out");
  }
  // (deg, fixed) -> (param, record)
  std::map<std::pair<int, int>, std::vector<const ExperimentRecord*>> by_steps, by_divs;
  for (const auto& r : ok) {
    by_steps[{r.deg, r.steps}].push_back(&r);
    by_divs[{r.deg, r.divs}].push_back(&r);
  }
  auto fit = [&](const std::vector<const ExperimentRecord*>& rows, auto param, ConvergenceEntry& e,
                 const std::string& what) {
    std::vector<double> x, b, er;
    for (const auto* r : rows) {
      x.push_back(param(*r));
      b.push_back(r->errBa);
      er.push_back(r->errEa);
    }
    e.samples = static_cast<int>(rows.size());
    try {
      e.order_b = observed_order(b, x);
      e.order_e = observed_order(er, x);
      return true;
    } catch (const InputError& err) {
      s.notes.push_back(what + ": " + err.what());
      return false;
    }
  };
  for (const auto& [key, rows] : by_steps) {
    const std::string what = "deg=" + std::to_string(key.first) + " steps=" + std::to_string(key.second);
    if (rows.size() < 2) {
      s.notes.push_back(what + ": fewer than two meshes, no order in h");
      continue;
    }
    ConvergenceEntry e{key.first, key.second};
    if (fit(rows, [](const ExperimentRecord& r) { return 1.0 / r.divs; }, e, what)) s.in_h.push_back(e);

    ScalingEntry sc{key.first, key.second, static_cast<int>(rows.size())};
    std::vector<double> inv_h, it, pri;
    for (const auto* r : rows) {
      inv_h.push_back(r->divs);
      it.push_back(r->iter);
      pri.push_back(r->pri);
    }
    try {
      sc.iter_slope = loglog_slope(it, inv_h);
    } catch (const InputError&) {
      sc.iter_slope = std::numeric_limits<double>::quiet_NaN();
      s.notes.push_back(what + ": zero iteration counts, no iteration slope");
    }
    try {
      sc.pri_slope = loglog_slope(pri, inv_h);
    } catch (const InputError&) {
      sc.pri_slope = std::numeric_limits<double>::quiet_NaN();
      s.notes.push_back(what + ": zero primal counts, no primal slope");
    }
    s.scaling.push_back(sc);
  }
  for (const auto& [key, rows] : by_divs) {
    const std::string what = "deg=" + std::to_string(key.first) + " divs=" + std::to_string(key.second);
    if (rows.size() < 2) {
      s.notes.push_back(what + ": fewer than two step counts, no order in n_t");
      continue;
    }
    ConvergenceEntry e{key.first, key.second};
    if (fit(rows, [](const ExperimentRecord& r) { return static_cast<double>(r.steps); }, e, what))
      s.in_steps.push_back(e);
  }
  return s;
}

std::string Summary::text() const {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(3);
  o << "orders in h\n  deg  steps  samples  order(errBa)  order(errEa)\n";
  for (const auto& e : in_h)
    o << "  " << e.deg << "  " << e.fixed << "  " << e.samples << "  " << e.order_b << "  " << e.order_e << '\n';
  o << "orders in n_t\n  deg  divs  samples  order(errBa)  order(errEa)\n";
  for (const auto& e : in_steps)
    o << "  " << e.deg << "  " << e.fixed << "  " << e.samples << "  " << e.order_b << "  " << e.order_e << '\n';
  o << "growth in 1/h\n  deg  steps  samples  slope(iter)  slope(pri)\n";
  for (const auto& e : scaling)
    o << "  " << e.deg << "  " << e.steps << "  " << e.samples << "  " << e.iter_slope << "  " << e.pri_slope << '\n';
  for (const auto& n : notes) o << "note: " << n << '\n';
  return o.str();
}

std::string Summary::tsv() const {
  std::ostringstream o;
  o << "# orders_h\ndeg\tsteps\tsamples\torder_errBa\torder_errEa\n";
  for (const auto& e : in_h)
    o << e.deg << '\t' << e.fixed << '\t' << e.samples << '\t' << e.order_b << '\t' << e.order_e << '\n';
  o << "\n# orders_steps\ndeg\tdivs\tsamples\torder_errBa\torder_errEa\n";
  for (const auto& e : in_steps)
    o << e.deg << '\t' << e.fixed << '\t' << e.samples << '\t' << e.order_b << '\t' << e.order_e << '\n';
  o << "\n# growth\ndeg\tsteps\tsamples\tslope_iter\tslope_pri\n";
  for (const auto& e : scaling)
    o << e.deg << '\t' << e.steps << '\t' << e.samples << '\t' << e.iter_slope << '\t' << e.pri_slope << '\n';
  return o.str();
}

}  // namespace eddy
