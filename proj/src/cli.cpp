// Copyright 2026 The pdq Authors
// SPDX-License-Identifier: Apache-2.0
#include "pdq/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "pdq/analysis.hpp"
#include "pdq/dc.hpp"
#include "pdq/dmet.hpp"
#include "pdq/errors.hpp"
#include "pdq/fmo.hpp"
#include "pdq/mean_field.hpp"
#include "pdq/solvers.hpp"

namespace pdq::cli {

namespace {

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string join(const std::vector<double>& v, int digits = 12) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + num(v[i], digits);
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

struct Common {
  std::string input;
  std::string output;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct SolverArgs {
  std::string solver = "fci";
  long shots = 0;
  std::string ansatz = "qubit_excitation";
  int layers = 1;
  std::string optimizer;  // default picked from shots
  int max_evals = 20000;
  double f_tol = 1e-7;
  double penalty = 1.0;
};

struct FragmentArgs {
  std::string fragments;
  int fragment_size = 2;
};

void add_solver_options(CLI::App* sub, SolverArgs& a, const std::string& default_solver) {
  a.solver = default_solver;
  sub->add_option("--solver", a.solver, "fragment solver: fci or vqe" +
                                            std::string(default_solver == "none" ? " or none" : ""))
      ->capture_default_str();
  sub->add_option("--shots", a.shots, "shots per Pauli term (0 = exact expectations)")->capture_default_str();
  sub->add_option("--ansatz", a.ansatz, "qubit_excitation or hardware_efficient")->capture_default_str();
  sub->add_option("--layers", a.layers, "ansatz layers")->capture_default_str();
  sub->add_option("--optimizer", a.optimizer, "nelder_mead or spsa (default: spsa when sampling)");
  sub->add_option("--max-evals", a.max_evals, "VQE energy evaluation budget")->capture_default_str();
  sub->add_option("--f-tol", a.f_tol, "VQE energy convergence tolerance (hartree)")->capture_default_str();
  sub->add_option("--number-penalty", a.penalty, "weight of the (N - n)^2 penalty")->capture_default_str();
}

void add_fragment_options(CLI::App* sub, FragmentArgs& f) {
  sub->add_option("--fragments", f.fragments, "orbital sets, e.g. \"0,1;2,3\" (overrides --fragment-size)");
  sub->add_option("--fragment-size", f.fragment_size, "consecutive orbitals per fragment")->capture_default_str();
}

std::optional<FragmentSolverOptions> solver_options(const SolverArgs& a, std::uint64_t seed) {
  if (a.solver == "none") return std::nullopt;
  FragmentSolverOptions o;
  try {
    o.kind = parse_solver_kind(a.solver);
    o.ansatz = parse_ansatz_kind(a.ansatz);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.shots < 0) throw UsageError("--shots must be >= 0");
  if (a.layers < 1) throw UsageError("--layers must be >= 1");
  o.ansatz_layers = a.layers;
  o.number_penalty = a.penalty;
  o.vqe.max_evals = a.max_evals;
  o.vqe.f_tol = a.f_tol;
  o.vqe.seed = seed;
  o.sampling = a.shots > 0 ? SamplingPlan::shots(a.shots, seed) : SamplingPlan::exact();
  const std::string opt = a.optimizer.empty() ? (a.shots > 0 ? "spsa" : "nelder_mead") : a.optimizer;
  if (opt == "nelder_mead" || opt == "nm")
    o.vqe.optimizer = Optimizer::NelderMead;
  else if (opt == "spsa")
    o.vqe.optimizer = Optimizer::Spsa;
  else
    throw UsageError("unknown optimizer '" + opt + "'");
  return o;
}

FragmentSpec fragment_spec(const FragmentArgs& f, int n_orb) {
  FragmentSpec spec;
  try {
    spec = f.fragments.empty() ? FragmentSpec::blocks(n_orb, f.fragment_size)
                               : FragmentSpec{parse_fragments(f.fragments)};
    spec.validate(n_orb);
  } catch (const DimensionError& e) {
    throw UsageError(std::string("fragments: ") + e.what());
  }
  return spec;
}

IntegralSet load(const Common& c) {
  if (c.input.empty()) throw UsageError("--input is required");
  return read_fcidump_file(c.input);
}

// Writes to --output when given, else to `out`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void warn(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

// ---- subcommands ----

struct ScfArgs {
  int max_iter = 500;
  double density_tol = 1e-10;
  double level_shift = 0.0;
};

void cmd_scf(const Common& c, const ScfArgs& a, std::ostream& out) {
  const auto s = load(c);
  const auto r = run_rhf(s, {a.max_iter, a.density_tol, a.level_shift});
  Sink sink(c.output, out);
  *sink << "energy,iterations,converged\n" << num(r.total_energy) << ',' << r.iterations << ',' << r.converged << '\n';
}

struct DmetArgs {
  FragmentArgs frag;
  SolverArgs solver;
  double mu_tol = 1e-6;
  double mu_bracket = 0.1;
  int max_mu_iter = 60;
};

DmetOptions dmet_options(const DmetArgs& a) {
  DmetOptions o;
  o.mu_tol_electrons = a.mu_tol;
  o.mu_bracket = a.mu_bracket;
  o.max_mu_iter = a.max_mu_iter;
  return o;
}

void cmd_dmet(const Common& c, const DmetArgs& a, std::ostream& out, std::ostream& err) {
  const auto s = load(c);
  const auto spec = fragment_spec(a.frag, s.n_orb());
  const auto solver = *solver_options(a.solver, c.seed);
  const auto r = solve_single_shot(s, spec, solver, dmet_options(a));
  warn(err, r.warnings);
  Sink sink(c.output, out);
  *sink << "total_energy,mu_star,total_electrons,mu_iterations,solver,converged,fragment_energies,fragment_electrons\n"
        << num(r.total_energy) << ',' << num(r.mu_star) << ',' << num(r.total_electrons) << ',' << r.mu_iterations
        << ',' << to_string(r.solver) << ',' << r.converged << ',' << join(r.fragment_energies) << ','
        << join(r.fragment_electrons) << '\n';
}

struct FmoArgs {
  FragmentArgs frag;
  SolverArgs solver;
  double scc_tol = 1e-6;
  int max_scc_iter = 100;
};

void cmd_fmo(const Common& c, const FmoArgs& a, std::ostream& out, std::ostream& err) {
  const auto s = load(c);
  const auto spec = fragment_spec(a.frag, s.n_orb());
  const auto solver = solver_options(a.solver, c.seed);
  const auto r = run_fmo(s, spec, {a.scc_tol, a.max_scc_iter}, solver);
  warn(err, r.state.warnings);
  Sink sink(c.output, out);
  auto corr = [&](auto get) { return r.correlation ? num(get(*r.correlation)) : std::string(); };
  *sink << "term,i,j,energy,correction,correlation\n";
  for (std::size_t i = 0; i < spec.size(); ++i)
    *sink << "monomer," << i << ",," << num(r.state.monomer_energies[i]) << ",,"
          << corr([&](const FmoCorrelation& x) { return x.monomer_corr[i]; }) << '\n';
  double total_correction = 0.0;
  for (const auto& [key, e] : r.state.dimer_energies) {
    const double corr_ij = r.pair_corrections.at(key);
    total_correction += corr_ij;
    *sink << "dimer," << key.first << ',' << key.second << ',' << num(e) << ',' << num(corr_ij) << ','
          << corr([&](const FmoCorrelation& x) { return x.dimer_corr.at(key); }) << '\n';
  }
  *sink << "total,,," << num(r.total_energy) << ',' << num(total_correction) << ','
        << (r.correlation ? num(r.correlation_energy) : std::string()) << '\n';
}

struct DcArgs {
  FragmentArgs frag;
  SolverArgs solver;
  int buffer_k = 1;
  bool ring = false;
  std::string buffers;
  double beta = 1000.0;
  double outer_tol = 1e-8;
  int max_outer = 200;
};

std::vector<DcSubsystem> dc_subsystems(const DcArgs& a, const FragmentSpec& spec) {
  if (a.buffers.empty()) return k_neighbor_subsystems(spec.fragments, a.buffer_k, a.ring);
  // explicit buffers: one orbital list per fragment, '|' separated, may be empty
  std::vector<DcSubsystem> subs;
  std::stringstream ss(a.buffers);
  std::string part;
  std::size_t i = 0;
  while (std::getline(ss, part, '|')) {
    if (i >= spec.size()) throw UsageError("--buffers has more entries than fragments");
    const auto sets = trim(part).empty() ? std::vector<OrbitalSet>{} : parse_fragments(part);
    OrbitalSet buf;
    for (const auto& s : sets) buf.insert(buf.end(), s.begin(), s.end());
    subs.push_back({spec.fragments[i++], buf});
  }
  if (subs.size() != spec.size()) throw UsageError("--buffers needs one entry per fragment");
  return subs;
}

void cmd_dc(const Common& c, const DcArgs& a, std::ostream& out, std::ostream& err) {
  const auto s = load(c);
  const auto spec = fragment_spec(a.frag, s.n_orb());
  const auto subs = dc_subsystems(a, spec);
  for (const auto& sub : subs) {
    try {
      partition_matrix(sub, s.n_orb());
    } catch (const DimensionError& e) {
      throw UsageError(std::string("buffers: ") + e.what());
    }
  }
  const auto solver = solver_options(a.solver, c.seed);
  const auto r = dc_scf_loop(s, subs, {a.beta, a.outer_tol, a.max_outer});
  if (!r.converged) warn(err, {"divide-and-conquer SCF did not converge"});
  std::string corr;
  if (solver) corr = join(dc_subsystem_correlation(s, subs, r.density, *solver));
  Sink sink(c.output, out);
  *sink << "energy,fermi_level,outer_iterations,converged,trace,subsystem_correlation_nonadditive\n"
        << num(r.mean_field_energy) << ',' << num(r.fermi_level) << ',' << r.outer_iterations << ',' << r.converged
        << ',' << num(r.density.trace()) << ',' << corr << '\n';
}

void cmd_vqe(const Common& c, const SolverArgs& a, std::ostream& out) {
  const auto s = load(c);
  SolverArgs args = a;
  args.solver = "vqe";
  const auto opts = *solver_options(args, c.seed);
  const auto r = run_molecular_vqe(s, opts);
  const double fci = fci_ground_state(s, s.n_elec()).energy;
  Sink sink(c.output, out);
  *sink << "energy,fci_energy,error,evaluations,converged,n_qubits,n_parameters\n"
        << num(r.energy) << ',' << num(fci) << ',' << num(r.energy - fci, 6) << ',' << r.vqe.evaluations << ','
        << r.vqe.converged << ',' << r.n_qubits << ',' << r.n_parameters << '\n';
}

struct RankArgs {
  std::string method = "dmet";
  std::string metrics;
  FragmentArgs frag;
  SolverArgs solver;
  DmetArgs dmet;
  DcArgs dc;
};

struct ManifestEntry {
  std::string id, path;
};

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path);
  const auto base = std::filesystem::path(path).parent_path();
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(lineno, "manifest rows are 'id,fcidump_path'");
    const std::string id = trim(line.substr(0, comma)), file = trim(line.substr(comma + 1));
    if (!header) {
      header = true;
      if (id == "id") continue;
    }
    const std::filesystem::path p(file);
    out.push_back({id, (p.is_absolute() ? p : base / p).string()});
  }
  if (out.empty()) throw ParseError(lineno, "manifest has no entries");
  return out;
}

void cmd_rank(const Common& c, const RankArgs& a, std::ostream& out, std::ostream& err) {
  if (c.input.empty()) throw UsageError("--input (manifest) is required");
  if (a.method != "dmet" && a.method != "fmo" && a.method != "dc" && a.method != "fci")
    throw UsageError("unknown method '" + a.method + "' (expected dmet, fmo, dc or fci)");
  if (c.jobs < 1) throw UsageError("--jobs must be >= 1");
  const auto solver = solver_options(a.solver, c.seed);
  if (!solver && a.method != "dc") throw UsageError("--solver none is only valid with method dc");
  const auto manifest = read_manifest(c.input);

  const int n = static_cast<int>(manifest.size());
  std::vector<ConformerRecord> records(n);
  std::vector<int> pd_qubits(n, 0), full_qubits(n, 0);
  std::vector<std::vector<std::string>> warnings(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for num_threads(c.jobs) schedule(dynamic)
  for (int k = 0; k < n; ++k) {
    try {
      const auto s = read_fcidump_file(manifest[k].path);
      const auto spec = fragment_spec(a.frag, s.n_orb());
      ConformerRecord& r = records[k];
      r.id = manifest[k].id;
      r.e_exact = fci_ground_state(s, s.n_elec()).energy;
      full_qubits[k] = 2 * s.n_orb();
      if (a.method == "fci") {
        r.e_pd = solve_ground_state(s, *solver).energy;
        pd_qubits[k] = 2 * s.n_orb();
      } else if (a.method == "dmet") {
        const auto d = solve_single_shot(s, spec, *solver, dmet_options(a.dmet));
        r.e_pd = d.total_energy;
        pd_qubits[k] = 2 * *std::max_element(d.embedding_sizes.begin(), d.embedding_sizes.end());
        warnings[k] = d.warnings;
      } else if (a.method == "fmo") {
        const auto f = run_fmo(s, spec, {}, solver);
        r.e_pd = f.total_energy + f.correlation_energy;
        pd_qubits[k] = 2 * f.max_subproblem_orbitals;
        warnings[k] = f.state.warnings;
      } else {
        const auto d = dc_scf_loop(s, dc_subsystems(a.dc, spec), {a.dc.beta, a.dc.outer_tol, a.dc.max_outer});
        r.e_pd = d.mean_field_energy;
        pd_qubits[k] = 2 * d.max_subsystem_orbitals;
        if (!d.converged) warnings[k].push_back("divide-and-conquer SCF did not converge");
      }
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (int k = 0; k < n; ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    for (const auto& w : warnings[k]) err << "warning: " << records[k].id << ": " << w << '\n';
  }

  const auto ratio = qubit_ratio(*std::max_element(pd_qubits.begin(), pd_qubits.end()),
                                 *std::max_element(full_qubits.begin(), full_qubits.end()));
  const auto metrics = compute_metrics(records, ratio);
  Sink sink(c.output, out);
  write_records_csv(*sink, records);
  if (a.metrics.empty()) {
    *sink << '\n';
    write_metrics_csv(*sink, metrics);
  } else {
    std::ofstream m(a.metrics);
    if (!m) throw std::runtime_error("cannot write " + a.metrics);
    write_metrics_csv(m, metrics);
  }
}

struct NoiseArgs {
  std::vector<double> sigmas{0.001, 0.002, 0.005, 0.01, 0.02};
  long n_bootstrap = 20000;
};

void cmd_sample_noise(const Common& c, const NoiseArgs& a, std::ostream& out) {
  if (c.input.empty()) throw UsageError("--input (records CSV) is required");
  if (a.n_bootstrap < 1) throw UsageError("--n-bootstrap must be >= 1");
  for (double s : a.sigmas)
    if (!(s >= 0.0)) throw UsageError("sigmas must be non-negative");
  const auto records = read_records_csv(c.input);
  if (records.size() < 3) throw UsageError("noise sweep needs at least 3 records");
  const auto sweep = bootstrap_noise_sweep(records, a.sigmas, a.n_bootstrap, c.seed);
  Sink sink(c.output, out);
  write_sweep_csv(*sink, sweep);
}

}  // namespace

std::vector<OrbitalSet> parse_fragments(const std::string& text) {
  std::vector<OrbitalSet> out;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    OrbitalSet f;
    std::stringstream items(group);
    std::string item;
    while (std::getline(items, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        std::size_t used = 0;
        const auto dash = item.find('-', 1);
        if (dash == std::string::npos) {
          f.push_back(std::stoi(item, &used));
          if (used != item.size()) throw std::invalid_argument(item);
        } else {
          const int lo = std::stoi(item.substr(0, dash)), hi = std::stoi(item.substr(dash + 1), &used);
          if (used != item.size() - dash - 1 || hi < lo) throw std::invalid_argument(item);
          for (int p = lo; p <= hi; ++p) f.push_back(p);
        }
      } catch (const std::exception&) {
        throw DimensionError("bad orbital list '" + trim(group) + "'");
      }
    }
    if (f.empty()) throw DimensionError("empty fragment in '" + text + "'");
    out.push_back(f);
  }
  if (out.empty()) throw DimensionError("no fragments given");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Problem-decomposition energies (DMET, FMO, divide-and-conquer) with FCI or simulated VQE solvers"};
  app.name("pdq");
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI file; [section] per subcommand, flags override it");

  Common common;
  app.add_option("--input", common.input, "FCIDUMP file (rank: manifest CSV, sample-noise: records CSV)");
  app.add_option("--output", common.output, "output CSV path (default stdout)");
  app.add_option("--seed", common.seed, "RNG seed")->capture_default_str();
  app.add_option("--jobs", common.jobs, "parallel conformers for rank")->capture_default_str();

  ScfArgs scf;
  auto* scf_cmd = app.add_subcommand("scf", "restricted Hartree-Fock");
  scf_cmd->add_option("--max-iter", scf.max_iter)->capture_default_str();
  scf_cmd->add_option("--density-tol", scf.density_tol)->capture_default_str();
  scf_cmd->add_option("--level-shift", scf.level_shift)->capture_default_str();

  DmetArgs dmet;
  auto* dmet_cmd = app.add_subcommand("dmet", "single-shot density matrix embedding");
  add_fragment_options(dmet_cmd, dmet.frag);
  add_solver_options(dmet_cmd, dmet.solver, "fci");
  dmet_cmd->add_option("--mu-tol", dmet.mu_tol, "electron-count tolerance")->capture_default_str();
  dmet_cmd->add_option("--mu-bracket", dmet.mu_bracket, "initial chemical potential bracket half-width")
      ->capture_default_str();
  dmet_cmd->add_option("--max-mu-iter", dmet.max_mu_iter)->capture_default_str();

  FmoArgs fmo;
  auto* fmo_cmd = app.add_subcommand("fmo", "fragment molecular orbital energies");
  add_fragment_options(fmo_cmd, fmo.frag);
  add_solver_options(fmo_cmd, fmo.solver, "fci");
  fmo_cmd->add_option("--scc-tol", fmo.scc_tol)->capture_default_str();
  fmo_cmd->add_option("--max-scc-iter", fmo.max_scc_iter)->capture_default_str();

  DcArgs dc;
  auto* dc_cmd = app.add_subcommand("dc", "divide-and-conquer mean field");
  add_fragment_options(dc_cmd, dc.frag);
  add_solver_options(dc_cmd, dc.solver, "none");
  dc_cmd->add_option("--buffer-k", dc.buffer_k, "buffer = k neighbouring fragments on each side")
      ->capture_default_str();
  dc_cmd->add_flag("--ring", dc.ring, "fragments wrap around for --buffer-k");
  dc_cmd->add_option("--buffers", dc.buffers, "explicit buffers per fragment, '|' separated, e.g. \"2,3|0,1\"");
  dc_cmd->add_option("--beta", dc.beta, "inverse smearing temperature (1/hartree)")->capture_default_str();
  dc_cmd->add_option("--outer-tol", dc.outer_tol)->capture_default_str();
  dc_cmd->add_option("--max-outer", dc.max_outer)->capture_default_str();

  SolverArgs vqe;
  auto* vqe_cmd = app.add_subcommand("vqe", "VQE on the whole problem");
  add_solver_options(vqe_cmd, vqe, "vqe");

  RankArgs rank;
  auto* rank_cmd = app.add_subcommand("rank", "PD vs FCI over a conformer manifest");
  rank_cmd->add_option("--method", rank.method, "dmet, fmo, dc or fci")->capture_default_str();
  rank_cmd->add_option("--metrics", rank.metrics, "metrics CSV path (default: after the records)");
  add_fragment_options(rank_cmd, rank.frag);
  add_solver_options(rank_cmd, rank.solver, "fci");
  rank_cmd->add_option("--mu-tol", rank.dmet.mu_tol)->capture_default_str();
  rank_cmd->add_option("--buffer-k", rank.dc.buffer_k)->capture_default_str();
  rank_cmd->add_flag("--ring", rank.dc.ring);
  rank_cmd->add_option("--beta", rank.dc.beta)->capture_default_str();

  NoiseArgs noise;
  auto* noise_cmd = app.add_subcommand("sample-noise", "bootstrap correlation sweep over noise levels");
  noise_cmd->add_option("--sigmas", noise.sigmas, "comma-separated noise levels (hartree)")
      ->delimiter(',')
      ->capture_default_str();
  noise_cmd->add_option("--n-bootstrap", noise.n_bootstrap)->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*scf_cmd) cmd_scf(common, scf, out);
    if (*dmet_cmd) cmd_dmet(common, dmet, out, err);
    if (*fmo_cmd) cmd_fmo(common, fmo, out, err);
    if (*dc_cmd) cmd_dc(common, dc, out, err);
    if (*vqe_cmd) cmd_vqe(common, vqe, out);
    if (*rank_cmd) {
      rank.dmet.frag = rank.frag;
      cmd_rank(common, rank, out, err);
    }
    if (*noise_cmd) cmd_sample_noise(common, noise, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace pdq::cli
