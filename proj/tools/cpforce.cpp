// cpforce: batch scenario runner for thermal Casimir-Polder forces on
// polar molecules near planar surfaces. Loads a scenario config, executes
// the named computation over the z (and time) grid, and writes CSV plus a
// gnuplot sidecar per command.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "molcp/config.hpp"
#include "molcp/dynamics.hpp"
#include "molcp/force.hpp"
#include "molcp/version.hpp"

namespace fs = std::filesystem;
using namespace molcp;

namespace {

// Grid points dispatched to a fixed-size pool; results land in index order.
template <typename Result>
std::vector<Result> parallel_map(const std::vector<double>& xs, int threads,
                                 const std::function<Result(double)>& fn) {
  std::vector<Result> out(xs.size());
  std::vector<std::string> errors(xs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= xs.size()) return;
      try {
        out[i] = fn(xs[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n = std::max(1, threads);
  std::vector<std::thread> pool;
  for (int t = 0; t < n - 1; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (!errors[i].empty())
      throw NumericsError(errors[i] + " [grid point " + std::to_string(i) +
                          ", x = " + std::to_string(xs[i]) + "]");
  return out;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const Scenario& sc,
            const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw ConfigError("cannot open output file " + path.string());
    out_ << std::setprecision(12) << std::scientific;
    out_ << "# cpforce " << kVersion << "\n";
    out_ << "# command: " << sc.command << "\n";
    out_ << "# molecule: " << sc.molecule().name() << " ("
         << sc.molecule_path << ")\n";
    for (const auto& p : sc.provenance) out_ << "# constants: " << p << "\n";
    out_ << "# material: " << sc.material.describe() << "\n";
    out_ << "# temperature: " << sc.temperature << " K\n";
    out_ << "# state: " << sc.state.describe() << "\n";
    if (sc.cavity_length) {
      out_ << "# cavity: l = " << *sc.cavity_length
           << " m, both walls of the same material\n";
      out_ << "# cavity model: reflection-coefficient substitution only "
              "(outlook-grade; no position-dependent two-wall Green "
              "tensor)\n";
    }
    out_ << "# quad_rel_tol: " << sc.quad.rel_tol
         << ", quad_max_panels: " << sc.quad.max_panels << "\n";
    out_ << "# matsubara_tail_rel_tol: " << sc.matsubara.tail_rel_tol
         << ", matsubara_max_terms: " << sc.matsubara.max_terms << "\n";
    out_ << "# sign convention: negative z-force = attraction toward the "
            "surface\n";
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out_ << "# generated: " << buf << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
  }

  void row(const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i)
      out_ << (i ? "," : "") << vals[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

void write_gnuplot(const fs::path& dir, const std::string& name,
                   const std::string& script) {
  std::ofstream gp(dir / (name + ".gp"));
  gp << "# gnuplot sidecar; run manually: gnuplot " << name << ".gp\n"
     << "set datafile separator ','\n"
     << "set logscale x\n"
     << script;
}

int run_components(const Scenario& sc, const fs::path& outdir, int threads,
                   const std::string& csv_name) {
  const std::vector<double> zs = sc.z_grid.values();
  const InternalState state =
      sc.state.realize(sc.molecule(), sc.temperature);
  const auto rows = parallel_map<ForceDecomposition>(
      zs, threads, [&](double z) {
        return force_for_mixture(sc.geometry(z), sc.molecule(), state,
                                 sc.matsubara);
      });
  CsvWriter csv(outdir / csv_name, sc,
                {"z [m]", "F_nonres [N]", "F_res_prop [N]", "F_res_evan [N]",
                 "F_total [N]"});
  for (std::size_t i = 0; i < zs.size(); ++i)
    csv.row({zs[i], rows[i].nonresonant, rows[i].resonant_propagating,
             rows[i].resonant_evanescent, rows[i].total});
  write_gnuplot(outdir, sc.command,
                "plot '" + csv_name + "' u 1:(abs($2)) w l t 'nonres', '' u "
                "1:(abs($3)) w l t 'res prop', '' u 1:(abs($4)) w l t 'res "
                "evan', '' u 1:(abs($5)) w l lw 2 t 'total'\n");
  return 0;
}

int run_force_profile(const Scenario& sc, const fs::path& outdir,
                      int threads) {
  const std::vector<double> zs = sc.z_grid.values();
  const InternalState state =
      sc.state.realize(sc.molecule(), sc.temperature);
  const auto rows = parallel_map<double>(zs, threads, [&](double z) {
    return force_for_mixture(sc.geometry(z), sc.molecule(), state,
                             sc.matsubara)
        .total;
  });
  CsvWriter csv(outdir / "force-profile.csv", sc, {"z [m]", "F_total [N]"});
  for (std::size_t i = 0; i < zs.size(); ++i) csv.row({zs[i], rows[i]});
  write_gnuplot(outdir, "force-profile",
                "plot 'force-profile.csv' u 1:(abs($2)) w l t '|F|'\n");
  return 0;
}

int run_thermal_compare(const Scenario& sc, const fs::path& outdir,
                        int threads) {
  const std::vector<double> zs = sc.z_grid.values();
  const InternalState thermal =
      boltzmann_populations(sc.molecule(), sc.temperature);
  struct Row {
    double ground, thermal, lifshitz;
  };
  const auto rows = parallel_map<Row>(zs, threads, [&](double z) {
    const HalfSpaceGeometry g = sc.geometry(z);
    Row r;
    r.ground = force_for_state(g, sc.molecule(), sc.molecule().ground_id(),
                               sc.matsubara)
                   .total;
    r.thermal = force_for_mixture(g, sc.molecule(), thermal, sc.matsubara)
                    .total;
    r.lifshitz = lifshitz_like_force(g, sc.molecule(), sc.matsubara);
    return r;
  });
  CsvWriter csv(outdir / "thermal-compare.csv", sc,
                {"z [m]", "F_ground [N]", "F_thermal [N]",
                 "F_lifshitz_like [N]", "F_thermal/F_lifshitz_like [1]"});
  for (std::size_t i = 0; i < zs.size(); ++i)
    csv.row({zs[i], rows[i].ground, rows[i].thermal, rows[i].lifshitz,
             rows[i].lifshitz != 0.0 ? rows[i].thermal / rows[i].lifshitz
                                     : 0.0});
  write_gnuplot(outdir, "thermal-compare",
                "plot 'thermal-compare.csv' u 1:(abs($2)) w l t 'ground', '' "
                "u 1:(abs($3)) w l t 'thermal', '' u 1:(abs($4)) w l t "
                "'Lifshitz-like'\n");
  return 0;
}

int run_rates(const Scenario& sc, const fs::path& outdir, int threads) {
  const std::vector<double> zs = sc.z_grid.values();
  const auto& spec = sc.molecule();
  const auto rows = parallel_map<RateMatrix>(zs, threads, [&](double z) {
    return transition_rates(sc.geometry(z), spec, sc.temperature);
  });
  std::vector<std::string> cols{"z [m]"};
  std::vector<std::pair<int, int>> pairs;
  for (const auto& t : spec.transitions()) {
    const double w = spec.transition_frequency(t);
    const int up = w > 0.0 ? t.to : t.from;
    const int lo = w > 0.0 ? t.from : t.to;
    pairs.emplace_back(spec.index_of(lo), spec.index_of(up));
    const auto name = [&](int idx) {
      const auto& lv = spec.levels()[idx];
      return lv.label.empty() ? std::to_string(lv.id) : lv.label;
    };
    cols.push_back("Gamma " + name(pairs.back().first) + "->" +
                   name(pairs.back().second) + " [1/s]");
    cols.push_back("Gamma " + name(pairs.back().second) + "->" +
                   name(pairs.back().first) + " [1/s]");
  }
  CsvWriter csv(outdir / "rates.csv", sc, cols);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    std::vector<double> vals{zs[i]};
    for (const auto& [lo, up] : pairs) {
      vals.push_back(rows[i].gamma(lo, up));  // absorption, lower -> upper
      vals.push_back(rows[i].gamma(up, lo));  // emission
    }
    csv.row(vals);
  }
  write_gnuplot(outdir, "rates",
                "plot for [c=2:*] 'rates.csv' u 1:c w l t columnhead(c)\n");
  return 0;
}

int run_dynamics(const Scenario& sc, const fs::path& outdir, int threads) {
  const std::vector<double> zs = sc.z_grid.values();
  const std::vector<double> ts = sc.time_grid.values();
  const auto& spec = sc.molecule();
  const InternalState initial = sc.state.realize(spec, sc.temperature);
  const auto rows = parallel_map<Trajectory>(zs, threads, [&](double z) {
    return transient_force(sc.geometry(z), spec, initial, sc.temperature, ts,
                           sc.matsubara);
  });

  std::vector<std::string> pcols{"z [m]", "t [s]"};
  for (const auto& lv : spec.levels())
    pcols.push_back("p(" + (lv.label.empty() ? std::to_string(lv.id)
                                             : lv.label) + ") [1]");
  CsvWriter pops(outdir / "dynamics_populations.csv", sc, pcols);
  CsvWriter force(outdir / "dynamics_force.csv", sc,
                  {"z [m]", "t [s]", "F_total [N]", "F_nonres [N]",
                   "F_res_prop [N]", "F_res_evan [N]"});
  for (std::size_t i = 0; i < zs.size(); ++i) {
    for (std::size_t j = 0; j < ts.size(); ++j) {
      std::vector<double> vals{zs[i], ts[j]};
      for (double p : rows[i].states[j].p) vals.push_back(p);
      pops.row(vals);
      const auto& f = rows[i].forces[j];
      force.row({zs[i], ts[j], f.total, f.nonresonant,
                 f.resonant_propagating, f.resonant_evanescent});
    }
  }
  write_gnuplot(outdir, "dynamics",
                "plot for [c=3:*] 'dynamics_populations.csv' u 2:c w l t "
                "columnhead(c)\n");
  return 0;
}

int run_asymptotes(const Scenario& sc, const fs::path& outdir, int threads) {
  const std::vector<double> zs = sc.z_grid.values();
  const auto& spec = sc.molecule();
  const int ground = spec.ground_id();
  struct Row {
    double full, nr, ret, retc;
  };
  const auto rows = parallel_map<Row>(zs, threads, [&](double z) {
    const HalfSpaceGeometry g = sc.geometry(z);
    Row r;
    r.full = force_for_state(g, spec, ground, sc.matsubara).total;
    r.nr = asymptote_nonretarded(g, spec, ground, sc.temperature);
    r.ret = asymptote_retarded(g, spec, ground, sc.temperature);
    r.retc = asymptote_retarded_conductor(g, spec, ground, sc.temperature);
    return r;
  });
  CsvWriter csv(outdir / "asymptotes.csv", sc,
                {"z [m]", "F_full [N]", "F_nonretarded [N]", "F_retarded [N]",
                 "F_retarded_conductor [N]"});
  for (std::size_t i = 0; i < zs.size(); ++i)
    csv.row({zs[i], rows[i].full, rows[i].nr, rows[i].ret, rows[i].retc});
  write_gnuplot(outdir, "asymptotes",
                "plot for [c=2:*] 'asymptotes.csv' u 1:(abs(column(c))) w l "
                "t columnhead(c)\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermal Casimir-Polder forces on polar molecules near "
               "planar surfaces"};
  std::string config_path, command, out_dir;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  double quad_tol = -1.0, matsubara_tol = -1.0;

  app.add_option("--config", config_path, "scenario config file (JSON)")
      ->required();
  app.add_option("--command", command,
                 "force-profile | components | thermal-compare | dynamics | "
                 "rates | asymptotes | cavity | validate (overrides the "
                 "config's 'command')");
  app.add_option("--out", out_dir, "output directory (default: config key "
                                   "'output' or '.')");
  app.add_option("--threads", threads, "worker pool size for grid sweeps");
  app.add_option("--quad-tol", quad_tol,
                 "quadrature relative tolerance override");
  app.add_option("--matsubara-tol", matsubara_tol,
                 "Matsubara tail relative tolerance override");
  CLI11_PARSE(app, argc, argv);

  try {
    // validate mode: the flag, or the config file's own "command" key
    std::string file_command;
    if (command.empty()) {
      std::ifstream in(config_path);
      if (in) {
        try {
          const auto j = nlohmann::json::parse(
              in, nullptr, /*allow_exceptions=*/true,
              /*ignore_comments=*/true);
          file_command = j.value("command", std::string{});
        } catch (const nlohmann::json::parse_error&) {
          // malformed files get their diagnostics from load_scenario below
        }
      }
    }
    if (command == "validate" || file_command == "validate") {
      bool ok = false;
      std::cout << validate_file(config_path, ok);
      return ok ? 0 : 2;
    }

    Scenario sc = load_scenario(config_path, command);
    if (quad_tol > 0.0) sc.quad.rel_tol = quad_tol;
    if (matsubara_tol > 0.0) sc.matsubara.tail_rel_tol = matsubara_tol;
    if (!out_dir.empty()) sc.output_dir = out_dir;

    const fs::path outdir(sc.output_dir);
    fs::create_directories(outdir);

    if (sc.command == "cavity" && !sc.cavity_length)
      throw ConfigError("cavity command needs a 'cavity' block with 'length'");
    if (sc.command != "cavity") sc.cavity_length.reset();

    if (sc.command == "components")
      return run_components(sc, outdir, threads, "components.csv");
    if (sc.command == "cavity")
      return run_components(sc, outdir, threads, "cavity.csv");
    if (sc.command == "force-profile")
      return run_force_profile(sc, outdir, threads);
    if (sc.command == "thermal-compare")
      return run_thermal_compare(sc, outdir, threads);
    if (sc.command == "rates") return run_rates(sc, outdir, threads);
    if (sc.command == "dynamics") return run_dynamics(sc, outdir, threads);
    if (sc.command == "asymptotes") return run_asymptotes(sc, outdir, threads);
    throw ConfigError("unknown command '" + sc.command + "'");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericsError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
