#pragma once

#include <optional>
#include <string>
#include <vector>

#include "molcp/dynamics.hpp"
#include "molcp/force.hpp"
#include "molcp/molecule.hpp"

namespace molcp {

/// Sampling grid; spacing is "linear" or "log".
struct Grid {
  double min = 0.0;
  double max = 0.0;
  int points = 0;
  bool log_spacing = true;
  std::vector<double> values() const;
};

/// How the initial internal state of the scenario is prepared.
struct StateSpec {
  enum class Kind { Ground, Boltzmann, Explicit } kind = Kind::Ground;
  std::vector<std::pair<int, double>> populations;  // level id -> p
  InternalState realize(const MoleculeSpec& spec, double T) const;
  std::string describe() const;
};

/// One batch computation: molecule + material + geometry + grids.
struct Scenario {
  std::string command;
  std::string molecule_path;
  std::optional<MoleculeSpec> molecule_holder;
  PermittivityModel material = PermittivityModel::vacuum();

  const MoleculeSpec& molecule() const { return molecule_holder.value(); }
  double temperature = 300.0;  // K
  StateSpec state;
  Grid z_grid;
  Grid time_grid{1e-3, 1e3, 61, true};
  std::optional<double> cavity_length;  // m
  QuadratureOptions quad;
  MatsubaraSettings matsubara;
  std::string output_dir = ".";
  std::vector<std::string> provenance;  // notes echoed into output headers

  HalfSpaceGeometry geometry(double z) const;
};

/// Parses a molecule file (JSON, // comments allowed):
///   { "name": ..., "levels": [{"id", "omega", "label"}],
///     "transitions": [{"from", "to", "d_re": [x,y,z], "d_im": [x,y,z]}] }
/// SI units: omega in rad/s, dipole components in C m.
MoleculeSpec load_molecule(const std::string& path);

/// Parses a material block: { "model": "drude"|"plasma"|"dielectric"|
/// "vacuum", "omega_p", "gamma", "eps_static" } (SI).
PermittivityModel parse_material_json(const std::string& json_text);

/// Parses a scenario file; `command_override` (from the CLI) wins over the
/// file's "command" key. Relative molecule paths resolve against the
/// scenario file's directory.
Scenario load_scenario(const std::string& path,
                       const std::string& command_override = "");

/// Schema/invariant check of a molecule or scenario file; returns a
/// human-readable report and sets `ok`.
std::string validate_file(const std::string& path, bool& ok);

}  // namespace molcp
