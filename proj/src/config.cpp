#include "molcp/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace molcp {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<double> Grid::values() const {
  if (points < 1) throw ConfigError("grid needs at least 1 point");
  if (!(min < max) && points > 1)
    throw ConfigError("grid requires min < max");
  if (log_spacing && !(min > 0.0))
    throw ConfigError("log grid requires min > 0");
  std::vector<double> v(points);
  if (points == 1) {
    v[0] = min;
    return v;
  }
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    v[i] = log_spacing ? min * std::pow(max / min, f)
                       : min + f * (max - min);
  }
  return v;
}

InternalState StateSpec::realize(const MoleculeSpec& spec, double T) const {
  switch (kind) {
    case Kind::Ground:
      return InternalState::delta(spec, spec.ground_id());
    case Kind::Boltzmann:
      return boltzmann_populations(spec, T);
    case Kind::Explicit: {
      InternalState s;
      s.p.assign(spec.size(), 0.0);
      for (const auto& [id, p] : populations)
        s.p[spec.index_of(id)] = p;
      s.validate();
      return s;
    }
  }
  throw ConfigError("unreachable state kind");
}

std::string StateSpec::describe() const {
  switch (kind) {
    case Kind::Ground:
      return "ground";
    case Kind::Boltzmann:
      return "boltzmann";
    case Kind::Explicit: {
      std::ostringstream os;
      os << "explicit{";
      for (std::size_t i = 0; i < populations.size(); ++i)
        os << (i ? ", " : "") << populations[i].first << ": "
           << populations[i].second;
      os << "}";
      return os.str();
    }
  }
  return "?";
}

HalfSpaceGeometry Scenario::geometry(double z) const {
  HalfSpaceGeometry g;
  g.z = z;
  g.material = material;
  if (cavity_length) g.cavity = CavityGeometry{*cavity_length};
  g.quad = quad;
  return g;
}

namespace {

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open file: " + path);
  try {
    return json::parse(in, nullptr, /*allow_exceptions=*/true,
                       /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

double require_number(const json& j, const std::string& key,
                      const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(ctx + ": missing or non-numeric key '" + key + "'");
  return j[key].get<double>();
}

Eigen::Vector3cd parse_dipole(const json& t, const std::string& ctx) {
  Eigen::Vector3d re = Eigen::Vector3d::Zero();
  Eigen::Vector3d im = Eigen::Vector3d::Zero();
  auto fill = [&](const char* key, Eigen::Vector3d& v) {
    if (!t.contains(key)) return;
    const json& a = t[key];
    if (!a.is_array() || a.size() != 3)
      throw ConfigError(ctx + ": '" + key + "' must be a 3-array");
    for (int i = 0; i < 3; ++i) v(i) = a[i].get<double>();
  };
  fill("d_re", re);
  fill("d_im", im);
  if ((re.array() == 0.0).all() && (im.array() == 0.0).all())
    throw ConfigError(ctx + ": transition has zero dipole vector");
  Eigen::Vector3cd d;
  for (int i = 0; i < 3; ++i) d(i) = {re(i), im(i)};
  return d;
}

MoleculeSpec molecule_from_json(const json& j, const std::string& path) {
  if (!j.contains("levels") || !j["levels"].is_array())
    throw ConfigError(path + ": molecule file needs a 'levels' array");
  if (!j.contains("transitions") || !j["transitions"].is_array())
    throw ConfigError(path + ": molecule file needs a 'transitions' array");

  std::vector<MolecularLevel> levels;
  for (const auto& l : j["levels"]) {
    MolecularLevel lv;
    lv.id = static_cast<int>(require_number(l, "id", path + " level"));
    lv.omega = require_number(l, "omega", path + " level");
    lv.label = l.value("label", std::string{});
    levels.push_back(std::move(lv));
  }
  std::vector<DipoleTransition> transitions;
  for (const auto& t : j["transitions"]) {
    DipoleTransition tr;
    tr.from = static_cast<int>(require_number(t, "from", path + " transition"));
    tr.to = static_cast<int>(require_number(t, "to", path + " transition"));
    tr.d = parse_dipole(t, path + " transition");
    transitions.push_back(std::move(tr));
  }
  return MoleculeSpec(j.value("name", std::string("molecule")),
                      std::move(levels), std::move(transitions));
}

PermittivityModel material_from_json(const json& m, const std::string& ctx) {
  const std::string model = m.value("model", std::string{});
  if (model == "vacuum") return PermittivityModel::vacuum();
  if (model == "drude")
    return PermittivityModel::drude(require_number(m, "omega_p", ctx),
                                    require_number(m, "gamma", ctx));
  if (model == "plasma")
    return PermittivityModel::plasma(require_number(m, "omega_p", ctx));
  if (model == "dielectric")
    return PermittivityModel::dielectric(require_number(m, "eps_static", ctx));
  throw ConfigError(ctx +
                    ": material 'model' must be one of drude, plasma, "
                    "dielectric, vacuum");
}

Grid grid_from_json(const json& g, const std::string& ctx) {
  Grid grid;
  grid.min = require_number(g, "min", ctx);
  grid.max = require_number(g, "max", ctx);
  grid.points = static_cast<int>(require_number(g, "points", ctx));
  const std::string spacing = g.value("spacing", std::string("log"));
  if (spacing == "log")
    grid.log_spacing = true;
  else if (spacing == "linear")
    grid.log_spacing = false;
  else
    throw ConfigError(ctx + ": spacing must be 'log' or 'linear'");
  if (grid.points < 1) throw ConfigError(ctx + ": grid needs points >= 1");
  if (grid.points > 1 && !(grid.min < grid.max))
    throw ConfigError(ctx + ": grid requires min < max");
  return grid;
}

StateSpec state_from_json(const json& s, const std::string& ctx) {
  StateSpec st;
  if (s.is_string()) {
    const std::string v = s.get<std::string>();
    if (v == "ground")
      st.kind = StateSpec::Kind::Ground;
    else if (v == "boltzmann")
      st.kind = StateSpec::Kind::Boltzmann;
    else
      throw ConfigError(ctx + ": state must be 'ground', 'boltzmann' or a "
                              "populations object");
    return st;
  }
  if (s.is_object() && s.contains("populations")) {
    st.kind = StateSpec::Kind::Explicit;
    for (const auto& [key, val] : s["populations"].items())
      st.populations.emplace_back(std::stoi(key), val.get<double>());
    return st;
  }
  throw ConfigError(ctx + ": unrecognised state specification");
}

}  // namespace

MoleculeSpec load_molecule(const std::string& path) {
  return molecule_from_json(parse_file(path), path);
}

PermittivityModel parse_material_json(const std::string& json_text) {
  try {
    return material_from_json(json::parse(json_text, nullptr, true, true),
                              "material");
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("material: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path,
                       const std::string& command_override) {
  const json j = parse_file(path);
  Scenario sc;

  sc.command = command_override.empty()
                   ? j.value("command", std::string{})
                   : command_override;
  if (sc.command.empty())
    throw ConfigError(path + ": no command given (config key 'command' or "
                             "--command flag)");

  if (!j.contains("molecule"))
    throw ConfigError(path + ": missing 'molecule' path");
  fs::path mol = j["molecule"].get<std::string>();
  if (mol.is_relative()) mol = fs::path(path).parent_path() / mol;
  sc.molecule_path = mol.string();
  sc.molecule_holder = load_molecule(sc.molecule_path);

  if (!j.contains("material"))
    throw ConfigError(path + ": missing 'material' block");
  sc.material = material_from_json(j["material"], path);

  sc.temperature = require_number(j, "temperature", path);
  if (!(sc.temperature > 0.0))
    throw ConfigError(path + ": temperature must be positive");

  if (j.contains("state")) sc.state = state_from_json(j["state"], path);

  if (!j.contains("z_grid"))
    throw ConfigError(path + ": missing 'z_grid' block");
  sc.z_grid = grid_from_json(j["z_grid"], path + " z_grid");
  if (!(sc.z_grid.min > 0.0))
    throw ConfigError(path + ": z_grid.min must be positive");

  if (j.contains("time_grid"))
    sc.time_grid = grid_from_json(j["time_grid"], path + " time_grid");

  if (j.contains("cavity"))
    sc.cavity_length = require_number(j["cavity"], "length", path + " cavity");

  if (j.contains("quad_rel_tol")) sc.quad.rel_tol = j["quad_rel_tol"];
  if (j.contains("quad_max_panels"))
    sc.quad.max_panels = j["quad_max_panels"];
  if (j.contains("matsubara_tail_rel_tol"))
    sc.matsubara.tail_rel_tol = j["matsubara_tail_rel_tol"];
  if (j.contains("matsubara_max_terms"))
    sc.matsubara.max_terms = j["matsubara_max_terms"];
  sc.matsubara.temperature = sc.temperature;

  if (j.contains("output")) sc.output_dir = j["output"].get<std::string>();

  // Free-form provenance notes from the molecule file, echoed into output.
  const json mj = parse_file(sc.molecule_path);
  if (mj.contains("source")) sc.provenance.push_back(mj["source"]);

  return sc;
}

std::string validate_file(const std::string& path, bool& ok) {
  std::ostringstream report;
  ok = true;
  json j;
  try {
    j = parse_file(path);
  } catch (const ConfigError& e) {
    ok = false;
    report << "error: " << e.what() << "\n";
    return report.str();
  }

  const bool is_molecule = j.contains("levels");
  try {
    if (is_molecule) {
      const MoleculeSpec spec = load_molecule(path);
      report << "ok: molecule '" << spec.name() << "', "
             << spec.levels().size() << " levels, "
             << spec.transitions().size() << " transitions\n";
      report << "ok: exactly one ground level (id " << spec.ground_id()
             << ")\n";
      for (const auto& t : spec.transitions()) {
        const double w = spec.transition_frequency(t);
        report << "ok: transition " << t.from << " -> " << t.to
               << ", |omega| = " << std::abs(w)
               << " rad/s, |d| = " << t.d.norm() << " C m\n";
        if (t.d.norm() > 1e-25 || std::abs(w) > 1e18) {
          ok = false;
          report << "error: transition " << t.from << " -> " << t.to
                 << " outside sane molecular ranges\n";
        }
      }
    } else {
      const Scenario sc = load_scenario(path, "components");
      report << "ok: scenario for molecule '" << sc.molecule().name()
             << "', material " << sc.material.describe() << ", T = "
             << sc.temperature << " K\n";
      report << "ok: z grid " << sc.z_grid.min << " .. " << sc.z_grid.max
             << " m, " << sc.z_grid.points << " points\n";
    }
  } catch (const std::exception& e) {
    ok = false;
    report << "error: " << e.what() << "\n";
  }
  return report.str();
}

}  // namespace molcp
