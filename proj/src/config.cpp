#include "lfvp/config.hpp"

#include "lfvp/errors.hpp"

#include <toml.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace lfvp {

using json = nlohmann::json;

namespace {

// Reads keys from one JSON object, remembering which were consumed so that
// leftovers can be reported as unknown.
class ObjectReader
{
public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path))
  {
    if (!j_.is_object())
      throw ConfigError(where() + "expected a table");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key)
  {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void get(const std::string& key, double& out)
  {
    if (!has(key))
      return;
    const auto& v = raw(key);
    if (!v.is_number())
      throw ConfigError(child(key) + ": expected a number");
    out = v.get<double>();
  }

  void get(const std::string& key, int& out)
  {
    if (!has(key))
      return;
    const auto& v = raw(key);
    if (!v.is_number_integer())
      throw ConfigError(child(key) + ": expected an integer");
    out = v.get<int>();
  }

  void get(const std::string& key, std::string& out)
  {
    if (!has(key))
      return;
    const auto& v = raw(key);
    if (!v.is_string())
      throw ConfigError(child(key) + ": expected a string");
    out = v.get<std::string>();
  }

  template <class T>
  void get(const std::string& key, std::vector<T>& out)
  {
    if (!has(key))
      return;
    const auto& v = raw(key);
    if (!v.is_array())
      throw ConfigError(child(key) + ": expected an array");
    out.clear();
    for (const auto& e : v) {
      if constexpr (std::is_integral_v<T>) {
        if (!e.is_number_integer())
          throw ConfigError(child(key) + ": expected integers");
      } else if (!e.is_number()) {
        throw ConfigError(child(key) + ": expected numbers");
      }
      out.push_back(e.get<T>());
    }
  }

  void finish() const
  {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key()))
        throw ConfigError(child(item.key()) + ": unknown key");
  }

private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

InitialProfile::Kind profile_kind_from_string(const std::string& name, const std::string& path)
{
  if (name == "maxwellian")
    return InitialProfile::Kind::maxwellian;
  if (name == "two_stream")
    return InitialProfile::Kind::two_stream;
  throw ConfigError(path + ": unknown profile kind '" + name + "' (expected maxwellian or two_stream)");
}

json toml_to_json(const toml::node& node, const std::string& path)
{
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) {
      const std::string key(k.str());
      out[key] = toml_to_json(v, path.empty() ? key : path + "." + key);
    }
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (std::size_t i = 0; i < a->size(); ++i)
      out.push_back(toml_to_json(*a->get(i), path + "[" + std::to_string(i) + "]"));
    return out;
  }
  if (const auto* v = node.as_integer())
    return json(static_cast<std::int64_t>(v->get()));
  if (const auto* v = node.as_floating_point())
    return json(v->get());
  if (const auto* v = node.as_boolean())
    return json(v->get());
  if (const auto* v = node.as_string())
    return json(v->get());
  throw ConfigError(path + ": dates and times are not supported");
}

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos)
    s += ".0";
  return s;
}

std::string toml_key(const std::string& key)
{
  const bool bare = !key.empty() && key.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"
                                                          "0123456789_-") == std::string::npos;
  return bare ? key : json(key).dump();
}

std::string toml_value(const json& v)
{
  switch (v.type()) {
  case json::value_t::number_float:
    return format_double(v.get<double>());
  case json::value_t::number_integer:
  case json::value_t::number_unsigned:
  case json::value_t::boolean:
  case json::value_t::string:
    return v.dump();
  case json::value_t::array: {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i)
      out += (i ? ", " : "") + toml_value(v[i]);
    return out + "]";
  }
  default:
    throw ConfigError("manifest: value of type " + std::string(v.type_name()) + " cannot be written as TOML");
  }
}

bool is_table_array(const json& v)
{
  return v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_object(); });
}

void emit_table(std::ostringstream& out, const json& table, const std::string& prefix)
{
  for (const auto& item : table.items())
    if (!item.value().is_object() && !is_table_array(item.value()))
      out << toml_key(item.key()) << " = " << toml_value(item.value()) << '\n';
  for (const auto& item : table.items()) {
    const std::string name = prefix.empty() ? toml_key(item.key()) : prefix + "." + toml_key(item.key());
    if (item.value().is_object()) {
      out << "\n[" << name << "]\n";
      emit_table(out, item.value(), name);
    } else if (is_table_array(item.value())) {
      for (const auto& element : item.value()) {
        out << "\n[[" << name << "]]\n";
        emit_table(out, element, name);
      }
    }
  }
}

// Locates (creating objects as needed) the JSON slot addressed by a dotted path.
// Array elements of "species" are addressed by species name or index.
json& resolve_path(json& root, const std::string& path)
{
  json* node = &root;
  std::stringstream ss(path);
  std::string token;
  while (std::getline(ss, token, '.')) {
    if (token.empty())
      throw ConfigError("override '" + path + "': empty path component");
    if (node->is_array()) {
      json* found = nullptr;
      for (auto& e : *node)
        if (e.is_object() && e.value("name", std::string{}) == token)
          found = &e;
      if (!found && !token.empty() && std::all_of(token.begin(), token.end(), ::isdigit)) {
        const std::size_t idx = std::stoul(token);
        if (idx < node->size())
          found = &(*node)[idx];
      }
      if (!found)
        throw ConfigError("override '" + path + "': no element named '" + token + "'");
      node = found;
    } else if (node->is_object()) {
      node = &(*node)[token];
    } else {
      throw ConfigError("override '" + path + "': '" + token + "' descends into a scalar");
    }
  }
  return *node;
}

} // namespace

void RunConfig::validate() const
{
  domain.validate();
  if (species.empty())
    throw ConfigError("species: at least one kinetic species is required");
  std::set<std::string> names;
  for (const auto& sc : species) {
    sc.species.validate();
    if (!names.insert(sc.species.name).second)
      throw ConfigError("species: duplicate name '" + sc.species.name + "'");
    if (!(sc.profile.alpha > 0.0))
      throw ConfigError("species '" + sc.species.name + "': profile alpha must be positive");
  }
  solver.validate();
  if (output.cadence < 1)
    throw ConfigError("output.cadence must be at least 1");
  if (output.snapshot_format != "binary" && output.snapshot_format != "csv")
    throw ConfigError("output.snapshot_format must be 'binary' or 'csv'");
  for (int k : output.field_modes)
    if (k < 1 || k > domain.n_fourier)
      throw ConfigError("output.field_modes: mode " + std::to_string(k) + " outside [1, n_fourier]");
  if (output.snapshot_nx != 0 && output.snapshot_nx < domain.n_k())
    throw ConfigError("output.snapshot_nx must be 0 or at least 2 n_fourier + 1");
  if (output.snapshot_nv == 1 || output.snapshot_nv < 0)
    throw ConfigError("output.snapshot_nv must be 0 or at least 2");
  if (output.prefix.empty())
    throw ConfigError("output.prefix must not be empty");
}

std::vector<std::string> preset_names()
{
  return {"landau", "two_stream", "ion_acoustic"};
}

RunConfig preset(const std::string& name)
{
  RunConfig c;
  c.name = name;
  c.output.prefix = name;
  c.domain.v_a = -5.0;
  c.domain.v_b = 5.0;
  c.domain.epsilon0 = 1.0;

  Species electrons;
  electrons.name = "e";
  electrons.charge = -1.0;
  electrons.mass = 1.0;
  electrons.gamma = 0.5;
  electrons.penalty_mode = PenaltyMode::skip_first_three;

  if (name == "landau") {
    c.domain.length = 2.0 * std::numbers::pi;
    c.domain.n_legendre = 201;
    c.domain.n_fourier = 25;
    c.solver.dt = 0.05;
    c.solver.t_final = 100.0;
    electrons.nu = 1.0;
    c.species.push_back({electrons, InitialProfile::maxwellian(1.0, 0.0, 1e-3, 1)});
    c.background_charge = std::nullopt;
    c.fit_window = {2.0, 20.0};
  } else if (name == "two_stream") {
    c.domain.length = 4.0 * std::numbers::pi;
    c.domain.n_legendre = 201;
    c.domain.n_fourier = 25;
    c.solver.dt = 0.01;
    c.solver.t_final = 200.0;
    electrons.nu = 1.0;
    c.species.push_back({electrons, InitialProfile::two_stream(1.0 / std::sqrt(8.0), 1.0, 1e-3, 1)});
    c.background_charge = std::nullopt;
  } else if (name == "ion_acoustic") {
    const double alpha_i = 1.0 / 135.0;
    c.domain.length = 10.0;
    c.domain.n_legendre = 101;
    c.domain.n_fourier = 25;
    c.solver.dt = 1.0;
    c.solver.t_final = 450.0;
    electrons.nu = 0.5;
    Species ions = electrons;
    ions.name = "i";
    ions.charge = 1.0;
    ions.mass = 1836.0;
    ions.v_a = -5.0 * alpha_i;
    ions.v_b = 5.0 * alpha_i;
    c.species.push_back({electrons, InitialProfile::maxwellian(1.0, 0.0, 0.0, 1)});
    c.species.push_back({ions, InitialProfile::maxwellian(alpha_i, 0.0, 0.01, 1)});
    c.background_charge = 0.0;
    c.fit_window = {20.0, 450.0};
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected landau, two_stream or ion_acoustic)");
  }
  return c;
}

json to_json(const RunConfig& c)
{
  json j;
  j["name"] = c.name;
  j["domain"] = {
      {"length", c.domain.length},     {"v_a", c.domain.v_a},           {"v_b", c.domain.v_b},
      {"n_legendre", c.domain.n_legendre}, {"n_fourier", c.domain.n_fourier}, {"epsilon0", c.domain.epsilon0},
  };
  if (c.background_charge)
    j["domain"]["background_charge"] = *c.background_charge;
  else
    j["domain"]["background_charge"] = "auto";

  j["species"] = json::array();
  for (const auto& sc : c.species) {
    const auto& s = sc.species;
    const auto& p = sc.profile;
    if (p.kind == InitialProfile::Kind::custom)
      throw ConfigError("species '" + s.name + "': custom profiles cannot be serialized");
    json e = {
        {"name", s.name}, {"charge", s.charge}, {"mass", s.mass}, {"nu", s.nu}, {"gamma", s.gamma},
        {"penalty_mode", to_string(s.penalty_mode)},
    };
    if (s.v_a)
      e["v_a"] = *s.v_a;
    if (s.v_b)
      e["v_b"] = *s.v_b;
    e["profile"] = {
        {"kind", to_string(p.kind)}, {"alpha", p.alpha},     {"drift", p.drift},
        {"density", p.density},      {"epsilon", p.epsilon}, {"wavenumber", p.wavenumber},
    };
    j["species"].push_back(e);
  }

  const auto& s = c.solver;
  j["solver"] = {
      {"dt", s.dt},
      {"t_final", s.t_final},
      {"newton_abs_tol", s.newton_abs_tol},
      {"newton_rel_tol", s.newton_rel_tol},
      {"newton_max_iters", s.newton_max_iters},
      {"gmres_rel_tol", s.gmres_rel_tol},
      {"gmres_restart", s.gmres_restart},
      {"gmres_max_iters", s.gmres_max_iters},
      {"fd_epsilon_scale", s.fd_epsilon_scale},
  };

  const auto& o = c.output;
  j["output"] = {
      {"directory", o.directory},       {"prefix", o.prefix},
      {"cadence", o.cadence},           {"field_modes", o.field_modes},
      {"snapshot_times", o.snapshot_times}, {"snapshot_format", o.snapshot_format},
      {"snapshot_nx", o.snapshot_nx},   {"snapshot_nv", o.snapshot_nv},
  };

  j["fit"] = json::object();
  if (std::isfinite(c.fit_window.from))
    j["fit"]["from"] = c.fit_window.from;
  if (std::isfinite(c.fit_window.to))
    j["fit"]["to"] = c.fit_window.to;
  return j;
}

RunConfig from_json(const json& j)
{
  RunConfig c;
  ObjectReader top(j, "");
  top.get("name", c.name);

  if (top.has("domain")) {
    ObjectReader r(top.raw("domain"), "domain");
    r.get("length", c.domain.length);
    r.get("v_a", c.domain.v_a);
    r.get("v_b", c.domain.v_b);
    r.get("n_legendre", c.domain.n_legendre);
    r.get("n_fourier", c.domain.n_fourier);
    r.get("epsilon0", c.domain.epsilon0);
    if (r.has("background_charge")) {
      const auto& b = r.raw("background_charge");
      if (b.is_string() && b.get<std::string>() == "auto")
        c.background_charge = std::nullopt;
      else if (b.is_number())
        c.background_charge = b.get<double>();
      else
        throw ConfigError("domain.background_charge: expected a number or \"auto\"");
    }
    r.finish();
  }

  if (!top.has("species"))
    throw ConfigError("species: missing (at least one [[species]] table is required)");
  const auto& list = top.raw("species");
  if (!list.is_array())
    throw ConfigError("species: expected an array of tables");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "species[" + std::to_string(i) + "]";
    ObjectReader r(list[i], path);
    SpeciesConfig sc;
    auto& s = sc.species;
    r.get("name", s.name);
    r.get("charge", s.charge);
    r.get("mass", s.mass);
    r.get("nu", s.nu);
    r.get("gamma", s.gamma);
    std::string mode = to_string(s.penalty_mode);
    r.get("penalty_mode", mode);
    try {
      s.penalty_mode = penalty_mode_from_string(mode);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ".penalty_mode: " + e.what());
    }
    if (r.has("v_a")) {
      double v = 0.0;
      r.get("v_a", v);
      s.v_a = v;
    }
    if (r.has("v_b")) {
      double v = 0.0;
      r.get("v_b", v);
      s.v_b = v;
    }
    if (r.has("profile")) {
      ObjectReader p(r.raw("profile"), path + ".profile");
      std::string kind = "maxwellian";
      p.get("kind", kind);
      sc.profile.kind = profile_kind_from_string(kind, path + ".profile.kind");
      p.get("alpha", sc.profile.alpha);
      p.get("drift", sc.profile.drift);
      p.get("density", sc.profile.density);
      p.get("epsilon", sc.profile.epsilon);
      p.get("wavenumber", sc.profile.wavenumber);
      p.finish();
    }
    r.finish();
    c.species.push_back(sc);
  }

  if (top.has("solver")) {
    ObjectReader r(top.raw("solver"), "solver");
    auto& s = c.solver;
    r.get("dt", s.dt);
    r.get("t_final", s.t_final);
    r.get("newton_abs_tol", s.newton_abs_tol);
    r.get("newton_rel_tol", s.newton_rel_tol);
    r.get("newton_max_iters", s.newton_max_iters);
    r.get("gmres_rel_tol", s.gmres_rel_tol);
    r.get("gmres_restart", s.gmres_restart);
    r.get("gmres_max_iters", s.gmres_max_iters);
    r.get("fd_epsilon_scale", s.fd_epsilon_scale);
    r.finish();
  }

  if (top.has("output")) {
    ObjectReader r(top.raw("output"), "output");
    auto& o = c.output;
    r.get("directory", o.directory);
    r.get("prefix", o.prefix);
    r.get("cadence", o.cadence);
    r.get("field_modes", o.field_modes);
    r.get("snapshot_times", o.snapshot_times);
    r.get("snapshot_format", o.snapshot_format);
    r.get("snapshot_nx", o.snapshot_nx);
    r.get("snapshot_nv", o.snapshot_nv);
    r.finish();
  }

  if (top.has("fit")) {
    ObjectReader r(top.raw("fit"), "fit");
    r.get("from", c.fit_window.from);
    r.get("to", c.fit_window.to);
    r.finish();
  }

  // Tables a manifest carries in addition to the configuration.
  if (top.has("statistics"))
    top.raw("statistics");
  if (top.has("outputs"))
    top.raw("outputs");
  top.finish();
  c.validate();
  return c;
}

RunConfig parse_toml(const std::string& text, const std::string& source_name)
{
  toml::table table;
  try {
    table = toml::parse(text, source_name);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source_name << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
        << e.description();
    throw ConfigError(msg.str());
  }
  try {
    return from_json(toml_to_json(table, ""));
  } catch (const ConfigError& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
}

RunConfig load_config(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  if (!is_json)
    return parse_toml(text, path);

  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    return from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_overrides(RunConfig& config, const std::vector<std::string>& overrides)
{
  json j = to_json(config);
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override '" + item + "': expected key=value");
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    json value;
    try {
      value = json::parse(text);
    } catch (const json::parse_error&) {
      value = text;
    }

    std::vector<std::string> paths;
    auto every_species = [&](const std::string& field) {
      for (const auto& s : j["species"])
        paths.push_back("species." + s["name"].get<std::string>() + "." + field);
    };
    if (key.find('.') != std::string::npos) {
      paths.push_back(key);
    } else if (key == "output_dir") {
      paths.push_back("output.directory");
    } else if (key == "fit_from" || key == "fit_to") {
      paths.push_back(std::string("fit.") + (key == "fit_from" ? "from" : "to"));
    } else if (key == "nu" || key == "gamma" || key == "penalty_mode") {
      every_species(key);
    } else if (key == "epsilon") {
      for (const auto& s : j["species"])
        if (s["profile"]["epsilon"].get<double>() != 0.0)
          paths.push_back("species." + s["name"].get<std::string>() + ".profile.epsilon");
      if (paths.empty())
        every_species("profile.epsilon");
    } else if (key == "ion_mass") {
      paths.push_back("species.i.mass");
    } else {
      for (const char* section : {"domain", "solver", "output"})
        if (j[section].contains(key)) {
          paths.push_back(std::string(section) + "." + key);
          break;
        }
      if (paths.empty())
        throw ConfigError("override '" + item + "': unknown key '" + key + "'");
    }
    for (const auto& p : paths)
      resolve_path(j, p) = value;
  }
  try {
    config = from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("override: ") + e.what());
  }
}

Setup build_setup(const RunConfig& config)
{
  config.validate();
  std::vector<Species> species;
  for (const auto& sc : config.species)
    species.push_back(sc.species);

  Setup setup{Plasma::build(config.domain, species, 0.0), {}};
  for (int s = 0; s < setup.plasma.n_species(); ++s) {
    try {
      setup.initial.push_back(project_initial(config.domain, setup.plasma.bases[s], config.species[s].profile));
    } catch (const ConfigError& e) {
      throw ConfigError("species '" + species[s].name + "': " + e.what());
    }
  }
  setup.plasma.background_charge =
      config.background_charge ? *config.background_charge : -net_charge(setup.plasma, setup.initial);
  poisson_solve(setup.plasma, setup.initial, NeutralityCheck::enforce);
  return setup;
}

std::string json_to_toml(const json& j)
{
  std::ostringstream out;
  emit_table(out, j, "");
  return out.str();
}

std::string manifest_toml(const RunConfig& config, const json& statistics, const json& outputs)
{
  json j = to_json(config);
  j["statistics"] = statistics;
  j["outputs"] = outputs;
  return json_to_toml(j);
}

} // namespace lfvp
