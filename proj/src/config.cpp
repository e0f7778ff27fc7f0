#include "mtfe/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "mtfe/error.hpp"

namespace mtfe {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw SolverError(ErrorCode::ConfigError, msg); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  if (s.empty()) fail("empty number for '" + key + "'");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) fail("bad number '" + s + "' for '" + key + "'");
  return v;
}

int parse_int(const std::string& s, const std::string& key) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) fail("bad integer '" + s + "' for '" + key + "'");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true") return true;
  if (s == "false") return false;
  fail("bad boolean '" + s + "' for '" + key + "'");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string reaction_str(const Reaction& r) {
  if (r.terms.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < r.terms.size(); ++i) {
    if (i) out += "; ";
    out += format_double(r.terms[i].coef);
    for (const auto& [var, p] : r.terms[i].factors) {
      out += "*" + var;
      if (p != 1) out += "^" + std::to_string(p);
    }
  }
  return out;
}

Reaction parse_reaction(const std::string& s, const std::string& key) {
  Reaction r;
  if (s == "none") return r;
  for (const auto& term : split(s, ';')) {
    const auto parts = split(term, '*');
    if (parts.empty()) fail("empty term in '" + key + "'");
    Monomial m;
    m.coef = parse_double(parts[0], key);
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto caret = parts[i].find('^');
      if (caret == std::string::npos) {
        m.factors.emplace_back(parts[i], 1);
      } else {
        m.factors.emplace_back(trim(parts[i].substr(0, caret)), parse_int(trim(parts[i].substr(caret + 1)), key));
      }
    }
    r.terms.push_back(std::move(m));
  }
  return r;
}

const char* shape_name(ProfileShape s) {
  switch (s) {
    case ProfileShape::Constant: return "constant";
    case ProfileShape::Gaussian: return "gaussian";
    case ProfileShape::Logistic: return "logistic";
  }
  return "constant";
}

std::string profile_str(const Profile& p) {
  return std::string(shape_name(p.shape)) + " " + format_double(p.offset) + " " + format_double(p.amplitude) + " " +
         format_double(p.param);
}

Profile parse_profile(const std::string& s, const std::string& key) {
  const auto parts = split(s, ' ');
  if (parts.size() != 4) fail("profile '" + key + "' needs: shape offset amplitude param");
  Profile p;
  if (parts[0] == "constant") p.shape = ProfileShape::Constant;
  else if (parts[0] == "gaussian") p.shape = ProfileShape::Gaussian;
  else if (parts[0] == "logistic") p.shape = ProfileShape::Logistic;
  else fail("unknown profile shape '" + parts[0] + "'");
  p.offset = parse_double(parts[1], key);
  p.amplitude = parse_double(parts[2], key);
  p.param = parse_double(parts[3], key);
  return p;
}

std::string list_str(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

const char* kind_name(DiffusionKind k) {
  switch (k) {
    case DiffusionKind::Linear: return "linear";
    case DiffusionKind::PowerLaw: return "power_law";
    case DiffusionKind::VolumeFilling: return "volume_filling";
  }
  return "linear";
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_config(const ModelSpec& s) {
  std::ostringstream o;
  o << "name = " << s.name << "\n";
  o << "whole_line = " << bool_str(s.whole_line) << "\n";
  o << "a = " << format_double(s.a) << "\n";
  o << "b = " << format_double(s.b) << "\n";
  o << "diffusion.kind = " << kind_name(s.diffusion.kind) << "\n";
  o << "diffusion.D = " << format_double(s.diffusion.D) << "\n";
  o << "diffusion.gamma = " << format_double(s.diffusion.gamma) << "\n";
  o << "attractant = " << (s.attractant == AttractantKind::LogKernel ? "log_kernel" : "fe_fields") << "\n";
  o << "log_kernel_chi = " << format_double(s.log_kernel_chi) << "\n";
  o << "taxis =";
  for (std::size_t i = 0; i < s.taxis.size(); ++i)
    o << (i ? ", " : " ") << s.taxis[i].field << ":" << format_double(s.taxis[i].chi);
  o << "\n";
  o << "cell_reaction = " << reaction_str(s.cell_reaction) << "\n";
  o << "cell_init = " << (s.cell_init == CellInit::SinglePeakInverse ? "single_peak_inverse" : "density") << "\n";
  o << "cell_profile = " << profile_str(s.cell_profile) << "\n";
  o << "fields =";
  for (std::size_t i = 0; i < s.fields.size(); ++i) o << (i ? ", " : " ") << s.fields[i].name;
  o << "\n";
  for (const auto& f : s.fields) {
    const std::string p = "field." + f.name + ".";
    o << p << "diffusing = " << bool_str(f.diffusing) << "\n";
    o << p << "D = " << format_double(f.D) << "\n";
    o << p << "eps = " << format_double(f.eps) << "\n";
    o << p << "reaction = " << reaction_str(f.reaction) << "\n";
    o << p << "initial = " << profile_str(f.initial) << "\n";
  }
  o << "M = " << s.M << "\n";
  o << "N = " << s.N << "\n";
  o << "freeze_last_cell_reaction = " << bool_str(s.freeze_last_cell_reaction) << "\n";
  o << "t_end = " << format_double(s.t_end) << "\n";
  o << "snapshots = " << list_str(s.snapshots) << "\n";
  for (const auto& [k, v] : s.parameters) o << "param." << k << " = " << format_double(v) << "\n";
  return o.str();
}

ModelSpec parse_config(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::vector<std::string> order;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail("line " + std::to_string(lineno) + ": empty key");
    if (kv.count(key)) fail("duplicate key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
    order.push_back(key);
  }

  ModelSpec s;
  auto take = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  // Fields first: their names decide which field.* keys are legal.
  if (auto v = take("fields"))
    for (const auto& name : split(*v, ',')) {
      FieldSpec f;
      f.name = name;
      s.fields.push_back(f);
    }

  for (const auto& key : order) {
    const std::string& v = kv[key];
    if (key == "fields") continue;
    if (key == "name") s.name = v;
    else if (key == "whole_line") s.whole_line = parse_bool(v, key);
    else if (key == "a") s.a = parse_double(v, key);
    else if (key == "b") s.b = parse_double(v, key);
    else if (key == "diffusion.kind") {
      if (v == "linear") s.diffusion.kind = DiffusionKind::Linear;
      else if (v == "power_law") s.diffusion.kind = DiffusionKind::PowerLaw;
      else if (v == "volume_filling") s.diffusion.kind = DiffusionKind::VolumeFilling;
      else fail("unknown diffusion kind '" + v + "'");
    } else if (key == "diffusion.D") s.diffusion.D = parse_double(v, key);
    else if (key == "diffusion.gamma") s.diffusion.gamma = parse_double(v, key);
    else if (key == "attractant") {
      if (v == "log_kernel") s.attractant = AttractantKind::LogKernel;
      else if (v == "fe_fields") s.attractant = AttractantKind::FeFields;
      else fail("unknown attractant '" + v + "'");
    } else if (key == "log_kernel_chi") s.log_kernel_chi = parse_double(v, key);
    else if (key == "taxis") {
      for (const auto& item : split(v, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) fail("taxis entries are field:chi");
        s.taxis.push_back({trim(item.substr(0, colon)), parse_double(trim(item.substr(colon + 1)), key)});
      }
    } else if (key == "cell_reaction") s.cell_reaction = parse_reaction(v, key);
    else if (key == "cell_init") {
      if (v == "single_peak_inverse") s.cell_init = CellInit::SinglePeakInverse;
      else if (v == "density") s.cell_init = CellInit::Density;
      else fail("unknown cell_init '" + v + "'");
    } else if (key == "cell_profile") s.cell_profile = parse_profile(v, key);
    else if (key == "M") s.M = parse_int(v, key);
    else if (key == "N") s.N = parse_int(v, key);
    else if (key == "freeze_last_cell_reaction") s.freeze_last_cell_reaction = parse_bool(v, key);
    else if (key == "t_end") s.t_end = parse_double(v, key);
    else if (key == "snapshots") {
      for (const auto& t : split(v, ',')) s.snapshots.push_back(parse_double(t, key));
    } else if (key.rfind("param.", 0) == 0) {
      s.parameters[key.substr(6)] = parse_double(v, key);
    } else if (key.rfind("field.", 0) == 0) {
      const auto dot = key.rfind('.');
      const std::string name = key.substr(6, dot - 6), attr = key.substr(dot + 1);
      const int idx = s.field_index(name);
      if (idx < 0) fail("key '" + key + "' names a field not listed in 'fields'");
      FieldSpec& f = s.fields[static_cast<std::size_t>(idx)];
      if (attr == "diffusing") f.diffusing = parse_bool(v, key);
      else if (attr == "D") f.D = parse_double(v, key);
      else if (attr == "eps") f.eps = parse_double(v, key);
      else if (attr == "reaction") f.reaction = parse_reaction(v, key);
      else if (attr == "initial") f.initial = parse_profile(v, key);
      else fail("unknown field attribute '" + attr + "'");
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  return s;
}

ModelSpec load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mtfe
