#include "campana/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace campana {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<std::int64_t> ints(const std::string& s) {
  std::vector<std::int64_t> out;
  for (const auto& w : words(s)) {
    std::size_t used = 0;
    const long long v = std::stoll(w, &used);
    if (used != w.size()) throw std::invalid_argument("not an integer: '" + w + "'");
    out.push_back(v);
  }
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("not a boolean: '" + v + "'");
}

}  // namespace

OrbifoldModel parse_model(const std::string& text) {
  OrbifoldModel m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  enum class Sec { top, component, cone, clemens } sec = Sec::top;
  std::string place;
  bool saw_cone = false;
  while (std::getline(in, line)) {
    ++lineno;
    try {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw std::invalid_argument("unterminated section header");
        const auto w = words(line.substr(1, line.size() - 2));
        if (w.size() == 2 && w[0] == "component") {
          sec = Sec::component;
          BoundaryComponent c;
          c.id = w[1];
          m.components.push_back(c);
        } else if (w.size() == 1 && w[0] == "cone") {
          sec = Sec::cone;
          saw_cone = true;
        } else if (w.size() == 2 && w[0] == "clemens") {
          sec = Sec::clemens;
          place = w[1];
          m.clemens[place];
        } else {
          throw std::invalid_argument("unknown section '" + line + "'");
        }
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      switch (sec) {
        case Sec::top:
          if (key == "name") m.name = val;
          else if (key == "dim") m.dim = std::stoi(val);
          else if (key == "pic_rank") m.pic_rank = std::stoi(val);
          else if (key == "backend") m.backend = val;
          else if (key == "adjoint_rigid") m.adjoint_rigid = parse_bool(val);
          else throw std::invalid_argument("unknown key '" + key + "'");
          break;
        case Sec::component: {
          auto& c = m.components.back();
          if (key == "weight") c.weight = Weight::parse(val);
          else if (key == "rho") c.rho = std::stoi(val);
          else if (key == "lambda") c.lambda = parse_rational(val);
          else if (key == "pic_class") c.pic_class = ints(val);
          else throw std::invalid_argument("unknown component key '" + key + "'");
          break;
        }
        case Sec::cone:
          if (key != "generator") throw std::invalid_argument("unknown cone key '" + key + "'");
          m.eff_generators.push_back(ints(val));
          break;
        case Sec::clemens: {
          if (key != "face") throw std::invalid_argument("unknown clemens key '" + key + "'");
          const auto w = words(val);
          m.clemens[place].faces.insert(std::set<std::string>(w.begin(), w.end()));
          break;
        }
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::out_of_range& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": value out of range");
    }
  }
  if (!saw_cone) m.eff_generators.clear();
  m.validate();
  return m;
}

OrbifoldModel read_model_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open model file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string write_model(const OrbifoldModel& m) {
  std::ostringstream out;
  out << "name = " << m.name << "\n"
      << "dim = " << m.dim << "\n"
      << "pic_rank = " << m.pic_rank << "\n"
      << "backend = " << m.backend << "\n"
      << "adjoint_rigid = " << (m.adjoint_rigid ? "true" : "false") << "\n";
  auto vec = [](const std::vector<std::int64_t>& v) {
    std::string s;
    for (auto x : v) s += (s.empty() ? "" : " ") + std::to_string(x);
    return s;
  };
  for (const auto& c : m.components) {
    out << "\n[component " << c.id << "]\n"
        << "weight = " << c.weight.to_string() << "\n"
        << "rho = " << c.rho << "\n"
        << "lambda = " << to_string(c.lambda) << "\n"
        << "pic_class = " << vec(c.pic_class) << "\n";
  }
  if (!m.eff_generators.empty()) {
    out << "\n[cone]\n";
    for (const auto& g : m.eff_generators) out << "generator = " << vec(g) << "\n";
  }
  for (const auto& [place, spec] : m.clemens) {
    out << "\n[clemens " << place << "]\n";
    for (const auto& f : spec.faces) {
      std::string s;
      for (const auto& id : f) s += (s.empty() ? "" : " ") + id;
      out << "face = " << s << "\n";
    }
  }
  return out.str();
}

}  // namespace campana
