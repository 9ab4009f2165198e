#include "tilewalsh/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tilewalsh {

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::runtime_error("malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Json rational_json(const Rational& r) { return format_rational(r); }
Json real_json(double x) { return format_real(x); }
Json quantity_json(const Quantity& q) { return format_quantity(q); }

Json lq_json(const LqValue& v) {
  Json j;
  j["value"] = real_json(v.value);
  if (v.power) j["power"] = rational_json(*v.power);
  return j;
}

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(Integer(j.dump()));
  if (j.is_number_float()) return parse_rational(j.dump());
  throw std::invalid_argument("expected a number or numeric string, got " + j.dump());
}

namespace {

int levels_field(const Json& j) {
  if (!j.is_object() || !j.contains("levels")) throw std::invalid_argument("missing field \"levels\"");
  const int L = j.at("levels").get<int>();
  if (L < 0 || L > kMaxLevels) throw std::invalid_argument("levels out of range: " + std::to_string(L));
  return L;
}

}  // namespace

Json signal_to_json(const Signal& f) {
  Json j;
  j["levels"] = f.levels();
  j["dim"] = f.dim();
  j["kind"] = std::string(to_string(f.kind()));
  Json values = Json::array();
  const auto all = f.values();
  const auto comp = static_cast<std::size_t>(f.components());
  for (std::size_t x = 0; x < f.cells(); ++x) {
    if (comp == 1) {
      values.push_back(rational_json(all[x]));
      continue;
    }
    Json cell = Json::array();
    for (std::size_t c = 0; c < comp; ++c) cell.push_back(rational_json(all[x * comp + c]));
    values.push_back(std::move(cell));
  }
  j["values"] = std::move(values);
  return j;
}

Signal signal_from_json(const Json& j) {
  const int L = levels_field(j);
  const int dim = j.value("dim", 1);
  if (dim < 1) throw std::invalid_argument("dim must be positive");
  const ValueKind kind = parse_value_kind(j.value("kind", std::string("vector")));
  const std::size_t comp = kind == ValueKind::Matrix ? static_cast<std::size_t>(dim * dim) : static_cast<std::size_t>(dim);
  const Json& values = j.at("values");
  if (!values.is_array()) throw std::invalid_argument("\"values\" must be an array");
  std::vector<Rational> flat;
  flat.reserve(comp << L);
  for (const auto& v : values) {
    if (v.is_array()) {
      if (v.size() != comp) throw std::invalid_argument("cell value has wrong length");
      for (const auto& c : v) flat.push_back(rational_from_json(c));
    } else {
      flat.push_back(rational_from_json(v));
    }
  }
  if (flat.size() != (comp << L))
    throw std::invalid_argument("expected " + std::to_string(comp << L) + " values, got " + std::to_string(flat.size()));
  return Signal::from_values(L, dim, kind, flat);
}

Json level_set_to_json(const LevelSet& s) {
  Json j;
  j["levels"] = s.levels();
  j["cells"] = s.members();
  return j;
}

LevelSet level_set_from_json(const Json& j) {
  const int L = levels_field(j);
  LevelSet s(L);
  if (j.contains("cells")) {
    for (const auto& c : j.at("cells")) {
      const auto cell = c.get<std::uint64_t>();
      if (cell >= pow2u(L)) throw std::invalid_argument("cell index out of range: " + std::to_string(cell));
      s.insert(cell);
    }
  } else if (j.contains("bits")) {
    const auto bits = j.at("bits").get<std::string>();
    if (bits.size() != pow2u(L)) throw std::invalid_argument("bitstring length must be 2^levels");
    for (std::size_t x = 0; x < bits.size(); ++x) {
      if (bits[x] == '1')
        s.insert(x);
      else if (bits[x] != '0')
        throw std::invalid_argument("bitstring may contain only 0 and 1");
    }
  } else {
    throw std::invalid_argument("level set needs \"cells\" or \"bits\"");
  }
  return s;
}

Json frequency_choice_to_json(const FrequencyChoice& n) {
  Json j;
  j["levels"] = n.levels();
  j["N"] = n.values();
  return j;
}

FrequencyChoice frequency_choice_from_json(const Json& j) {
  const int L = levels_field(j);
  return FrequencyChoice(L, j.at("N").get<std::vector<std::uint64_t>>());
}

Json bitile_json(const Bitile& b) {
  Json j;
  j["k"] = b.time.k;
  j["pos"] = b.time.pos;
  j["m"] = b.m;
  return j;
}

Bitile bitile_from_json(const Json& j) {
  Bitile b{{j.at("k").get<int>(), j.at("pos").get<std::uint64_t>()}, j.at("m").get<std::uint64_t>()};
  if (b.time.k < 0 || b.time.k > kMaxLevels || !b.time.in_unit())
    throw std::invalid_argument("bitile time interval outside [0,1): " + j.dump());
  return b;
}

Json bitiles_json(const std::vector<Bitile>& v) {
  Json a = Json::array();
  for (const auto& b : v) a.push_back(bitile_json(b));
  return a;
}

Json tree_json(const Tree& t) {
  Json j;
  j["top"] = bitile_json(t.top);
  j["members"] = bitiles_json(t.members);
  return j;
}

Tree tree_from_json(const Json& j) {
  Tree t;
  t.top = bitile_from_json(j.at("top"));
  for (const auto& m : j.at("members")) t.members.push_back(bitile_from_json(m));
  std::sort(t.members.begin(), t.members.end());
  return t;
}

Json tree_family_to_json(int levels, const TreeFamily& family) {
  Json j;
  j["levels"] = levels;
  Json trees = Json::array();
  for (const auto& t : family) trees.push_back(tree_json(t));
  j["trees"] = std::move(trees);
  return j;
}

TreeFamily tree_family_from_json(const Json& j, int levels) {
  if (levels_field(j) != levels) throw std::invalid_argument("tree family resolution differs from the signal");
  TreeFamily out;
  for (const auto& t : j.at("trees")) out.push_back(tree_from_json(t));
  return out;
}

Json certificate_json(const Certificate& c) {
  Json j;
  j["name"] = c.name;
  j["lhs"] = quantity_json(c.lhs);
  j["rhs"] = quantity_json(c.rhs);
  j["mode"] = c.exact ? "exact" : "float";
  j["pass"] = c.pass;
  j["kind"] = c.theorem_backed ? "theorem-backed" : "empirical";
  Json ctx = Json::object();
  for (const auto& [k, v] : c.context) ctx[k] = v;
  j["context"] = std::move(ctx);
  return j;
}

std::string ratio_csv(const std::vector<RatioRow>& rows) {
  std::ostringstream out;
  out << "L,q,norm,ratio_name,value\n";
  for (const auto& r : rows)
    out << r.levels << ',' << format_real(r.q) << ',' << r.norm << ',' << r.name << ',' << format_real(r.value) << '\n';
  return out.str();
}

}  // namespace tilewalsh
