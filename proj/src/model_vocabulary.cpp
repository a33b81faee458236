#include "ctgof/model_vocabulary.hpp"

#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ctgof/csv_io.hpp"

namespace ctgof {

namespace {

struct Entry {
  std::vector<std::pair<std::string, std::string>> keys;  // name, default ("" = required)
  std::string help;
};

const std::map<std::string, Entry, std::less<>>& vocabulary() {
  static const std::map<std::string, Entry, std::less<>> v = {
      {"constant", {{{"value", ""}}, "c"}},
      {"linear", {{{"a", "0"}, {"b", "1"}}, "a + b x"}},
      {"poly", {{}, "c0 + c1 x + c2 x^2 + ... (keys c0, c1, ...)"}},
      {"ou", {{{"theta", "1"}, {"mean", "0"}}, "-theta (x - mean)"}},
      {"sinusoidal", {{{"base", "1"}, {"amp", "0.5"}, {"period", "1"}}, "base (1 + amp sin(2 pi x / period))"}},
      {"exp-kernel", {{{"a", ""}, {"b", ""}, {"support", ""}}, "a exp(-b t) on [0, support]"}},
      {"box-kernel", {{{"height", ""}, {"width", "1"}}, "height on [0, width]"}},
      {"box-h", {{{"height", "1"}, {"width", "1"}}, "height on [0, width]"}},
      {"cosine-h", {{{"c", "1"}, {"freq", "1"}, {"shift", "0"}}, "c cos(freq (x - shift))"}},
      {"table", {{{"file", ""}}, "linear interpolation through a two-column CSV x,y"}},
  };
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

ScalarModel load_table(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("table model: cannot open '" + file.string() + "'");
  std::vector<double> xs, ys;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string_view::npos) throw std::invalid_argument("table model: lines must be x,y");
    const auto xt = trim(t.substr(0, comma));
    if (xs.empty() && ys.empty() && !xt.empty() && std::isalpha(static_cast<unsigned char>(xt.front()))) continue;
    try {
      xs.push_back(parse_double(xt, "table x"));
      ys.push_back(parse_double(t.substr(comma + 1), "table y"));
    } catch (const DataError& e) {
      throw std::invalid_argument(std::string("table model: ") + e.what());
    }
  }
  return ScalarModel::tabulated(std::move(xs), std::move(ys), "table(" + file.filename().string() + ")");
}

}  // namespace

ScalarModel parse_model(std::string_view spec, const std::filesystem::path& base_dir) {
  spec = trim(spec);
  const auto colon = spec.find(':');
  const std::string name(trim(spec.substr(0, colon)));
  const auto it = vocabulary().find(name);
  if (it == vocabulary().end()) throw std::invalid_argument("unknown model '" + name + "'");

  std::map<std::string, std::string, std::less<>> given;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto part = trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      if (part.empty()) continue;
      const auto eq = part.find('=');
      if (eq == std::string_view::npos) throw std::invalid_argument("model '" + name + "': expected key=value, got '" + std::string(part) + "'");
      given[std::string(trim(part.substr(0, eq)))] = std::string(trim(part.substr(eq + 1)));
    }
  }

  if (name == "poly") {
    std::vector<double> coef;
    for (std::size_t k = 0; k < given.size(); ++k) {
      const auto c = given.find("c" + std::to_string(k));
      if (c == given.end()) throw std::invalid_argument("poly: coefficients must be c0, c1, ... without gaps");
      coef.push_back(parse_double(c->second, c->first));
    }
    if (coef.empty()) throw std::invalid_argument("poly: at least c0 is required");
    return ScalarModel::polynomial(std::move(coef));
  }
  if (name == "table") {
    for (const auto& [k, v] : given) {
      if (k != "file") throw std::invalid_argument("model 'table' has no key '" + k + "'");
    }
    const auto f = given.find("file");
    if (f == given.end()) throw std::invalid_argument("table: file is required");
    std::filesystem::path p(f->second);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return load_table(p);
  }

  std::map<std::string, double, std::less<>> value;
  for (const auto& [k, v] : given) {
    bool known = false;
    for (const auto& key : it->second.keys) known = known || key.first == k;
    if (!known) throw std::invalid_argument("model '" + name + "' has no key '" + k + "'");
  }
  for (const auto& [key, def] : it->second.keys) {
    const auto g = given.find(key);
    if (g != given.end()) {
      try {
        value[key] = parse_double(g->second, name + "." + key);
      } catch (const DataError& e) {
        throw std::invalid_argument(e.what());
      }
    } else if (def.empty()) {
      throw std::invalid_argument("model '" + name + "' requires key '" + key + "'");
    } else {
      value[key] = parse_double(def, key);
    }
  }
  auto v = [&](const char* k) { return value.at(k); };

  if (name == "constant") return ScalarModel::constant(v("value"));
  if (name == "linear") return ScalarModel::linear(v("a"), v("b"));
  if (name == "ou") return ScalarModel::ornstein_uhlenbeck(v("theta"), v("mean"));
  if (name == "sinusoidal") return ScalarModel::sinusoidal(v("base"), v("amp"), v("period"));
  if (name == "exp-kernel") return ScalarModel::exponential_kernel(v("a"), v("b"), v("support"));
  if (name == "box-kernel" || name == "box-h") return ScalarModel::box(v("height"), v("width"));
  return ScalarModel::cosine(v("c"), v("freq"), v("shift"));
}

std::string model_vocabulary_help() {
  std::string s;
  for (const auto& [name, entry] : vocabulary()) {
    s += "  " + name;
    for (std::size_t i = 0; i < entry.keys.size(); ++i) {
      s += (i ? "," : ":") + entry.keys[i].first;
      if (!entry.keys[i].second.empty()) s += "=" + entry.keys[i].second;
    }
    s += "    " + entry.help + "\n";
  }
  return s;
}

}  // namespace ctgof
