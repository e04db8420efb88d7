#include "frogsim/config.hpp"

#include <charconv>
#include <istream>
#include <stdexcept>

namespace frog {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& raw, const char* what) {
  const std::string text = trim(raw);
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && text.front() == '+') ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != end) {
    throw std::invalid_argument(std::string("cannot parse '") + raw + "' as " + what);
  }
  return value;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& text, Parse parse) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(parse(piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::int64_t parse_int(const std::string& text) {
  // Accept integral scientific literals such as 1e4.
  try {
    return parse_number<std::int64_t>(text, "an integer");
  } catch (const std::invalid_argument&) {
    const double v = parse_number<double>(text, "an integer");
    const auto i = static_cast<std::int64_t>(v);
    if (static_cast<double>(i) != v) throw std::invalid_argument("'" + text + "' is not an integer");
    return i;
  }
}

std::uint64_t parse_seed(const std::string& text) { return parse_number<std::uint64_t>(text, "a seed"); }

double parse_real(const std::string& text) { return parse_number<double>(text, "a real number"); }

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    }
    out.emplace_back(key, trim(body.substr(eq + 1)));
  }
  return out;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "kind") {
    cfg.kind = parse_experiment_kind(value);
  } else if (key == "model") {
    cfg.model = parse_model_kind(value);
  } else if (key == "p") {
    cfg.p_grid = parse_list<double>(value, parse_real);
  } else if (key == "n") {
    cfg.n_list = parse_list<std::int64_t>(value, parse_int);
  } else if (key == "tmax") {
    cfg.t_max = parse_int(value);
  } else if (key == "replications" || key == "r") {
    cfg.replications = parse_int(value);
  } else if (key == "seed") {
    cfg.seed = parse_seed(value);
  } else if (key == "cap") {
    cfg.cap = parse_int(value);
  } else if (key == "draws") {
    cfg.draws = parse_int(value);
  } else if (key == "random_states") {
    cfg.random_states = parse_int(value);
  } else if (key == "large_n") {
    cfg.large_n = parse_int(value);
  } else if (key == "alpha_tol") {
    cfg.alpha_tol = parse_real(value);
  } else if (key == "max_steps") {
    cfg.max_steps = parse_int(value);
  } else {
    throw std::invalid_argument("unknown setting '" + key + "'");
  }
}

}  // namespace frog
