#include "bopt/params.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "bopt/errors.hpp"
#include "bopt/grammar.hpp"
#include "bopt/kernels.hpp"

namespace bopt {

Params default_params() { return Params{}; }

std::string_view to_string(LearningType t) {
  switch (t) {
    case LearningType::ML: return "ML";
    case LearningType::MAP: return "MAP";
    case LearningType::MCMC: return "MCMC";
  }
  return "?";
}
std::string_view to_string(ScoreType t) { return t == ScoreType::SC_ML ? "SC_ML" : "SC_MAP"; }
std::string_view to_string(InitMethod m) {
  switch (m) {
    case InitMethod::LHS: return "LHS";
    case InitMethod::SOBOL: return "SOBOL";
    case InitMethod::UNIFORM: return "UNIFORM";
  }
  return "?";
}
std::string_view to_string(Verbosity v) {
  switch (v) {
    case Verbosity::quiet: return "quiet";
    case Verbosity::info: return "info";
    case Verbosity::debug: return "debug";
  }
  return "?";
}

namespace {

// A raw value from the document: a quoted/bare word, a number token, or a list of number tokens.
struct Word {
  std::string text;
  bool quoted;
};
struct Number {
  std::string text;
};
using RawValue = std::variant<Word, Number, std::vector<Number>>;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool looks_numeric(std::string_view s) {
  return !s.empty() && (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-' ||
                        s[0] == '+' || s[0] == '.');
}

std::string strip_comment(std::string_view line) {
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_quotes = !in_quotes;
    if (line[i] == '#' && !in_quotes) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

RawValue parse_raw(const std::string& key, const std::string& text, int line_no) {
  auto where = [&] { return " (line " + std::to_string(line_no) + ", key '" + key + "')"; };
  if (text.empty()) throw SyntaxError("missing value" + where());
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') throw SyntaxError("unterminated string" + where());
    return Word{text.substr(1, text.size() - 2), true};
  }
  if (text.front() == '[') {
    if (text.back() != ']') throw SyntaxError("unterminated list" + where());
    std::vector<Number> items;
    std::string body = trim(std::string_view(text).substr(1, text.size() - 2));
    if (body.empty()) return items;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!looks_numeric(item)) throw TypeMismatch("list entries must be numbers" + where());
      items.push_back(Number{item});
    }
    return items;
  }
  if (looks_numeric(text)) return Number{text};
  return Word{text, false};
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw TypeMismatch("'" + key + "' expects a number, got '" + s + "'");
  return v;
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& s) {
  Int v{};
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec == std::errc::result_out_of_range)
    throw RangeError("'" + key + "' is out of range: " + s);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw TypeMismatch("'" + key + "' expects an integer, got '" + s + "'");
  return v;
}

double as_real(const std::string& key, const RawValue& v) {
  if (auto* n = std::get_if<Number>(&v)) return to_double(key, n->text);
  throw TypeMismatch("'" + key + "' expects a number");
}

int as_int(const std::string& key, const RawValue& v) {
  if (auto* n = std::get_if<Number>(&v)) return to_integer<int>(key, n->text);
  throw TypeMismatch("'" + key + "' expects an integer");
}

std::vector<double> as_list(const std::string& key, const RawValue& v) {
  if (auto* l = std::get_if<std::vector<Number>>(&v)) {
    std::vector<double> out;
    for (const auto& n : *l) out.push_back(to_double(key, n.text));
    return out;
  }
  // A scalar is accepted as a one-element list.
  if (auto* n = std::get_if<Number>(&v)) return {to_double(key, n->text)};
  throw TypeMismatch("'" + key + "' expects a list of numbers");
}

std::string as_word(const std::string& key, const RawValue& v) {
  if (auto* w = std::get_if<Word>(&v)) return w->text;
  throw TypeMismatch("'" + key + "' expects a string");
}

template <typename Enum>
Enum as_enum(const std::string& key, const RawValue& v,
             std::initializer_list<std::pair<std::string_view, Enum>> choices) {
  const std::string word = as_word(key, v);
  for (const auto& [name, value] : choices)
    if (word == name) return value;
  throw RangeError("'" + key + "' has invalid value '" + word + "'");
}

using Setter = std::function<void(Params&, const std::string&, const RawValue&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"surr_name", [](Params& p, auto& k, auto& v) { p.surr_name = as_word(k, v); }},
      {"crit_name", [](Params& p, auto& k, auto& v) { p.crit_name = as_word(k, v); }},
      {"kernel_name", [](Params& p, auto& k, auto& v) { p.kernel_name = as_word(k, v); }},
      {"mean_name", [](Params& p, auto& k, auto& v) { p.mean_name = as_word(k, v); }},
      {"kernel_hp_mean", [](Params& p, auto& k, auto& v) { p.kernel_hp_mean = as_list(k, v); }},
      {"kernel_hp_std", [](Params& p, auto& k, auto& v) { p.kernel_hp_std = as_list(k, v); }},
      {"prior_alpha", [](Params& p, auto& k, auto& v) { p.prior_alpha = as_real(k, v); }},
      {"prior_beta", [](Params& p, auto& k, auto& v) { p.prior_beta = as_real(k, v); }},
      {"mean_w0", [](Params& p, auto& k, auto& v) { p.mean_w0 = as_list(k, v); }},
      {"mean_w_scale", [](Params& p, auto& k, auto& v) { p.mean_w_scale = as_real(k, v); }},
      {"noise", [](Params& p, auto& k, auto& v) { p.noise = as_real(k, v); }},
      {"l_type",
       [](Params& p, auto& k, auto& v) {
         p.l_type = as_enum<LearningType>(k, v,
                                          {{"ML", LearningType::ML},
                                           {"L_ML", LearningType::ML},
                                           {"MAP", LearningType::MAP},
                                           {"L_MAP", LearningType::MAP},
                                           {"MCMC", LearningType::MCMC},
                                           {"L_MCMC", LearningType::MCMC}});
       }},
      {"sc_type",
       [](Params& p, auto& k, auto& v) {
         p.sc_type = as_enum<ScoreType>(k, v, {{"SC_ML", ScoreType::SC_ML},
                                               {"SC_MAP", ScoreType::SC_MAP}});
       }},
      {"learn_frequency", [](Params& p, auto& k, auto& v) { p.learn_frequency = as_int(k, v); }},
      {"n_iterations", [](Params& p, auto& k, auto& v) { p.n_iterations = as_int(k, v); }},
      {"n_init_samples", [](Params& p, auto& k, auto& v) { p.n_init_samples = as_int(k, v); }},
      {"init_method",
       [](Params& p, auto& k, auto& v) {
         p.init_method = as_enum<InitMethod>(k, v, {{"LHS", InitMethod::LHS},
                                                    {"SOBOL", InitMethod::SOBOL},
                                                    {"UNIFORM", InitMethod::UNIFORM}});
       }},
      {"n_inner_global_evals",
       [](Params& p, auto& k, auto& v) { p.n_inner_global_evals = as_int(k, v); }},
      {"n_inner_local_evals",
       [](Params& p, auto& k, auto& v) { p.n_inner_local_evals = as_int(k, v); }},
      {"n_learn_global_evals",
       [](Params& p, auto& k, auto& v) { p.n_learn_global_evals = as_int(k, v); }},
      {"n_learn_local_evals",
       [](Params& p, auto& k, auto& v) { p.n_learn_local_evals = as_int(k, v); }},
      {"epsilon", [](Params& p, auto& k, auto& v) { p.epsilon = as_real(k, v); }},
      {"hedge_eta", [](Params& p, auto& k, auto& v) { p.hedge_eta = as_real(k, v); }},
      {"lcb_kappa", [](Params& p, auto& k, auto& v) { p.lcb_kappa = as_real(k, v); }},
      {"mcmc_particles", [](Params& p, auto& k, auto& v) { p.mcmc_particles = as_int(k, v); }},
      {"mcmc_burnin", [](Params& p, auto& k, auto& v) { p.mcmc_burnin = as_int(k, v); }},
      {"random_seed",
       [](Params& p, auto& k, auto& v) {
         auto* n = std::get_if<Number>(&v);
         if (!n) throw TypeMismatch("'random_seed' expects an integer");
         if (!n->text.empty() && n->text[0] == '-')
           throw RangeError("'random_seed' must be nonnegative");
         p.random_seed = to_integer<std::uint64_t>(k, n->text);
       }},
      {"verbose",
       [](Params& p, auto& k, auto& v) {
         p.verbose = as_enum<Verbosity>(k, v, {{"quiet", Verbosity::quiet},
                                               {"info", Verbosity::info},
                                               {"debug", Verbosity::debug}});
       }},
  };
  return table;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw RangeError(msg);
}

}  // namespace

void validate(const Params& p) {
  SpecTree surr = parse_expression(p.surr_name);
  require_kind(surr, ComponentKind::surrogate, "surrogate");
  SpecTree crit = parse_expression(p.crit_name);
  require_kind(crit, ComponentKind::criterion, "criterion");
  for (const auto& child : crit.children)
    if (child.node == "cHedge") throw ArityError("cHedge cannot be nested");
  SpecTree mean = parse_expression(p.mean_name);
  require_kind(mean, ComponentKind::mean, "mean function");
  KernelSpec kernel = KernelSpec::from_tree(parse_expression(p.kernel_name));

  if (p.kernel_hp_mean.size() != kernel.n_params() || p.kernel_hp_std.size() != kernel.n_params())
    throw LengthMismatch("kernel '" + p.kernel_name + "' has " +
                         std::to_string(kernel.n_params()) +
                         " parameter(s) but kernel_hp_mean/kernel_hp_std have " +
                         std::to_string(p.kernel_hp_mean.size()) + "/" +
                         std::to_string(p.kernel_hp_std.size()));
  for (double v : p.kernel_hp_mean) require(v > 0.0, "kernel_hp_mean entries must be positive");
  for (double v : p.kernel_hp_std) require(v > 0.0, "kernel_hp_std entries must be positive");
  require(p.prior_alpha > 0.0, "prior_alpha must be positive");
  require(p.prior_beta > 0.0, "prior_beta must be positive");
  require(p.mean_w_scale > 0.0, "mean_w_scale must be positive");
  require(p.noise >= 0.0, "noise must be nonnegative");
  require(p.learn_frequency >= 1, "learn_frequency must be positive");
  require(p.n_iterations >= 0, "n_iterations must be nonnegative");
  require(p.n_init_samples >= 1, "n_init_samples must be positive");
  require(p.n_inner_global_evals >= 1 && p.n_inner_local_evals >= 1,
          "inner evaluation budgets must be positive");
  require(p.n_learn_global_evals >= 1 && p.n_learn_local_evals >= 1,
          "learning evaluation budgets must be positive");
  require(p.epsilon >= 0.0 && p.epsilon <= 1.0, "epsilon must lie in [0, 1]");
  require(p.hedge_eta > 0.0, "hedge_eta must be positive");
  require(p.lcb_kappa > 0.0, "lcb_kappa must be positive");
  require(p.mcmc_particles >= 1, "mcmc_particles must be positive");
  require(p.mcmc_burnin >= 0, "mcmc_burnin must be nonnegative");
}

Params parse_params(std::string_view doc) {
  Params params = default_params();
  std::set<std::string, std::less<>> seen;
  std::istringstream in{std::string(doc)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos)
      throw SyntaxError("expected 'key = value' on line " + std::to_string(line_no));
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) throw UnknownKey("unknown configuration key '" + key + "'");
    if (!seen.insert(key).second)
      throw SyntaxError("duplicate key '" + key + "' on line " + std::to_string(line_no));
    it->second(params, key, parse_raw(key, value, line_no));
  }
  validate(params);
  return params;
}

Params load_params(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error("cannot open configuration file '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_params(buffer.str());
}

namespace {

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_list(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_real(values[i]);
  }
  return out + "]";
}

}  // namespace

std::string render_params(const Params& p) {
  std::ostringstream out;
  auto quoted = [](const std::string& s) { return "\"" + s + "\""; };
  out << "surr_name = " << quoted(p.surr_name) << '\n'
      << "crit_name = " << quoted(p.crit_name) << '\n'
      << "kernel_name = " << quoted(p.kernel_name) << '\n'
      << "mean_name = " << quoted(p.mean_name) << '\n'
      << "kernel_hp_mean = " << format_list(p.kernel_hp_mean) << '\n'
      << "kernel_hp_std = " << format_list(p.kernel_hp_std) << '\n'
      << "prior_alpha = " << format_real(p.prior_alpha) << '\n'
      << "prior_beta = " << format_real(p.prior_beta) << '\n'
      << "mean_w0 = " << format_list(p.mean_w0) << '\n'
      << "mean_w_scale = " << format_real(p.mean_w_scale) << '\n'
      << "noise = " << format_real(p.noise) << '\n'
      << "l_type = " << quoted(std::string(to_string(p.l_type))) << '\n'
      << "sc_type = " << quoted(std::string(to_string(p.sc_type))) << '\n'
      << "learn_frequency = " << p.learn_frequency << '\n'
      << "n_iterations = " << p.n_iterations << '\n'
      << "n_init_samples = " << p.n_init_samples << '\n'
      << "init_method = " << quoted(std::string(to_string(p.init_method))) << '\n'
      << "n_inner_global_evals = " << p.n_inner_global_evals << '\n'
      << "n_inner_local_evals = " << p.n_inner_local_evals << '\n'
      << "n_learn_global_evals = " << p.n_learn_global_evals << '\n'
      << "n_learn_local_evals = " << p.n_learn_local_evals << '\n'
      << "epsilon = " << format_real(p.epsilon) << '\n'
      << "hedge_eta = " << format_real(p.hedge_eta) << '\n'
      << "lcb_kappa = " << format_real(p.lcb_kappa) << '\n'
      << "mcmc_particles = " << p.mcmc_particles << '\n'
      << "mcmc_burnin = " << p.mcmc_burnin << '\n'
      << "random_seed = " << p.random_seed << '\n'
      << "verbose = " << quoted(std::string(to_string(p.verbose))) << '\n';
  return out.str();
}

}  // namespace bopt
